/*
 * Copyright 2026 the ecdc authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/*
 * g2NN matching within one descriptor family. Every query keypoint gets a
 * sorted row of squared distances to all other descriptors; candidates are
 * accepted while d2[j] / d2[j+1] stays at or below the ratio threshold and
 * the scan stops at the first ratio that exceeds it, so repeated clones of
 * one region can all be matched.
 */

#pragma once

#include <algorithm>
#include <set>
#include <stdexcept>
#include <vector>

#include "ecdc/keypoint.hpp"
#include "ecdc/parallel.hpp"

namespace ecdc {

struct NeighborEntry {
    int index = -1;   // index of the other descriptor within its set
    double d2 = 0.0;  // squared Euclidean descriptor distance
};

struct DistanceRow {
    int origin = -1;
    std::vector<NeighborEntry> neighbors;  // ascending by (d2, index)
};

struct MatchPair {
    Point a;
    Point b;
    KeypointKind kind = KeypointKind::Sift;
    double d2 = 0.0;
};

using MatchSet = std::vector<MatchPair>;

inline constexpr int kDefaultMaxNeighbors = 10;

/* Squared distances from descriptor i to all others, ascending, truncated. */
inline DistanceRow distance_row(int i, const std::vector<Descriptor>& set, int max_neighbors)
{
    if (set.size() < 2)
        throw std::invalid_argument("distance_row: need at least two descriptors");
    if (i < 0 || i >= static_cast<int>(set.size()))
        throw std::invalid_argument("distance_row: index out of range");
    if (max_neighbors < 1)
        throw std::invalid_argument("distance_row: max_neighbors must be positive");

    DistanceRow row;
    row.origin = i;
    row.neighbors.reserve(set.size() - 1);
    for (int j = 0; j < static_cast<int>(set.size()); ++j) {
        if (j == i)
            continue;
        row.neighbors.push_back({j, descriptor_sq_distance(set[i], set[j])});
    }
    auto cmp = [](const NeighborEntry& a, const NeighborEntry& b) {
        if (a.d2 != b.d2)
            return a.d2 < b.d2;
        return a.index < b.index;
    };
    const std::size_t keep = std::min<std::size_t>(max_neighbors, row.neighbors.size());
    std::partial_sort(row.neighbors.begin(), row.neighbors.begin() + keep, row.neighbors.end(),
                      cmp);
    row.neighbors.resize(keep);
    return row;
}

namespace detail {

/*
 * Applies the prefix ratio rule to one sorted row: accept candidate j while
 * d2[j] / d2[j+1] <= T, stop at the first ratio above T. A zero next
 * distance means both are exact duplicates and counts as accept.
 */
inline int g2nn_accept_count(const std::vector<NeighborEntry>& row, double ratio_thresh)
{
    int accepted = 0;
    for (std::size_t j = 0; j + 1 < row.size(); ++j) {
        const double ratio = row[j + 1].d2 > 0.0 ? row[j].d2 / row[j + 1].d2 : 0.0;
        if (ratio > ratio_thresh)
            break;
        ++accepted;
    }
    return accepted;
}

}  // namespace detail

/*
 * All g2NN matches within one descriptor set. Unordered duplicates are kept
 * once (canonical index order) and pairs with coincident endpoints are
 * discarded.
 */
inline MatchSet g2nn_match(const std::vector<Descriptor>& set, double ratio_thresh,
                           int max_neighbors = kDefaultMaxNeighbors, int jobs = 0)
{
    if (ratio_thresh <= 0.0 || ratio_thresh >= 1.0)
        throw std::invalid_argument("g2nn_match: ratio threshold must be in (0, 1)");
    MatchSet matches;
    if (set.size() < 2)
        return matches;

    std::vector<DistanceRow> rows(set.size());
    parallel_for(
        set.size(),
        [&](std::size_t i) { rows[i] = distance_row(static_cast<int>(i), set, max_neighbors); },
        jobs);

    std::set<std::pair<int, int>> seen;
    for (const DistanceRow& row : rows) {
        const int accepted = detail::g2nn_accept_count(row.neighbors, ratio_thresh);
        for (int j = 0; j < accepted; ++j) {
            const int other = row.neighbors[j].index;
            const Keypoint& ka = set[row.origin].keypoint;
            const Keypoint& kb = set[other].keypoint;
            if (ka.x == kb.x && ka.y == kb.y)
                continue;
            const std::pair<int, int> key{std::min(row.origin, other),
                                          std::max(row.origin, other)};
            if (!seen.insert(key).second)
                continue;
            MatchPair pair;
            pair.a = {ka.x, ka.y};
            pair.b = {kb.x, kb.y};
            pair.kind = ka.kind;
            pair.d2 = row.neighbors[j].d2;
            matches.push_back(pair);
        }
    }
    return matches;
}

/* Union of per-family g2NN matches; families are never cross-matched. */
inline MatchSet match_both(const std::vector<Descriptor>& sift,
                           const std::vector<Descriptor>& lpsd, double t_sift = 0.6,
                           double t_lpsd = 0.1, int max_neighbors = kDefaultMaxNeighbors,
                           int jobs = 0)
{
    MatchSet out = g2nn_match(sift, t_sift, max_neighbors, jobs);
    MatchSet lp = g2nn_match(lpsd, t_lpsd, max_neighbors, jobs);
    out.insert(out.end(), lp.begin(), lp.end());
    return out;
}

}  // namespace ecdc
