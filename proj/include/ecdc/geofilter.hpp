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
 * Match filtering: near-duplicate removal by spatial distance and iterated
 * RANSAC over a full 2-D affine model. Groups are peeled off one at a time
 * until the best remaining consensus falls below the inlier threshold, so
 * several cloned regions can each keep their own model.
 */

#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include "ecdc/matching.hpp"

namespace ecdc {

struct AffineModel {
    double m[2][2] = {{1.0, 0.0}, {0.0, 1.0}};
    double tx = 0.0;
    double ty = 0.0;

    Point apply(const Point& p) const
    {
        return {m[0][0] * p.x + m[0][1] * p.y + tx, m[1][0] * p.x + m[1][1] * p.y + ty};
    }

    double det() const { return m[0][0] * m[1][1] - m[0][1] * m[1][0]; }
};

struct InlierGroup {
    AffineModel model;
    MatchSet pairs;  // oriented so that model(a) ~ b for every pair
};

struct RansacParams {
    int min_inliers = 6;        // N: groups below this consensus stop the loop
    double epsilon = 3.0;       // inlier residual tolerance in pixels
    int max_rounds = 2000;      // hypotheses per group extraction
    std::uint32_t seed = 42;
};

/* Drops pairs whose endpoints are closer than `s` pixels (equality kept). */
inline MatchSet spatial_filter(const MatchSet& pairs, double s = 50.0)
{
    if (s <= 0.0)
        throw std::invalid_argument("spatial_filter: threshold must be positive");
    MatchSet out;
    out.reserve(pairs.size());
    for (const MatchPair& p : pairs)
        if (distance(p.a, p.b) >= s)
            out.push_back(p);
    return out;
}

namespace detail {

/* Exact affine fit through three correspondences; false when collinear. */
inline bool fit_affine_3(const MatchPair* sample[3], AffineModel& out)
{
    double a[3][3];
    for (int i = 0; i < 3; ++i) {
        a[i][0] = sample[i]->a.x;
        a[i][1] = sample[i]->a.y;
        a[i][2] = 1.0;
    }
    const double bx[3] = {sample[0]->b.x, sample[1]->b.x, sample[2]->b.x};
    const double by[3] = {sample[0]->b.y, sample[1]->b.y, sample[2]->b.y};
    double rx[3], ry[3];
    if (!solve3(a, bx, rx) || !solve3(a, by, ry))
        return false;
    out.m[0][0] = rx[0];
    out.m[0][1] = rx[1];
    out.tx = rx[2];
    out.m[1][0] = ry[0];
    out.m[1][1] = ry[1];
    out.ty = ry[2];
    return std::abs(out.det()) > 1e-6;
}

/* Least-squares affine over oriented pairs; false when rank-deficient. */
inline bool fit_affine_lsq(const MatchSet& pairs, AffineModel& out)
{
    if (pairs.size() < 3)
        return false;
    double ata[3][3] = {};
    double atbx[3] = {};
    double atby[3] = {};
    for (const MatchPair& p : pairs) {
        const double row[3] = {p.a.x, p.a.y, 1.0};
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j)
                ata[i][j] += row[i] * row[j];
            atbx[i] += row[i] * p.b.x;
            atby[i] += row[i] * p.b.y;
        }
    }
    double rx[3], ry[3];
    if (!solve3(ata, atbx, rx) || !solve3(ata, atby, ry))
        return false;
    out.m[0][0] = rx[0];
    out.m[0][1] = rx[1];
    out.tx = rx[2];
    out.m[1][0] = ry[0];
    out.m[1][1] = ry[1];
    out.ty = ry[2];
    return std::abs(out.det()) > 1e-6;
}

enum class PairFit { None, Forward, Reverse };

/*
 * Matched pairs carry no source/copy order, so a pair agrees with a model
 * when it maps either endpoint onto the other within epsilon.
 */
inline PairFit classify_pair(const AffineModel& model, const MatchPair& p, double epsilon)
{
    const Point fwd = model.apply(p.a);
    const double df = std::hypot(fwd.x - p.b.x, fwd.y - p.b.y);
    if (df <= epsilon)
        return PairFit::Forward;
    const Point rev = model.apply(p.b);
    const double dr = std::hypot(rev.x - p.a.x, rev.y - p.a.y);
    if (dr <= epsilon)
        return PairFit::Reverse;
    return PairFit::None;
}

inline int count_inliers(const AffineModel& model, const MatchSet& pairs, double epsilon)
{
    int count = 0;
    for (const MatchPair& p : pairs)
        if (classify_pair(model, p, epsilon) != PairFit::None)
            ++count;
    return count;
}

inline MatchPair oriented(const MatchPair& p, PairFit fit)
{
    if (fit == PairFit::Reverse) {
        MatchPair q = p;
        std::swap(q.a, q.b);
        return q;
    }
    return p;
}

}  // namespace detail

/*
 * Peels consensus groups off `pairs` until the best remaining model has
 * fewer than `min_inliers` supporters. Each accepted minimal-sample model is
 * refined by a least-squares refit over its inliers when that does not lose
 * consensus. Deterministic for a fixed seed.
 */
inline std::vector<InlierGroup> ransac_iterate(const MatchSet& pairs, const RansacParams& params)
{
    if (params.min_inliers < 3)
        throw std::invalid_argument("ransac_iterate: inlier threshold must be >= 3");
    if (params.epsilon <= 0.0)
        throw std::invalid_argument("ransac_iterate: epsilon must be positive");

    std::vector<InlierGroup> groups;
    MatchSet remaining = pairs;
    std::mt19937 rng(params.seed);

    while (remaining.size() >= 3) {
        AffineModel best_model;
        int best_count = 0;
        const std::size_t n = remaining.size();

        for (int round = 0; round < params.max_rounds; ++round) {
            std::size_t i0 = rng() % n;
            std::size_t i1 = rng() % n;
            std::size_t i2 = rng() % n;
            if (i0 == i1 || i1 == i2 || i0 == i2)
                continue;
            const MatchPair* sample[3] = {&remaining[i0], &remaining[i1], &remaining[i2]};
            AffineModel model;
            if (!detail::fit_affine_3(sample, model))
                continue;
            const int count = detail::count_inliers(model, remaining, params.epsilon);
            if (count > best_count) {
                best_count = count;
                best_model = model;
                if (best_count == static_cast<int>(n))
                    break;
            }
        }
        if (best_count < params.min_inliers)
            break;

        MatchSet inliers;
        inliers.reserve(best_count);
        for (const MatchPair& p : remaining) {
            const auto fit = detail::classify_pair(best_model, p, params.epsilon);
            if (fit != detail::PairFit::None)
                inliers.push_back(detail::oriented(p, fit));
        }

        // refit over the consensus set unless that loses supporters
        AffineModel refined;
        if (detail::fit_affine_lsq(inliers, refined) &&
            detail::count_inliers(refined, inliers, params.epsilon) ==
                static_cast<int>(inliers.size())) {
            best_model = refined;
        }

        MatchSet final_inliers;
        MatchSet next;
        for (const MatchPair& p : remaining) {
            const auto fit = detail::classify_pair(best_model, p, params.epsilon);
            if (fit != detail::PairFit::None)
                final_inliers.push_back(detail::oriented(p, fit));
            else
                next.push_back(p);
        }
        if (static_cast<int>(final_inliers.size()) < params.min_inliers)
            break;
        groups.push_back({best_model, std::move(final_inliers)});
        remaining = std::move(next);
    }
    return groups;
}

/* Spatially filtered pairs grouped by RANSAC, flattened with group indices. */
struct FilteredMatches {
    std::vector<InlierGroup> groups;
    MatchSet pairs;              // union of all group members
    std::vector<int> group_of;   // group index per entry of `pairs`
};

struct GeoFilterParams {
    double spatial_s = 50.0;
    RansacParams ransac;
};

inline FilteredMatches filter_matches(const MatchSet& pairs, const GeoFilterParams& params = {})
{
    FilteredMatches out;
    const MatchSet spaced = spatial_filter(pairs, params.spatial_s);
    out.groups = ransac_iterate(spaced, params.ransac);
    for (std::size_t g = 0; g < out.groups.size(); ++g) {
        for (const MatchPair& p : out.groups[g].pairs) {
            out.pairs.push_back(p);
            out.group_of.push_back(static_cast<int>(g));
        }
    }
    return out;
}

}  // namespace ecdc
