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

#include <random>
#include <set>

#include <gtest/gtest.h>

#include "ecdc/matching.hpp"

using namespace ecdc;

namespace {

Descriptor make_descriptor(std::vector<float> values, double x, double y,
                           KeypointKind kind = KeypointKind::Sift)
{
    Descriptor d;
    d.keypoint.x = x;
    d.keypoint.y = y;
    d.keypoint.scale = 2.0;
    d.keypoint.kind = kind;
    d.vector = std::move(values);
    return d;
}

/* 1-D embedding: descriptor i is the scalar position[i]. */
std::vector<Descriptor> from_positions(const std::vector<float>& positions)
{
    std::vector<Descriptor> out;
    for (std::size_t i = 0; i < positions.size(); ++i)
        out.push_back(make_descriptor({positions[i]}, static_cast<double>(10 * i),
                                      static_cast<double>(5 * i)));
    return out;
}

std::set<std::pair<int, int>> pair_keys(const MatchSet& ms, const std::vector<Descriptor>& set)
{
    // recover indices by matching coordinates
    auto index_of = [&set](const Point& p) {
        for (std::size_t i = 0; i < set.size(); ++i)
            if (set[i].keypoint.x == p.x && set[i].keypoint.y == p.y)
                return static_cast<int>(i);
        return -1;
    };
    std::set<std::pair<int, int>> keys;
    for (const MatchPair& m : ms) {
        int a = index_of(m.a);
        int b = index_of(m.b);
        if (a > b)
            std::swap(a, b);
        keys.insert({a, b});
    }
    return keys;
}

/*
 * Exhaustive oracle: full distance matrix, literal prefix-ratio rule per
 * row, canonical unordered dedup. Independent of the implementation path.
 */
std::set<std::pair<int, int>> g2nn_oracle(const std::vector<Descriptor>& set, double t,
                                          int max_neighbors)
{
    std::set<std::pair<int, int>> keys;
    const int n = static_cast<int>(set.size());
    for (int i = 0; i < n; ++i) {
        std::vector<std::pair<double, int>> row;
        for (int j = 0; j < n; ++j)
            if (j != i)
                row.push_back({descriptor_sq_distance(set[i], set[j]), j});
        std::sort(row.begin(), row.end());
        if (static_cast<int>(row.size()) > max_neighbors)
            row.resize(max_neighbors);
        for (std::size_t j = 0; j + 1 < row.size(); ++j) {
            const double ratio = row[j + 1].first > 0 ? row[j].first / row[j + 1].first : 0.0;
            if (ratio > t)
                break;
            const int other = row[j].second;
            if (set[i].keypoint.x == set[other].keypoint.x &&
                set[i].keypoint.y == set[other].keypoint.y)
                continue;
            keys.insert({std::min(i, other), std::max(i, other)});
        }
    }
    return keys;
}

std::vector<Descriptor> random_descriptors(int n, int dim, std::uint32_t seed)
{
    std::mt19937 rng(seed);
    std::vector<Descriptor> out;
    for (int i = 0; i < n; ++i) {
        std::vector<float> v(dim);
        for (float& x : v)
            x = static_cast<float>(rng() % 1000) / 1000.0f;
        out.push_back(make_descriptor(std::move(v), i * 7.0, i * 3.0));
    }
    return out;
}

}  // namespace

TEST(DistanceRow, OrthonormalBasisExample)
{
    std::vector<Descriptor> set;
    set.push_back(make_descriptor({1, 0}, 0, 0));   // e1
    set.push_back(make_descriptor({0, 1}, 10, 0));  // e2
    set.push_back(make_descriptor({1, 0}, 20, 0));  // duplicate of e1
    const DistanceRow row = distance_row(0, set, 10);
    ASSERT_EQ(row.neighbors.size(), 2u);
    EXPECT_EQ(row.neighbors[0].index, 2);
    EXPECT_DOUBLE_EQ(row.neighbors[0].d2, 0.0);
    EXPECT_DOUBLE_EQ(row.neighbors[1].d2, 2.0);
}

TEST(DistanceRow, FirstEntryIsMinimum)
{
    const auto set = random_descriptors(20, 8, 42);
    for (int i = 0; i < 20; ++i) {
        const DistanceRow row = distance_row(i, set, 10);
        for (std::size_t j = 1; j < row.neighbors.size(); ++j)
            EXPECT_LE(row.neighbors[j - 1].d2, row.neighbors[j].d2);
    }
}

TEST(DistanceRow, MatchesBruteForceSort)
{
    const auto set = random_descriptors(10, 6, 43);
    for (int i = 0; i < 10; ++i) {
        std::vector<double> expect;
        for (int j = 0; j < 10; ++j)
            if (j != i)
                expect.push_back(descriptor_sq_distance(set[i], set[j]));
        std::sort(expect.begin(), expect.end());
        const DistanceRow row = distance_row(i, set, 100);
        ASSERT_EQ(row.neighbors.size(), expect.size());
        for (std::size_t j = 0; j < expect.size(); ++j)
            EXPECT_DOUBLE_EQ(row.neighbors[j].d2, expect[j]);
    }
}

TEST(DistanceRow, RejectsSingletonSet)
{
    std::vector<Descriptor> set;
    set.push_back(make_descriptor({1}, 0, 0));
    EXPECT_THROW(distance_row(0, set, 10), std::invalid_argument);
}

TEST(G2nnMatch, PrefixRuleStopsAtFirstLargeRatio)
{
    // distances from index 0: 1, 4, 9, 10.1 -> ratios 0.25, 0.444, 0.891
    const auto set = from_positions({0.0f, 1.0f, 2.0f, 3.0f, 3.17805f});
    const auto keys = pair_keys(g2nn_match(set, 0.6), set);
    EXPECT_TRUE(keys.count({0, 1}));
    EXPECT_TRUE(keys.count({0, 2}));
    EXPECT_FALSE(keys.count({0, 3}));
    EXPECT_FALSE(keys.count({0, 4}));
}

TEST(G2nnMatch, NoMatchWhenFirstRatioExceedsThreshold)
{
    // distances from index 0: 4, 5 -> first ratio 0.8 > 0.6, so index 0
    // matches nothing (the 1-2 pair is that row's own business)
    const auto set = from_positions({0.0f, 2.0f, 2.23607f});
    const auto keys = pair_keys(g2nn_match(set, 0.6), set);
    EXPECT_FALSE(keys.count({0, 1}));
    EXPECT_FALSE(keys.count({0, 2}));
}

TEST(G2nnMatch, IdenticalTripleMatchesPairwise)
{
    std::vector<Descriptor> set;
    set.push_back(make_descriptor({1, 0}, 0, 0));
    set.push_back(make_descriptor({1, 0}, 60, 0));
    set.push_back(make_descriptor({1, 0}, 0, 60));
    set.push_back(make_descriptor({0, 10}, 90, 90));
    const auto keys = pair_keys(g2nn_match(set, 0.6), set);
    EXPECT_TRUE(keys.count({0, 1}));
    EXPECT_TRUE(keys.count({0, 2}));
    EXPECT_TRUE(keys.count({1, 2}));
    EXPECT_FALSE(keys.count({0, 3}));
    EXPECT_FALSE(keys.count({1, 3}));
    EXPECT_FALSE(keys.count({2, 3}));
}

TEST(G2nnMatch, EqualsExhaustiveOracleOnRandomSets)
{
    std::mt19937 rng(7);
    for (int trial = 0; trial < 40; ++trial) {
        const int n = 4 + static_cast<int>(rng() % 9);  // up to 12
        const auto set = random_descriptors(n, 5, rng());
        const double t = 0.2 + 0.15 * (trial % 5);
        const auto got = pair_keys(g2nn_match(set, t), set);
        const auto expect = g2nn_oracle(set, t, kDefaultMaxNeighbors);
        EXPECT_EQ(got, expect) << "trial " << trial << " n=" << n << " t=" << t;
    }
}

TEST(G2nnMatch, MonotoneInThreshold)
{
    std::mt19937 rng(8);
    for (int trial = 0; trial < 20; ++trial) {
        const auto set = random_descriptors(10, 4, rng());
        const auto small = pair_keys(g2nn_match(set, 0.3), set);
        const auto large = pair_keys(g2nn_match(set, 0.7), set);
        for (const auto& k : small)
            EXPECT_TRUE(large.count(k));
    }
}

TEST(G2nnMatch, NoSelfMatchesNoDuplicates)
{
    const auto set = random_descriptors(15, 4, 9);
    const MatchSet ms = g2nn_match(set, 0.8);
    std::set<std::pair<std::pair<double, double>, std::pair<double, double>>> seen;
    for (const MatchPair& m : ms) {
        EXPECT_FALSE(m.a.x == m.b.x && m.a.y == m.b.y);
        const std::pair<double, double> pa{m.a.x, m.a.y};
        const std::pair<double, double> pb{m.b.x, m.b.y};
        const auto key = pa < pb ? std::make_pair(pa, pb) : std::make_pair(pb, pa);
        EXPECT_TRUE(seen.insert(key).second);
    }
}

TEST(G2nnMatch, RejectsBadThreshold)
{
    const auto set = random_descriptors(5, 3, 10);
    EXPECT_THROW(g2nn_match(set, 0.0), std::invalid_argument);
    EXPECT_THROW(g2nn_match(set, 1.0), std::invalid_argument);
}

TEST(MatchBoth, EmptyLpsdLeavesSiftMatchesOnly)
{
    std::vector<Descriptor> sift;
    sift.push_back(make_descriptor({1, 0}, 0, 0));
    sift.push_back(make_descriptor({1, 0}, 80, 0));
    sift.push_back(make_descriptor({0, 5}, 40, 90));
    const MatchSet both = match_both(sift, {});
    const MatchSet alone = g2nn_match(sift, 0.6);
    ASSERT_EQ(both.size(), alone.size());
    for (std::size_t i = 0; i < both.size(); ++i) {
        EXPECT_EQ(both[i].a.x, alone[i].a.x);
        EXPECT_EQ(both[i].kind, KeypointKind::Sift);
    }
}

TEST(MatchBoth, UnionIsSupersetOfEachFamily)
{
    std::vector<Descriptor> sift;
    sift.push_back(make_descriptor({1, 0}, 0, 0));
    sift.push_back(make_descriptor({1, 0}, 80, 0));
    sift.push_back(make_descriptor({0, 5}, 40, 90));
    std::vector<Descriptor> lpsd;
    lpsd.push_back(make_descriptor({0, 1, 0}, 10, 10, KeypointKind::Lpsd));
    lpsd.push_back(make_descriptor({0, 1, 0}, 90, 10, KeypointKind::Lpsd));
    lpsd.push_back(make_descriptor({7, 0, 0}, 50, 99, KeypointKind::Lpsd));

    const MatchSet both = match_both(sift, lpsd);
    const std::size_t sift_n = g2nn_match(sift, 0.6).size();
    const std::size_t lpsd_n = g2nn_match(lpsd, 0.1).size();
    EXPECT_EQ(both.size(), sift_n + lpsd_n);
    EXPECT_GE(both.size(), sift_n);
    EXPECT_GE(both.size(), lpsd_n);

    int lpsd_tagged = 0;
    for (const MatchPair& m : both)
        lpsd_tagged += m.kind == KeypointKind::Lpsd;
    EXPECT_EQ(static_cast<std::size_t>(lpsd_tagged), lpsd_n);
}
