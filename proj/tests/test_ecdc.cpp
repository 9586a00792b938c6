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

#include <gtest/gtest.h>

#include "ecdc/ecdc.hpp"
#include "ecdc/forgerylab.hpp"
#include "testutil.hpp"

using namespace ecdc;

namespace {

MatchPair pair_at(double ax, double ay, double bx, double by)
{
    MatchPair p;
    p.a = {ax, ay};
    p.b = {bx, by};
    return p;
}

/* Independent painter: bounding-box scan with the norm test. */
CoverageMask paint_oracle(int w, int h, const std::vector<std::pair<Point, double>>& disks)
{
    CoverageMask mask(w, h, false);
    for (const auto& [c, r] : disks) {
        for (int py = 0; py < h; ++py) {
            for (int px = 0; px < w; ++px) {
                const double dx = px - c.x;
                const double dy = py - c.y;
                if (dx * dx + dy * dy <= r * r)
                    mask.set(px, py, true);
            }
        }
    }
    return mask;
}

/* Base with a duplicated patch; background halves differ in brightness. */
struct DuplicateScene {
    GrayImage img;
    Rect src;
    Rect dst;
};

DuplicateScene make_duplicate_scene(int size, int patch, std::uint32_t seed)
{
    DuplicateScene scene;
    scene.img = testutil::make_texture(size, size, seed);
    // darken the left half and brighten the right so domains crossing a
    // patch edge see clearly different statistics; the copy lands fully in
    // the bright half while the source sits in the dark one
    for (int y = 0; y < size; ++y)
        for (int x = 0; x < size; ++x) {
            float& v = scene.img.at(x, y);
            v = x < size / 2 ? v * 0.5f : std::min(255.0f, v * 0.9f + 60.0f);
        }
    const int margin = size / 8;
    const int dst_xy = std::max(size / 2 + 8, size - margin - patch);
    if (dst_xy + patch + 8 > size)
        throw std::invalid_argument("scene patch too large");
    scene.src = {margin, margin, patch, patch};
    scene.dst = {dst_xy, dst_xy, patch, patch};
    for (int i = 0; i < patch; ++i)
        for (int j = 0; j < patch; ++j)
            scene.img.at(scene.dst.x + j, scene.dst.y + i) =
                scene.img.at(scene.src.x + j, scene.src.y + i);
    return scene;
}

}  // namespace

TEST(RadiusSchedule, DefaultsGiveNineteenRadii)
{
    const RadiusSchedule s = radius_schedule();
    ASSERT_EQ(s.radii.size(), 19u);
    EXPECT_DOUBLE_EQ(s.radii.front(), 1.5);
    EXPECT_DOUBLE_EQ(s.radii.back(), 37.5);
    for (std::size_t i = 1; i < s.radii.size(); ++i)
        EXPECT_DOUBLE_EQ(s.radii[i] - s.radii[i - 1], 2.0);
}

TEST(RadiusSchedule, DegenerateAndOvershootCases)
{
    const RadiusSchedule single = radius_schedule(5.0, 5.0, 2.0);
    ASSERT_EQ(single.radii.size(), 1u);
    EXPECT_DOUBLE_EQ(single.radii[0], 5.0);

    const RadiusSchedule overshoot = radius_schedule(1.0, 2.0, 2.0);
    ASSERT_EQ(overshoot.radii.size(), 1u);
    EXPECT_DOUBLE_EQ(overshoot.radii[0], 1.0);

    EXPECT_THROW(radius_schedule(5.0, 1.0, 2.0), std::invalid_argument);
    EXPECT_THROW(radius_schedule(0.0, 5.0, 2.0), std::invalid_argument);
    EXPECT_THROW(radius_schedule(1.0, 5.0, 0.0), std::invalid_argument);
}

TEST(GrowPair, DeepInsideDuplicateReachesMaxRadius)
{
    const DuplicateScene scene = make_duplicate_scene(512, 200, 71);
    // endpoints centered in the duplicate; the 37.5 px disk stays inside
    const double ax = scene.src.x + 100.0;
    const double ay = scene.src.y + 100.0;
    const double bx = scene.dst.x + 100.0;
    const double by = scene.dst.y + 100.0;
    const RadiusSchedule sched = radius_schedule();
    for (FeatureMode mode : {FeatureMode::Dct, FeatureMode::Pcet}) {
        BlockFeatParams params;
        params.mode = mode;
        const auto r = grow_pair(scene.img, pair_at(ax, ay, bx, by), sched, params);
        ASSERT_TRUE(r.has_value());
        EXPECT_DOUBLE_EQ(*r, 37.5);
    }
}

TEST(GrowPair, StopsNearDuplicateEdge)
{
    const DuplicateScene scene = make_duplicate_scene(512, 200, 72);
    // endpoints 10 px from the left edge of each copy
    const double ax = scene.src.x + 10.0;
    const double ay = scene.src.y + 100.0;
    const double bx = scene.dst.x + 10.0;
    const double by = scene.dst.y + 100.0;
    const RadiusSchedule sched = radius_schedule();
    const auto r = grow_pair(scene.img, pair_at(ax, ay, bx, by), sched, {});
    ASSERT_TRUE(r.has_value());
    EXPECT_LT(*r, 37.5);
    EXPECT_GE(*r, 10.0 - 2.0);   // covers up to the edge, within one step
    EXPECT_LE(*r, 10.0 + 2.0);
}

TEST(GrowPair, UnrelatedEndpointsFailEarly)
{
    const DuplicateScene scene = make_duplicate_scene(512, 200, 73);
    // darkest-half point paired with brightest-half point, both far from
    // the planted duplicate
    const auto r = grow_pair(scene.img, pair_at(80.0, 420.0, 430.0, 80.0), radius_schedule(), {});
    if (r.has_value())
        EXPECT_LE(*r, 1.5 + 2.0);  // none or the first radius only
}

TEST(GrowPair, DeterministicAcrossCalls)
{
    const DuplicateScene scene = make_duplicate_scene(384, 140, 74);
    const MatchPair p =
        pair_at(scene.src.x + 30.0, scene.src.y + 70.0, scene.dst.x + 30.0, scene.dst.y + 70.0);
    const auto a = grow_pair(scene.img, p, radius_schedule(), {});
    const auto b = grow_pair(scene.img, p, radius_schedule(), {});
    ASSERT_EQ(a.has_value(), b.has_value());
    if (a)
        EXPECT_DOUBLE_EQ(*a, *b);
}

TEST(Cover, EmptyMatchSetGivesEmptyMask)
{
    const GrayImage img = testutil::make_texture(128, 128, 75);
    const CoverageMask mask = cover(img, {}, radius_schedule(), {});
    EXPECT_EQ(mask.count(), 0u);
}

TEST(Cover, SinglePairPaintsTwoSmallDisks)
{
    // two identical 5x5 islands on contrasting backgrounds; features match
    // at r=1.5 but diverge at 3.5
    GrayImage img(128, 128, 0.0f);
    for (int y = 0; y < 128; ++y)
        for (int x = 0; x < 128; ++x)
            img.at(x, y) = x < 64 ? 30.0f : 200.0f;
    auto put_island = [&img](int cx, int cy) {
        for (int dy = -2; dy <= 2; ++dy)
            for (int dx = -2; dx <= 2; ++dx)
                img.at(cx + dx, cy + dy) =
                    static_cast<float>(100 + 20 * dx + 10 * dy);
    };
    put_island(32, 64);
    put_island(96, 64);

    const CoverageMask mask =
        cover(img, {pair_at(32, 64, 96, 64)}, radius_schedule(1.5, 37.5, 2.0), {});
    const CoverageMask expect =
        paint_oracle(128, 128, {{{32, 64}, 1.5}, {{96, 64}, 1.5}});
    EXPECT_EQ(mask, expect);
    EXPECT_EQ(mask.count(), 18u);  // two 9-pixel disks
}

TEST(Cover, MatchesIndependentPainterOracle)
{
    const DuplicateScene scene = make_duplicate_scene(384, 160, 76);
    std::mt19937 rng(77);
    for (int trial = 0; trial < 8; ++trial) {
        MatchSet matches;
        const int n = 1 + static_cast<int>(rng() % 6);
        for (int i = 0; i < n; ++i) {
            const double ox = 20.0 + rng() % 120;
            const double oy = 20.0 + rng() % 120;
            matches.push_back(pair_at(scene.src.x + ox, scene.src.y + oy, scene.dst.x + ox,
                                      scene.dst.y + oy));
        }
        const RadiusSchedule sched = radius_schedule();
        const CoverageMask mask = cover(scene.img, matches, sched, {});

        std::vector<std::pair<Point, double>> disks;
        for (const MatchPair& m : matches) {
            const auto r = grow_pair(scene.img, m, sched, {});
            if (r) {
                disks.push_back({m.a, *r});
                disks.push_back({m.b, *r});
            }
        }
        const CoverageMask expect = paint_oracle(384, 384, disks);
        EXPECT_EQ(mask, expect) << "trial " << trial;
    }
}

TEST(Cover, EnlargingMaxRadiusNeverShrinksMask)
{
    const DuplicateScene scene = make_duplicate_scene(384, 160, 78);
    MatchSet matches;
    for (int i = 0; i < 4; ++i)
        matches.push_back(pair_at(scene.src.x + 40.0 + 20.0 * i, scene.src.y + 80.0,
                                  scene.dst.x + 40.0 + 20.0 * i, scene.dst.y + 80.0));
    const CoverageMask small = cover(scene.img, matches, radius_schedule(1.5, 17.5, 2.0), {});
    const CoverageMask large = cover(scene.img, matches, radius_schedule(1.5, 37.5, 2.0), {});
    for (std::size_t i = 0; i < small.data.size(); ++i)
        if (small.data[i])
            EXPECT_TRUE(large.data[i]);
}

TEST(MorphRefine, FillsInteriorHole)
{
    CoverageMask mask(64, 64, false);
    paint_disk(mask, 32, 32, 10.0);
    mask.set(32, 32, false);
    const CoverageMask closed = morph_refine(mask, 3);
    EXPECT_TRUE(closed.at(32, 32));
    EXPECT_EQ(closed.width, 64);
    EXPECT_EQ(closed.height, 64);
}

TEST(MorphRefine, EmptyStaysEmpty)
{
    const CoverageMask mask(48, 32, false);
    EXPECT_EQ(morph_refine(mask, 4).count(), 0u);
}

TEST(MorphRefine, BridgesNearbyDisks)
{
    CoverageMask mask(96, 96, false);
    paint_disk(mask, 40, 48, 6.0);
    paint_disk(mask, 54, 48, 6.0);  // 2 px gap between the disks
    const CoverageMask closed = morph_refine(mask, 3);
    // the midpoint of the gap is filled
    EXPECT_TRUE(closed.at(47, 48));
}

TEST(MorphRefine, ExtensiveAndIdempotent)
{
    std::mt19937 rng(79);
    CoverageMask mask(80, 80, false);
    for (int i = 0; i < 12; ++i)
        paint_disk(mask, rng() % 80, rng() % 80, 1.0 + rng() % 6);
    const CoverageMask once = morph_refine(mask, 3);
    const CoverageMask twice = morph_refine(once, 3);
    for (std::size_t i = 0; i < mask.data.size(); ++i)
        if (mask.data[i])
            EXPECT_TRUE(once.data[i]);  // closing never removes input pixels
    EXPECT_EQ(once, twice);
}

TEST(Detect, PristineImageStaysAlmostEmpty)
{
    const GrayImage img = testutil::make_texture(384, 384, 80);
    const CoverageMask mask = detect(img);
    EXPECT_LT(mask.count(), 0.005 * img.size());
}

TEST(Detect, PlainCopyMoveIsLocalized)
{
    // 128 px textured fragment cloned within a 512 px image
    const GrayImage base = testutil::make_texture(512, 512, 81);
    const ForgeryCase fc =
        synthesize(base, {48, 48, 128, 128}, 336, 336, {AttackKind::None, 0.0}, 5);
    const CoverageMask mask = detect(fc.forged);
    const auto rep_tp = [&] {
        long long tp = 0, fp = 0, fn = 0;
        for (std::size_t i = 0; i < mask.data.size(); ++i) {
            const bool p = mask.data[i] != 0;
            const bool t = fc.truth.data[i] != 0;
            tp += p && t;
            fp += p && !t;
            fn += !p && t;
        }
        const double prec = tp + fp > 0 ? double(tp) / (tp + fp) : 0.0;
        const double rec = tp + fn > 0 ? double(tp) / (tp + fn) : 0.0;
        return prec + rec > 0 ? 2 * prec * rec / (prec + rec) : 0.0;
    }();
    EXPECT_GE(rep_tp, 0.7);
}

TEST(Detect, RotatedCopyStillOverlapsTruth)
{
    const GrayImage base = testutil::make_texture(448, 448, 82);
    const ForgeryCase fc =
        synthesize(base, {48, 48, 112, 112}, 280, 280, {AttackKind::Rotate, 10.0}, 6);
    const CoverageMask mask = detect(fc.forged);
    long long tp = 0, truth_n = 0;
    for (std::size_t i = 0; i < mask.data.size(); ++i) {
        tp += mask.data[i] && fc.truth.data[i];
        truth_n += fc.truth.data[i] != 0;
    }
    EXPECT_GE(static_cast<double>(tp) / truth_n, 0.5);
}
