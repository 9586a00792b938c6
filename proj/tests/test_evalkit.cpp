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

#include <fstream>

#include <gtest/gtest.h>

#include "ecdc/evalkit.hpp"
#include "testutil.hpp"

using namespace ecdc;

namespace {

CoverageMask mask_with(int w, int h, const std::vector<std::pair<int, int>>& on)
{
    CoverageMask m(w, h, false);
    for (const auto& [x, y] : on)
        m.set(x, y, true);
    return m;
}

}  // namespace

TEST(PixelScore, ArithmeticExample)
{
    CoverageMask truth(20, 10, false);
    CoverageMask pred(20, 10, false);
    // tp = 90, fn = 10, fp = 10
    int placed = 0;
    for (int y = 0; y < 10 && placed < 100; ++y)
        for (int x = 0; x < 10 && placed < 100; ++x, ++placed)
            truth.set(x, y, true);
    placed = 0;
    for (int y = 0; y < 10 && placed < 90; ++y)
        for (int x = 0; x < 10 && placed < 90; ++x, ++placed)
            pred.set(x, y, true);
    for (int x = 10; x < 20; ++x)
        pred.set(x, 0, true);

    const EvalReport rep = pixel_score(pred, truth);
    EXPECT_EQ(rep.counts.tp, 90);
    EXPECT_EQ(rep.counts.fp, 10);
    EXPECT_EQ(rep.counts.fn, 10);
    EXPECT_DOUBLE_EQ(rep.p, 0.9);
    EXPECT_DOUBLE_EQ(rep.r, 0.9);
    EXPECT_DOUBLE_EQ(rep.f1, 0.9);
}

TEST(PixelScore, PerfectAndEmptyConventions)
{
    const CoverageMask m = mask_with(8, 8, {{1, 1}, {2, 3}, {4, 4}});
    const EvalReport perfect = pixel_score(m, m);
    EXPECT_DOUBLE_EQ(perfect.p, 1.0);
    EXPECT_DOUBLE_EQ(perfect.r, 1.0);
    EXPECT_DOUBLE_EQ(perfect.f1, 1.0);

    const CoverageMask empty(8, 8, false);
    const EvalReport miss = pixel_score(empty, m);
    EXPECT_DOUBLE_EQ(miss.p, 0.0);
    EXPECT_DOUBLE_EQ(miss.r, 0.0);
    EXPECT_DOUBLE_EQ(miss.f1, 0.0);
    EXPECT_FALSE(miss.notes.empty());

    EXPECT_THROW(pixel_score(CoverageMask(4, 4), m), std::invalid_argument);
}

TEST(PixelScore, SwapSymmetryAndConservation)
{
    std::mt19937 rng(17);
    CoverageMask a(32, 32, false), b(32, 32, false);
    for (int i = 0; i < 200; ++i) {
        a.set(rng() % 32, rng() % 32, true);
        b.set(rng() % 32, rng() % 32, true);
    }
    const EvalReport ab = pixel_score(a, b);
    const EvalReport ba = pixel_score(b, a);
    EXPECT_EQ(ab.counts.tp, ba.counts.tp);
    EXPECT_EQ(ab.counts.fp, ba.counts.fn);
    EXPECT_EQ(ab.counts.fn, ba.counts.fp);
    EXPECT_DOUBLE_EQ(ab.p, ba.r);
    EXPECT_DOUBLE_EQ(ab.r, ba.p);
    EXPECT_EQ(ab.counts.tp + ab.counts.fn, static_cast<long long>(b.count()));
    EXPECT_EQ(ab.counts.tp + ab.counts.fp, static_cast<long long>(a.count()));
}

TEST(ImageScore, OneFalseAlarmAmongNinetySix)
{
    // 48 forged all detected, one of 48 originals falsely flagged
    std::vector<std::pair<bool, bool>> decisions;
    for (int i = 0; i < 48; ++i)
        decisions.push_back({true, true});
    decisions.push_back({true, false});
    for (int i = 0; i < 47; ++i)
        decisions.push_back({false, false});

    const EvalReport rep = image_score(decisions);
    EXPECT_EQ(rep.counts.tp, 48);
    EXPECT_EQ(rep.counts.fp, 1);
    EXPECT_EQ(rep.counts.fn, 0);
    EXPECT_NEAR(rep.p * 100.0, 97.96, 0.005);
    EXPECT_NEAR(rep.r * 100.0, 100.00, 0.005);
    EXPECT_NEAR(rep.f1 * 100.0, 98.97, 0.005);
}

TEST(ImageScore, AllCorrectAndDegenerateConvention)
{
    const EvalReport all = image_score({{true, true}, {false, false}, {true, true}});
    EXPECT_DOUBLE_EQ(all.p, 1.0);
    EXPECT_DOUBLE_EQ(all.r, 1.0);
    EXPECT_DOUBLE_EQ(all.f1, 1.0);

    const EvalReport none = image_score({{false, false}, {false, false}});
    EXPECT_DOUBLE_EQ(none.p, 1.0);
    EXPECT_DOUBLE_EQ(none.f1, 1.0);
    EXPECT_FALSE(none.notes.empty());

    EXPECT_THROW(image_score({}), std::invalid_argument);
}

TEST(RenderTricolor, ColorConvention)
{
    const GrayImage base(4, 4, 128.0f);
    const CoverageMask pred = mask_with(4, 4, {{0, 0}, {1, 0}});
    const CoverageMask truth = mask_with(4, 4, {{1, 0}, {2, 0}});
    const RgbImage img = render_tricolor(pred, truth, base);
    EXPECT_EQ(img.px(1, 0)[1], 200);  // hit: green
    EXPECT_EQ(img.px(0, 0)[0], 220);  // false alarm: red
    EXPECT_EQ(img.px(2, 0)[0], 255);  // miss: white
    EXPECT_EQ(img.px(3, 3)[0], 128);  // background: base luminance
    EXPECT_THROW(render_tricolor(pred, truth, GrayImage(3, 3, 0.0f)), std::invalid_argument);

    const RgbImage perfect = render_tricolor(truth, truth, base);
    for (int x = 0; x < 4; ++x)
        EXPECT_NE(perfect.px(x, 0)[0], 255);  // no white when pred == truth

    const CoverageMask empty(4, 4, false);
    const RgbImage misses = render_tricolor(empty, truth, base);
    EXPECT_EQ(misses.px(1, 0)[0], 255);
    EXPECT_EQ(misses.px(2, 0)[0], 255);
}

TEST(BatchEvaluate, PerfectStubScoresOne)
{
    testutil::TempDir tmp("batch");
    const GrayImage base = testutil::make_texture(384, 384, 101);
    const auto manifest_path = write_suite(base, Scenario::NoiseGlobal, tmp.path());
    const Manifest manifest = read_manifest(manifest_path);
    ASSERT_EQ(manifest.cases.size(), 5u);

    // perfect detector: returns the stored ground truth
    DetectorFn stub = [](const GrayImage&, const std::filesystem::path& dir) {
        return load_mask_png((dir / "truth.png").string());
    };
    const BatchReport rep = batch_evaluate(manifest, stub);
    EXPECT_EQ(rep.errored_cases, 0);
    EXPECT_DOUBLE_EQ(rep.mean_f1, 1.0);
    EXPECT_DOUBLE_EQ(rep.aggregate.f1, 1.0);
    ASSERT_EQ(rep.curves.size(), 5u);
    for (const CurveRow& row : rep.curves)
        EXPECT_DOUBLE_EQ(row.mean_f1, 1.0);
}

TEST(BatchEvaluate, UnreadableCaseIsRecordedNotFatal)
{
    testutil::TempDir tmp("batcherr");
    const GrayImage base = testutil::make_texture(384, 384, 102);
    const auto manifest_path = write_suite(base, Scenario::Downsample, tmp.path());
    // break one case
    const Manifest manifest = read_manifest(manifest_path);
    std::filesystem::remove(manifest.cases[2].dir / "forged.png");

    DetectorFn stub = [](const GrayImage&, const std::filesystem::path& dir) {
        return load_mask_png((dir / "truth.png").string());
    };
    const BatchReport rep = batch_evaluate(manifest, stub);
    EXPECT_EQ(rep.errored_cases, 1);
    int with_error = 0;
    for (const EvalCaseResult& c : rep.aggregate.cases)
        with_error += !c.error.empty();
    EXPECT_EQ(with_error, 1);
    EXPECT_EQ(rep.curves.size(), 4u);  // errored case keeps no curve point
}

TEST(BatchEvaluate, RotSuiteGivesOneCurveRowPerAngle)
{
    testutil::TempDir tmp("rotsuite");
    const GrayImage base = testutil::make_texture(448, 448, 103);
    const auto manifest_path = write_suite(base, Scenario::Rot, tmp.path());
    const Manifest manifest = read_manifest(manifest_path);

    DetectorFn stub = [](const GrayImage& img, const std::filesystem::path&) {
        return CoverageMask(img.width, img.height, true);
    };
    const BatchReport rep = batch_evaluate(manifest, stub);
    ASSERT_EQ(rep.curves.size(), 8u);
    const double angles[8] = {2, 4, 6, 8, 10, 20, 60, 180};
    for (int i = 0; i < 8; ++i) {
        EXPECT_EQ(rep.curves[i].kind, "rotate");
        EXPECT_DOUBLE_EQ(rep.curves[i].amount, angles[i]);
        EXPECT_DOUBLE_EQ(rep.curves[i].mean_r, 1.0);  // all-true mask recalls everything
    }
}

TEST(BatchEvaluate, ReportAndCurvesFilesWellFormed)
{
    testutil::TempDir tmp("reports");
    const GrayImage base = testutil::make_texture(384, 384, 104);
    const auto manifest_path = write_suite(base, Scenario::Plain, tmp.path());
    DetectorFn stub = [](const GrayImage&, const std::filesystem::path& dir) {
        return load_mask_png((dir / "truth.png").string());
    };
    const BatchReport rep = batch_evaluate(read_manifest(manifest_path), stub);
    const auto report_path = tmp.path() / "report.json";
    const auto curves_path = tmp.path() / "curves.csv";
    write_report_json(report_path, rep);
    write_curves_csv(curves_path, rep);

    std::ifstream in(report_path);
    nlohmann::json j;
    in >> j;
    EXPECT_EQ(j["level"], "pixel");
    EXPECT_TRUE(j.contains("tp"));
    EXPECT_TRUE(j.contains("p"));
    ASSERT_EQ(j["cases"].size(), 1u);
    EXPECT_TRUE(j["cases"][0].contains("f1"));

    std::ifstream csv(curves_path);
    std::string header;
    std::getline(csv, header);
    EXPECT_EQ(header, "attack_param,mean_p,mean_r,mean_f1");
    std::string row;
    EXPECT_TRUE(static_cast<bool>(std::getline(csv, row)));
}
