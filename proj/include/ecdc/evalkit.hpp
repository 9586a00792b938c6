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
 * Precision/recall/F1 scoring at pixel and image level, the tri-color
 * result map (green = hit, red = false alarm, white = miss), and batch
 * evaluation of synthesized suites with per-attack-parameter curves.
 */

#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "ecdc/forgerylab.hpp"
#include "ecdc/image_io.hpp"
#include "ecdc/mask.hpp"
#include "ecdc/parallel.hpp"

namespace ecdc {

struct PixelCounts {
    long long tp = 0;
    long long fp = 0;
    long long fn = 0;
};

enum class EvalLevel { Pixel, Image };

struct EvalCaseResult {
    std::string id;
    double p = 0.0;
    double r = 0.0;
    double f1 = 0.0;
    std::string error;  // empty when the case was scored
};

struct EvalReport {
    EvalLevel level = EvalLevel::Pixel;
    PixelCounts counts;
    double p = 0.0;
    double r = 0.0;
    double f1 = 0.0;
    std::vector<EvalCaseResult> cases;
    std::vector<std::string> notes;  // degenerate-count conventions that fired
};

namespace detail {

/* p, r, F1 from counts with the documented 0/0 conventions. */
inline void fill_metrics(EvalReport& rep)
{
    const auto& c = rep.counts;
    if (c.tp + c.fp + c.fn == 0) {
        // nothing positive anywhere: vacuously perfect, flagged
        rep.p = rep.r = rep.f1 = 1.0;
        rep.notes.push_back("no positives in prediction or truth; metrics set to 1 by convention");
        return;
    }
    rep.p = (c.tp + c.fp) > 0 ? static_cast<double>(c.tp) / (c.tp + c.fp) : 0.0;
    rep.r = (c.tp + c.fn) > 0 ? static_cast<double>(c.tp) / (c.tp + c.fn) : 0.0;
    rep.f1 = (rep.p + rep.r) > 0.0 ? 2.0 * rep.p * rep.r / (rep.p + rep.r) : 0.0;
    if ((c.tp + c.fp) == 0)
        rep.notes.push_back("empty prediction; precision set to 0 by convention");
    if ((c.tp + c.fn) == 0)
        rep.notes.push_back("empty truth; recall set to 0 by convention");
}

}  // namespace detail

inline EvalReport pixel_score(const CoverageMask& pred, const CoverageMask& truth)
{
    if (pred.width != truth.width || pred.height != truth.height)
        throw std::invalid_argument("pixel_score: mask dimensions differ");
    EvalReport rep;
    rep.level = EvalLevel::Pixel;
    for (std::size_t i = 0; i < pred.data.size(); ++i) {
        const bool p = pred.data[i] != 0;
        const bool t = truth.data[i] != 0;
        rep.counts.tp += p && t;
        rep.counts.fp += p && !t;
        rep.counts.fn += !p && t;
    }
    detail::fill_metrics(rep);
    return rep;
}

/* Each entry is (predicted forged, actually forged) for one image. */
inline EvalReport image_score(const std::vector<std::pair<bool, bool>>& decisions)
{
    if (decisions.empty())
        throw std::invalid_argument("image_score: empty decision list");
    EvalReport rep;
    rep.level = EvalLevel::Image;
    for (const auto& [predicted, actual] : decisions) {
        rep.counts.tp += predicted && actual;
        rep.counts.fp += predicted && !actual;
        rep.counts.fn += !predicted && actual;
    }
    detail::fill_metrics(rep);
    return rep;
}

/*
 * Fig-7 style overlay: green = detected forged pixels, red = false alarms,
 * white = missed ground truth, base luminance elsewhere.
 */
inline RgbImage render_tricolor(const CoverageMask& pred, const CoverageMask& truth,
                                const GrayImage& base)
{
    if (pred.width != truth.width || pred.height != truth.height || pred.width != base.width ||
        pred.height != base.height)
        throw std::invalid_argument("render_tricolor: dimensions differ");
    RgbImage out(base.width, base.height);
    for (int y = 0; y < base.height; ++y) {
        for (int x = 0; x < base.width; ++x) {
            std::uint8_t* px = out.px(x, y);
            const bool p = pred.at(x, y);
            const bool t = truth.at(x, y);
            if (p && t) {
                px[0] = 0; px[1] = 200; px[2] = 0;
            } else if (p) {
                px[0] = 220; px[1] = 0; px[2] = 0;
            } else if (t) {
                px[0] = 255; px[1] = 255; px[2] = 255;
            } else {
                const auto g = static_cast<std::uint8_t>(
                    std::clamp(std::lround(base.at(x, y)), 0L, 255L));
                px[0] = px[1] = px[2] = g;
            }
        }
    }
    return out;
}

/* Detected pixels tinted red over the source image. */
inline RgbImage render_overlay(const CoverageMask& pred, const GrayImage& base)
{
    if (pred.width != base.width || pred.height != base.height)
        throw std::invalid_argument("render_overlay: dimensions differ");
    RgbImage out(base.width, base.height);
    for (int y = 0; y < base.height; ++y) {
        for (int x = 0; x < base.width; ++x) {
            std::uint8_t* px = out.px(x, y);
            const auto g =
                static_cast<std::uint8_t>(std::clamp(std::lround(base.at(x, y)), 0L, 255L));
            if (pred.at(x, y)) {
                px[0] = static_cast<std::uint8_t>(std::min(255, g / 2 + 128));
                px[1] = g / 4;
                px[2] = g / 4;
            } else {
                px[0] = px[1] = px[2] = g;
            }
        }
    }
    return out;
}

/* One curve point: mean per-case metrics at a single attack parameter. */
struct CurveRow {
    std::string kind;
    double amount = 0.0;
    double mean_p = 0.0;
    double mean_r = 0.0;
    double mean_f1 = 0.0;
    int cases = 0;
};

struct BatchReport {
    EvalReport aggregate;  // micro-averaged over summed pixel counts
    double mean_p = 0.0;   // macro means over scored cases
    double mean_r = 0.0;
    double mean_f1 = 0.0;
    std::vector<CurveRow> curves;
    int errored_cases = 0;
};

/* Case detector hook: maps the forged image (and its directory) to a mask. */
using DetectorFn =
    std::function<CoverageMask(const GrayImage& forged, const std::filesystem::path& case_dir)>;

struct ManifestCase {
    std::string id;
    std::filesystem::path dir;
    std::string kind;
    double amount = 0.0;
};

struct Manifest {
    std::string suite;
    std::vector<ManifestCase> cases;
};

inline Manifest read_manifest(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw DecodeError("cannot open manifest: " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw DecodeError("manifest parse error: " + path.string() + ": " + e.what());
    }
    Manifest m;
    m.suite = j.value("suite", "");
    const auto base_dir = path.parent_path();
    for (const auto& c : j.value("cases", nlohmann::json::array())) {
        ManifestCase mc;
        mc.id = c.value("id", "");
        mc.dir = base_dir / c.value("dir", "");
        mc.kind = c.value("kind", "none");
        mc.amount = c.value("amount", 0.0);
        m.cases.push_back(std::move(mc));
    }
    return m;
}

/*
 * Scores every manifest case with the given detector, `jobs` cases at a
 * time. Unreadable cases are recorded as errors and the run continues.
 * Curves aggregate macro means per (kind, amount) bucket, sorted by amount.
 */
inline BatchReport batch_evaluate(const Manifest& manifest, const DetectorFn& detector,
                                  int jobs = 1)
{
    BatchReport report;
    report.aggregate.level = EvalLevel::Pixel;

    std::vector<EvalCaseResult> results(manifest.cases.size());
    std::vector<PixelCounts> case_counts(manifest.cases.size());
    parallel_for(
        manifest.cases.size(),
        [&](std::size_t i) {
            const ManifestCase& mc = manifest.cases[i];
            EvalCaseResult res;
            res.id = mc.id;
            try {
                const GrayImage forged = load_grayscale((mc.dir / "forged.png").string());
                const CoverageMask truth = load_mask_png((mc.dir / "truth.png").string());
                const CoverageMask pred = detector(forged, mc.dir);
                const EvalReport rep = pixel_score(pred, truth);
                res.p = rep.p;
                res.r = rep.r;
                res.f1 = rep.f1;
                case_counts[i] = rep.counts;
            } catch (const std::exception& e) {
                res.error = e.what();
            }
            results[i] = std::move(res);
        },
        jobs);

    std::map<std::pair<std::string, double>, std::vector<const EvalCaseResult*>> buckets;
    for (std::size_t i = 0; i < results.size(); ++i) {
        if (!results[i].error.empty())
            ++report.errored_cases;
        report.aggregate.counts.tp += case_counts[i].tp;
        report.aggregate.counts.fp += case_counts[i].fp;
        report.aggregate.counts.fn += case_counts[i].fn;
        report.aggregate.cases.push_back(results[i]);
    }

    int scored = 0;
    for (const EvalCaseResult& res : report.aggregate.cases) {
        if (!res.error.empty())
            continue;
        report.mean_p += res.p;
        report.mean_r += res.r;
        report.mean_f1 += res.f1;
        ++scored;
    }
    if (scored > 0) {
        report.mean_p /= scored;
        report.mean_r /= scored;
        report.mean_f1 /= scored;
    }
    detail::fill_metrics(report.aggregate);

    for (std::size_t i = 0; i < manifest.cases.size(); ++i) {
        const EvalCaseResult& res = report.aggregate.cases[i];
        if (res.error.empty())
            buckets[{manifest.cases[i].kind, manifest.cases[i].amount}].push_back(&res);
    }
    for (const auto& [key, items] : buckets) {
        CurveRow row;
        row.kind = key.first;
        row.amount = key.second;
        row.cases = static_cast<int>(items.size());
        for (const EvalCaseResult* r : items) {
            row.mean_p += r->p;
            row.mean_r += r->r;
            row.mean_f1 += r->f1;
        }
        row.mean_p /= row.cases;
        row.mean_r /= row.cases;
        row.mean_f1 /= row.cases;
        report.curves.push_back(row);
    }
    std::sort(report.curves.begin(), report.curves.end(), [](const CurveRow& a, const CurveRow& b) {
        if (a.kind != b.kind)
            return a.kind < b.kind;
        return a.amount < b.amount;
    });
    return report;
}

inline nlohmann::json report_to_json(const BatchReport& report)
{
    nlohmann::json j;
    j["level"] = "pixel";
    j["tp"] = report.aggregate.counts.tp;
    j["fp"] = report.aggregate.counts.fp;
    j["fn"] = report.aggregate.counts.fn;
    j["p"] = report.aggregate.p;
    j["r"] = report.aggregate.r;
    j["f1"] = report.aggregate.f1;
    j["mean_p"] = report.mean_p;
    j["mean_r"] = report.mean_r;
    j["mean_f1"] = report.mean_f1;
    j["cases"] = nlohmann::json::array();
    for (const EvalCaseResult& c : report.aggregate.cases) {
        nlohmann::json jc = {{"id", c.id}, {"p", c.p}, {"r", c.r}, {"f1", c.f1}};
        if (!c.error.empty())
            jc["error"] = c.error;
        j["cases"].push_back(jc);
    }
    return j;
}

inline void write_report_json(const std::filesystem::path& path, const BatchReport& report)
{
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot write report: " + path.string());
    out << report_to_json(report).dump(2) << "\n";
}

inline void write_curves_csv(const std::filesystem::path& path, const BatchReport& report)
{
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot write curves: " + path.string());
    out << "attack_param,mean_p,mean_r,mean_f1\n";
    char buf[160];
    for (const CurveRow& row : report.curves) {
        std::snprintf(buf, sizeof(buf), "%s_%g,%.6f,%.6f,%.6f\n", row.kind.c_str(), row.amount,
                      row.mean_p, row.mean_r, row.mean_f1);
        out << buf;
    }
}

}  // namespace ecdc
