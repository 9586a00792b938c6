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
 * Command-line front end.
 *
 *   ecdc detect IMAGE [--mode dct|pcet] [--mask OUT] [--overlay OUT] ...
 *   ecdc synth  BASE --scenario NAME --out DIR [--seed N] [--fragment PX]
 *   ecdc eval   MANIFEST [--mode ...] [--report OUT] [--curves OUT]
 *
 * Exit codes: 0 clean verdict, 3 forged verdict, 64 usage error,
 * 65 empty input data, 66 unreadable input, 70 internal error.
 */

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ecdc/config.hpp"
#include "ecdc/ecdc.hpp"
#include "ecdc/evalkit.hpp"
#include "ecdc/forgerylab.hpp"
#include "ecdc/image_io.hpp"

namespace {

constexpr int kExitClean = 0;
constexpr int kExitForged = 3;
constexpr int kExitUsage = 64;
constexpr int kExitNoData = 65;
constexpr int kExitNoInput = 66;
constexpr int kExitInternal = 70;

struct CliOptions {
    std::string config_path;
    std::vector<std::string> overrides;  // key=value pairs
    std::string mode;                    // dct | pcet | "" (config default)
};

ecdc::Config build_config(const CliOptions& opts)
{
    ecdc::Config cfg;
    std::string path = opts.config_path;
    if (path.empty()) {
        if (const char* env = std::getenv("ECDC_CONFIG"))
            path = env;
    }
    if (!path.empty())
        cfg = ecdc::load_config(path, cfg);
    for (const std::string& kv : opts.overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("--set expects key=value, got: " + kv);
        ecdc::apply_config_entry(cfg, ecdc::trim(kv.substr(0, eq)),
                                 ecdc::trim(kv.substr(eq + 1)));
    }
    if (!opts.mode.empty()) {
        ecdc::feature_mode_from_string(opts.mode);
        cfg.blockfeat_mode = opts.mode;
    }
    return cfg;
}

void write_keypoints_jsonl(const std::string& path, const ecdc::ExtractResult& features)
{
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot write keypoints: " + path);
    auto dump = [&](const std::vector<ecdc::Descriptor>& descs, const char* kind) {
        for (const ecdc::Descriptor& d : descs) {
            nlohmann::json j = {{"x", d.keypoint.x},
                                {"y", d.keypoint.y},
                                {"scale", d.keypoint.scale},
                                {"orientation", d.keypoint.orientation},
                                {"kind", kind}};
            out << j.dump() << "\n";
        }
    };
    dump(features.sift, "sift");
    dump(features.lpsd, "lpsd");
}

void write_matches_jsonl(const std::string& path, const ecdc::MatchSet& matches)
{
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot write matches: " + path);
    for (const ecdc::MatchPair& m : matches) {
        nlohmann::json j = {{"ax", m.a.x}, {"ay", m.a.y}, {"bx", m.b.x},
                            {"by", m.b.y}, {"d2", m.d2},
                            {"kind", m.kind == ecdc::KeypointKind::Sift ? "sift" : "lpsd"}};
        out << j.dump() << "\n";
    }
}

int run_detect(const std::string& input, const CliOptions& opts, const std::string& mask_out,
               const std::string& overlay_out, const std::string& matches_out,
               const std::string& keypoints_out)
{
    const ecdc::Config cfg = build_config(opts);
    ecdc::GrayImage img;
    try {
        img = ecdc::load_grayscale(input);
    } catch (const ecdc::DecodeError& e) {
        std::cerr << "ecdc: " << e.what() << "\n";
        return kExitNoInput;
    }

    const ecdc::DetectionResult res = ecdc::detect_full(img, ecdc::detect_params(cfg));
    if (!mask_out.empty())
        ecdc::save_mask_png(mask_out, res.mask);
    if (!overlay_out.empty())
        ecdc::save_png_rgb(overlay_out, ecdc::render_overlay(res.mask, img));
    if (!matches_out.empty())
        write_matches_jsonl(matches_out, res.filtered.pairs);
    if (!keypoints_out.empty())
        write_keypoints_jsonl(keypoints_out, res.features);

    const bool forged = res.mask.any();
    std::cout << (forged ? "forged" : "clean") << " " << res.mask.count() << " px flagged, "
              << res.filtered.pairs.size() << " matches in " << res.filtered.groups.size()
              << " groups\n";
    return forged ? kExitForged : kExitClean;
}

int run_synth(const std::string& base_path, const std::string& scenario_name,
              const std::string& out_dir, unsigned seed, int fragment)
{
    ecdc::Scenario scenario;
    try {
        scenario = ecdc::scenario_from_name(scenario_name);
    } catch (const std::invalid_argument& e) {
        std::cerr << "ecdc: " << e.what() << "\n";
        return kExitUsage;
    }
    ecdc::GrayImage base;
    try {
        base = ecdc::load_grayscale(base_path);
    } catch (const ecdc::DecodeError& e) {
        std::cerr << "ecdc: " << e.what() << "\n";
        return kExitNoInput;
    }
    ecdc::SuiteParams params;
    params.seed = seed;
    params.fragment = fragment;
    const auto manifest = ecdc::write_suite(base, scenario, out_dir, params);
    std::cout << "wrote " << manifest.string() << "\n";
    return kExitClean;
}

int run_eval(const std::string& manifest_path, const CliOptions& opts,
             const std::string& report_out, const std::string& curves_out, int jobs)
{
    const ecdc::Config cfg = build_config(opts);
    ecdc::Manifest manifest;
    try {
        manifest = ecdc::read_manifest(manifest_path);
    } catch (const ecdc::DecodeError& e) {
        std::cerr << "ecdc: " << e.what() << "\n";
        return kExitNoInput;
    }
    if (manifest.cases.empty()) {
        std::cerr << "ecdc: manifest lists no cases\n";
        return kExitNoData;
    }

    const ecdc::DetectParams dp = ecdc::detect_params(cfg);
    ecdc::DetectorFn detector = [&dp](const ecdc::GrayImage& forged,
                                      const std::filesystem::path&) {
        return ecdc::detect(forged, dp);
    };
    const int used_jobs = jobs > 0 ? jobs : (cfg.jobs > 0 ? cfg.jobs : 0);
    const ecdc::BatchReport report =
        ecdc::batch_evaluate(manifest, detector, ecdc::effective_jobs(used_jobs));

    if (!report_out.empty())
        ecdc::write_report_json(report_out, report);
    if (!curves_out.empty())
        ecdc::write_curves_csv(curves_out, report);
    std::cout << "cases " << manifest.cases.size() << ", errors " << report.errored_cases
              << ", mean p/r/f1 " << report.mean_p << "/" << report.mean_r << "/"
              << report.mean_f1 << "\n";
    return kExitClean;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"copy-move forgery detection via evolving circular domains coverage"};
    app.require_subcommand(1);

    CliOptions opts;

    // detect
    auto* detect = app.add_subcommand("detect", "detect copy-move forgery in one image");
    std::string detect_input, mask_out, overlay_out, matches_out, keypoints_out;
    detect->add_option("input", detect_input, "input image (png/jpeg/bmp)")->required();
    detect->add_option("--mode", opts.mode, "block feature mode: dct or pcet");
    detect->add_option("--mask", mask_out, "write the tamper mask PNG here");
    detect->add_option("--overlay", overlay_out, "write a tinted overlay PNG here");
    detect->add_option("--matches", matches_out, "write filtered matches as JSON lines");
    detect->add_option("--keypoints", keypoints_out, "write keypoints as JSON lines");
    detect->add_option("--config", opts.config_path, "config file (default: $ECDC_CONFIG)");
    detect->add_option("--set", opts.overrides, "override a config key, key=value");

    // synth
    auto* synth = app.add_subcommand("synth", "synthesize a forgery attack suite");
    std::string synth_base, synth_scenario, synth_out;
    unsigned synth_seed = 7;
    int synth_fragment = 0;
    synth->add_option("base", synth_base, "pristine base image")->required();
    synth->add_option("--scenario", synth_scenario,
                      "plain|scale|rot|noise_local|noise_global|jpeg|downsample")
        ->required();
    synth->add_option("--out", synth_out, "output directory")->required();
    synth->add_option("--seed", synth_seed, "noise seed");
    synth->add_option("--fragment", synth_fragment, "fragment side in pixels (0 = auto)");

    // eval
    auto* eval = app.add_subcommand("eval", "run detection over a suite manifest and score it");
    std::string eval_manifest, report_out, curves_out;
    int eval_jobs = 0;
    eval->add_option("manifest", eval_manifest, "suite manifest JSON")->required();
    eval->add_option("--mode", opts.mode, "block feature mode: dct or pcet");
    eval->add_option("--report", report_out, "write the report JSON here");
    eval->add_option("--curves", curves_out, "write per-attack curves CSV here");
    eval->add_option("--config", opts.config_path, "config file (default: $ECDC_CONFIG)");
    eval->add_option("--set", opts.overrides, "override a config key, key=value");
    eval->add_option("--jobs", eval_jobs, "parallel cases (0 = logical cores)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (app.got_subcommand(detect))
            return run_detect(detect_input, opts, mask_out, overlay_out, matches_out,
                              keypoints_out);
        if (app.got_subcommand(synth))
            return run_synth(synth_base, synth_scenario, synth_out, synth_seed, synth_fragment);
        if (app.got_subcommand(eval))
            return run_eval(eval_manifest, opts, report_out, curves_out, eval_jobs);
    } catch (const ecdc::DecodeError& e) {
        std::cerr << "ecdc: " << e.what() << "\n";
        return kExitNoInput;
    } catch (const std::invalid_argument& e) {
        std::cerr << "ecdc: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "ecdc: " << e.what() << "\n";
        return kExitInternal;
    }
    return kExitUsage;
}
