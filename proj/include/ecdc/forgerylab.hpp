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
 * Copy-move forgery synthesis with pixel-exact ground truth. A source
 * rectangle is copied, optionally transformed (rotation, scaling, local
 * noise), and pasted elsewhere in the same image; whole-image attacks
 * (global noise, JPEG round trip, downsampling) follow. The truth mask
 * marks the source footprint and the exact pasted footprint.
 */

#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "ecdc/image.hpp"
#include "ecdc/image_io.hpp"
#include "ecdc/mask.hpp"

namespace ecdc {

enum class AttackKind { None, Rotate, Scale, NoiseLocal, NoiseGlobal, Jpeg, Downsample };

struct AttackSpec {
    AttackKind kind = AttackKind::None;
    double amount = 0.0;  // degrees | percent | std on [0,1] | std | quality | percent

    void validate() const
    {
        switch (kind) {
        case AttackKind::None:
            break;
        case AttackKind::Rotate:
            if (amount <= -180.0 || amount > 180.0)
                throw std::invalid_argument("AttackSpec: rotation must be in (-180, 180]");
            break;
        case AttackKind::Scale:
            if (amount <= 0.0)
                throw std::invalid_argument("AttackSpec: scale percent must be positive");
            break;
        case AttackKind::NoiseLocal:
        case AttackKind::NoiseGlobal:
            if (amount < 0.0)
                throw std::invalid_argument("AttackSpec: noise std must be non-negative");
            break;
        case AttackKind::Jpeg:
            if (amount < 1.0 || amount > 100.0)
                throw std::invalid_argument("AttackSpec: JPEG quality must be in [1, 100]");
            break;
        case AttackKind::Downsample:
            if (amount <= 0.0 || amount > 100.0)
                throw std::invalid_argument("AttackSpec: downsample percent must be in (0, 100]");
            break;
        }
    }
};

inline const char* attack_kind_name(AttackKind k)
{
    switch (k) {
    case AttackKind::None: return "none";
    case AttackKind::Rotate: return "rotate";
    case AttackKind::Scale: return "scale";
    case AttackKind::NoiseLocal: return "noise_local";
    case AttackKind::NoiseGlobal: return "noise_global";
    case AttackKind::Jpeg: return "jpeg";
    case AttackKind::Downsample: return "downsample";
    }
    return "none";
}

inline AttackKind attack_kind_from_name(const std::string& name)
{
    if (name == "none") return AttackKind::None;
    if (name == "rotate") return AttackKind::Rotate;
    if (name == "scale") return AttackKind::Scale;
    if (name == "noise_local") return AttackKind::NoiseLocal;
    if (name == "noise_global") return AttackKind::NoiseGlobal;
    if (name == "jpeg") return AttackKind::Jpeg;
    if (name == "downsample") return AttackKind::Downsample;
    throw std::invalid_argument("unknown attack kind: " + name);
}

struct Rect {
    int x = 0;
    int y = 0;
    int w = 0;
    int h = 0;
};

struct Provenance {
    Rect src;
    int dst_x = 0;  // top-left of the (untransformed) paste rectangle
    int dst_y = 0;
};

struct ForgeryCase {
    std::string id;
    GrayImage forged;
    CoverageMask truth;
    AttackSpec spec;
    Provenance provenance;
};

namespace detail {

/* Box-Muller gaussian on top of mt19937; identical across platforms. */
class GaussianRng {
public:
    explicit GaussianRng(std::uint32_t seed) : rng_(seed) {}

    double next()
    {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = (static_cast<double>(rng_()) + 0.5) / 4294967296.0;
        const double u2 = (static_cast<double>(rng_()) + 0.5) / 4294967296.0;
        const double mag = std::sqrt(-2.0 * std::log(u1));
        spare_ = mag * std::sin(2.0 * kPi * u2);
        has_spare_ = true;
        return mag * std::cos(2.0 * kPi * u2);
    }

private:
    std::mt19937 rng_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

inline void add_gaussian_noise(GrayImage& img, double std_01, GaussianRng& rng)
{
    const double scale = std_01 * 255.0;
    for (float& v : img.data)
        v = std::clamp(static_cast<float>(v + scale * rng.next()), 0.0f, 255.0f);
}

}  // namespace detail

/*
 * Builds one forgery. The fragment is copied from src_rect, transformed
 * per the attack kind (fragment-level attacks), and pasted with its center at the
 * center of the destination rectangle; image-level attacks then run on the
 * whole composite. Throws std::invalid_argument when the source or the
 * transformed paste leaves the image.
 */
inline ForgeryCase synthesize(const GrayImage& base, const Rect& src_rect, int dst_x, int dst_y,
                              const AttackSpec& spec, std::uint32_t seed)
{
    spec.validate();
    if (src_rect.w < 1 || src_rect.h < 1 || src_rect.x < 0 || src_rect.y < 0 ||
        src_rect.x + src_rect.w > base.width || src_rect.y + src_rect.h > base.height)
        throw std::invalid_argument("synthesize: source rectangle out of bounds");

    ForgeryCase out;
    out.forged = base;
    out.truth = CoverageMask(base.width, base.height, false);
    out.spec = spec;
    out.provenance = {src_rect, dst_x, dst_y};
    detail::GaussianRng rng(seed);

    // source footprint
    for (int i = 0; i < src_rect.h; ++i)
        for (int j = 0; j < src_rect.w; ++j)
            out.truth.set(src_rect.x + j, src_rect.y + i, true);

    const bool geometric = spec.kind == AttackKind::Rotate || spec.kind == AttackKind::Scale;
    if (!geometric) {
        // integer-exact copy
        if (dst_x < 0 || dst_y < 0 || dst_x + src_rect.w > base.width ||
            dst_y + src_rect.h > base.height)
            throw std::invalid_argument("synthesize: paste out of bounds");
        GrayImage fragment(src_rect.w, src_rect.h);
        for (int i = 0; i < src_rect.h; ++i)
            for (int j = 0; j < src_rect.w; ++j)
                fragment.at(j, i) = base.at(src_rect.x + j, src_rect.y + i);
        if (spec.kind == AttackKind::NoiseLocal)
            detail::add_gaussian_noise(fragment, spec.amount, rng);
        for (int i = 0; i < src_rect.h; ++i) {
            for (int j = 0; j < src_rect.w; ++j) {
                out.forged.at(dst_x + j, dst_y + i) = fragment.at(j, i);
                out.truth.set(dst_x + j, dst_y + i, true);
            }
        }
    } else {
        // rotate or scale the fragment about its center, then paste
        const double half_w = src_rect.w / 2.0;
        const double half_h = src_rect.h / 2.0;
        const double cl_x = (src_rect.w - 1) / 2.0;
        const double cl_y = (src_rect.h - 1) / 2.0;
        const double src_cx = src_rect.x + cl_x;
        const double src_cy = src_rect.y + cl_y;
        const double dst_cx = dst_x + cl_x;
        const double dst_cy = dst_y + cl_y;

        double fwd[2][2];
        if (spec.kind == AttackKind::Rotate) {
            const double rad = deg_to_rad(spec.amount);
            fwd[0][0] = std::cos(rad);
            fwd[0][1] = -std::sin(rad);
            fwd[1][0] = std::sin(rad);
            fwd[1][1] = std::cos(rad);
        } else {
            const double s = spec.amount / 100.0;
            fwd[0][0] = s;
            fwd[0][1] = 0.0;
            fwd[1][0] = 0.0;
            fwd[1][1] = s;
        }
        const double det = fwd[0][0] * fwd[1][1] - fwd[0][1] * fwd[1][0];
        const double inv[2][2] = {{fwd[1][1] / det, -fwd[0][1] / det},
                                  {-fwd[1][0] / det, fwd[0][0] / det}};

        // bounding box of the transformed rectangle
        double min_x = 1e18, max_x = -1e18, min_y = 1e18, max_y = -1e18;
        const double corners[4][2] = {
            {-half_w, -half_h}, {half_w, -half_h}, {-half_w, half_h}, {half_w, half_h}};
        for (const auto& c : corners) {
            const double tx = fwd[0][0] * c[0] + fwd[0][1] * c[1] + dst_cx;
            const double ty = fwd[1][0] * c[0] + fwd[1][1] * c[1] + dst_cy;
            min_x = std::min(min_x, tx);
            max_x = std::max(max_x, tx);
            min_y = std::min(min_y, ty);
            max_y = std::max(max_y, ty);
        }
        if (min_x < -0.5 || min_y < -0.5 || max_x > base.width - 0.5 ||
            max_y > base.height - 0.5)
            throw std::invalid_argument("synthesize: paste out of bounds");

        const int px_lo = std::max(0, static_cast<int>(std::floor(min_x)));
        const int px_hi = std::min(base.width - 1, static_cast<int>(std::ceil(max_x)));
        const int py_lo = std::max(0, static_cast<int>(std::floor(min_y)));
        const int py_hi = std::min(base.height - 1, static_cast<int>(std::ceil(max_y)));
        for (int py = py_lo; py <= py_hi; ++py) {
            for (int px = px_lo; px <= px_hi; ++px) {
                const double rel_x = px - dst_cx;
                const double rel_y = py - dst_cy;
                const double ux = inv[0][0] * rel_x + inv[0][1] * rel_y;
                const double uy = inv[1][0] * rel_x + inv[1][1] * rel_y;
                if (std::abs(ux) > half_w || std::abs(uy) > half_h)
                    continue;
                out.forged.at(px, py) = sample_bilinear(base, src_cx + ux, src_cy + uy);
                out.truth.set(px, py, true);
            }
        }
    }

    // image-level attacks
    switch (spec.kind) {
    case AttackKind::NoiseGlobal:
        detail::add_gaussian_noise(out.forged, spec.amount, rng);
        break;
    case AttackKind::Jpeg:
        out.forged = jpeg_roundtrip(out.forged, static_cast<int>(spec.amount));
        break;
    case AttackKind::Downsample: {
        const int nw = std::max(1, static_cast<int>(std::lround(base.width * spec.amount / 100.0)));
        const int nh =
            std::max(1, static_cast<int>(std::lround(base.height * spec.amount / 100.0)));
        out.forged = resize_bilinear(out.forged, nw, nh);
        CoverageMask small(nw, nh, false);
        for (int y = 0; y < nh; ++y) {
            const int sy = std::min(out.truth.height - 1,
                                    static_cast<int>((y + 0.5) * out.truth.height / nh));
            for (int x = 0; x < nw; ++x) {
                const int sx = std::min(out.truth.width - 1,
                                        static_cast<int>((x + 0.5) * out.truth.width / nw));
                small.set(x, y, out.truth.at(sx, sy));
            }
        }
        out.truth = std::move(small);
        break;
    }
    default:
        break;
    }
    return out;
}

enum class Scenario { Plain, Scale, Rot, NoiseLocal, NoiseGlobal, Jpeg, Downsample };

inline const char* scenario_name(Scenario s)
{
    switch (s) {
    case Scenario::Plain: return "plain";
    case Scenario::Scale: return "scale";
    case Scenario::Rot: return "rot";
    case Scenario::NoiseLocal: return "noise_local";
    case Scenario::NoiseGlobal: return "noise_global";
    case Scenario::Jpeg: return "jpeg";
    case Scenario::Downsample: return "downsample";
    }
    return "plain";
}

inline Scenario scenario_from_name(const std::string& name)
{
    if (name == "plain") return Scenario::Plain;
    if (name == "scale") return Scenario::Scale;
    if (name == "rot") return Scenario::Rot;
    if (name == "noise_local") return Scenario::NoiseLocal;
    if (name == "noise_global") return Scenario::NoiseGlobal;
    if (name == "jpeg") return Scenario::Jpeg;
    if (name == "downsample") return Scenario::Downsample;
    throw std::invalid_argument("unknown scenario: " + name);
}

/* Parameter grid for one scenario. */
inline std::vector<AttackSpec> scenario_grid(Scenario s)
{
    std::vector<AttackSpec> out;
    switch (s) {
    case Scenario::Plain:
        out.push_back({AttackKind::None, 0.0});
        break;
    case Scenario::Scale:
        for (int p = 91; p <= 109; p += 2)
            out.push_back({AttackKind::Scale, static_cast<double>(p)});
        for (int p : {50, 80, 120, 200})
            out.push_back({AttackKind::Scale, static_cast<double>(p)});
        break;
    case Scenario::Rot:
        for (int a : {2, 4, 6, 8, 10, 20, 60, 180})
            out.push_back({AttackKind::Rotate, static_cast<double>(a)});
        break;
    case Scenario::NoiseLocal:
        for (int i = 1; i <= 5; ++i)
            out.push_back({AttackKind::NoiseLocal, 0.02 * i});
        break;
    case Scenario::NoiseGlobal:
        for (int i = 1; i <= 5; ++i)
            out.push_back({AttackKind::NoiseGlobal, 0.02 * i});
        break;
    case Scenario::Jpeg:
        for (int q = 20; q <= 100; q += 10)
            out.push_back({AttackKind::Jpeg, static_cast<double>(q)});
        break;
    case Scenario::Downsample:
        for (int p = 90; p >= 10; p -= 20)
            out.push_back({AttackKind::Downsample, static_cast<double>(p)});
        break;
    }
    return out;
}

struct SuiteParams {
    int fragment = 0;  // square fragment side; 0 = 3/16 of the smaller dimension
    std::uint32_t seed = 7;
};

namespace detail {

/* Most textured fragment-sized window inside the top-left quadrant. */
inline Rect pick_source_rect(const GrayImage& base, int fragment)
{
    const int margin = std::max(8, std::min(base.width, base.height) / 32);
    const int x_max = base.width / 2 - fragment - margin;
    const int y_max = base.height / 2 - fragment - margin;
    if (x_max < margin || y_max < margin)
        throw std::invalid_argument("attack_suite: image too small for fragment size");

    // variance via sum and sum-of-squares tables
    const IntegralImage sums = integral(base);
    GrayImage squared(base.width, base.height);
    for (std::size_t i = 0; i < base.size(); ++i)
        squared.data[i] = base.data[i] * base.data[i] / 255.0f;
    const IntegralImage sq_sums = integral(squared);

    const int stride = std::max(8, fragment / 4);
    const double area = static_cast<double>(fragment) * fragment;
    Rect best{margin, margin, fragment, fragment};
    double best_var = -1.0;
    for (int y = margin; y <= y_max; y += stride) {
        for (int x = margin; x <= x_max; x += stride) {
            const double s = sums.rect_sum(x, y, x + fragment, y + fragment);
            const double sq = sq_sums.rect_sum(x, y, x + fragment, y + fragment) * 255.0;
            const double mean = s / area;
            const double var = sq / area - mean * mean;
            if (var > best_var) {
                best_var = var;
                best = {x, y, fragment, fragment};
            }
        }
    }
    return best;
}

}  // namespace detail

/*
 * The full attack grid for one scenario over a single base image.
 * The fragment is the most textured window of the top-left quadrant and the
 * paste lands in the lower-right region, leaving room for the largest
 * transform of the scenario.
 */
inline std::vector<ForgeryCase> attack_suite(const GrayImage& base, Scenario scenario,
                                             const SuiteParams& params = {})
{
    const int min_dim = std::min(base.width, base.height);
    const int fragment =
        params.fragment > 0 ? params.fragment : std::max(32, (min_dim * 3) / 16);
    const Rect src = detail::pick_source_rect(base, fragment);
    const double cl_x = (fragment - 1) / 2.0;
    const double cl_y = (fragment - 1) / 2.0;
    const int dst_x = static_cast<int>(std::lround(base.width * 11.0 / 16.0 - cl_x));
    const int dst_y = static_cast<int>(std::lround(base.height * 11.0 / 16.0 - cl_y));

    std::vector<ForgeryCase> out;
    const auto grid = scenario_grid(scenario);
    char buf[64];
    for (std::size_t i = 0; i < grid.size(); ++i) {
        ForgeryCase fc = synthesize(base, src, dst_x, dst_y, grid[i],
                                    params.seed + static_cast<std::uint32_t>(i));
        if (grid[i].kind == AttackKind::None)
            std::snprintf(buf, sizeof(buf), "%s", scenario_name(scenario));
        else
            std::snprintf(buf, sizeof(buf), "%s_%g", scenario_name(scenario), grid[i].amount);
        fc.id = buf;
        out.push_back(std::move(fc));
    }
    return out;
}

/* Writes forged.png, truth.png, and case.json into `dir`. */
inline void write_case(const std::filesystem::path& dir, const ForgeryCase& fc)
{
    std::filesystem::create_directories(dir);
    save_png_gray((dir / "forged.png").string(), fc.forged);
    save_mask_png((dir / "truth.png").string(), fc.truth);

    nlohmann::json j;
    j["id"] = fc.id;
    j["attack"] = {{"kind", attack_kind_name(fc.spec.kind)}, {"amount", fc.spec.amount}};
    j["provenance"] = {{"src",
                        {{"x", fc.provenance.src.x},
                         {"y", fc.provenance.src.y},
                         {"w", fc.provenance.src.w},
                         {"h", fc.provenance.src.h}}},
                       {"dst", {{"x", fc.provenance.dst_x}, {"y", fc.provenance.dst_y}}}};
    j["width"] = fc.forged.width;
    j["height"] = fc.forged.height;
    std::ofstream out(dir / "case.json");
    out << j.dump(2) << "\n";
}

/* One manifest entry per case directory, relative to the manifest. */
struct ManifestEntry {
    std::string id;
    std::string dir;
    AttackSpec spec;
};

inline void write_manifest(const std::filesystem::path& path, const std::string& suite,
                           const std::vector<ManifestEntry>& entries)
{
    nlohmann::json j;
    j["suite"] = suite;
    j["cases"] = nlohmann::json::array();
    for (const auto& e : entries) {
        j["cases"].push_back({{"id", e.id},
                              {"dir", e.dir},
                              {"kind", attack_kind_name(e.spec.kind)},
                              {"amount", e.spec.amount}});
    }
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot write manifest: " + path.string());
    out << j.dump(2) << "\n";
}

/* Synthesizes a suite and writes it under out_dir; returns the manifest path. */
inline std::filesystem::path write_suite(const GrayImage& base, Scenario scenario,
                                         const std::filesystem::path& out_dir,
                                         const SuiteParams& params = {})
{
    const auto cases = attack_suite(base, scenario, params);
    std::vector<ManifestEntry> entries;
    for (const ForgeryCase& fc : cases) {
        const std::string dir_name = "case_" + fc.id;
        write_case(out_dir / dir_name, fc);
        entries.push_back({fc.id, dir_name, fc.spec});
    }
    const auto manifest = out_dir / "manifest.json";
    write_manifest(manifest, scenario_name(scenario), entries);
    return manifest;
}

}  // namespace ecdc
