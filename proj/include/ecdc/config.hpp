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
 * Flat key/value configuration. Grammar: one `key = value` per line, `#`
 * starts a comment, unknown keys are rejected. Precedence is CLI flags over
 * file values over the built-in defaults.
 */

#pragma once

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>

#include "ecdc/blockfeat.hpp"
#include "ecdc/ecdc.hpp"

namespace ecdc {

struct Config {
    // g2NN thresholds
    double t_sift = 0.6;
    double t_lpsd = 0.1;
    int match_max_neighbors = 10;
    // spatial and RANSAC filtering
    double spatial_s = 50.0;
    int ransac_n = 6;
    double ransac_epsilon = 3.0;
    int ransac_max_rounds = 2000;
    std::uint32_t ransac_seed = 42;
    // radius schedule
    double radii_r1 = 1.5;
    double radii_rm = 37.5;
    double radii_tau = 2.0;
    // block features
    std::string blockfeat_mode = "dct";  // dct | pcet
    int blockfeat_pcet_max_order = 3;
    double blockfeat_sigma_scale = 1.0;
    // morphology; 0 = max(3, 1% of the larger dimension)
    int morph_radius = 0;
    // detectors
    double sift_contrast = 0.03;
    double sift_edge_ratio = 10.0;
    int sift_octaves = 0;  // 0 = derived from the image
    int sift_scales_per_octave = 3;
    int surf_octaves = 4;
    double surf_response_thresh = 2e-4;
    int max_keypoints = 4000;  // strongest per family; 0 = unlimited
    // worker pool for batch runs; 0 = logical cores
    int jobs = 0;

    bool operator==(const Config&) const = default;
};

inline FeatureMode feature_mode_from_string(const std::string& s)
{
    if (s == "dct")
        return FeatureMode::Dct;
    if (s == "pcet")
        return FeatureMode::Pcet;
    throw std::invalid_argument("blockfeat.mode must be dct or pcet, got: " + s);
}

inline DetectParams detect_params(const Config& cfg)
{
    DetectParams p;
    p.extract.sift_contrast = cfg.sift_contrast;
    p.extract.sift_edge_ratio = cfg.sift_edge_ratio;
    p.extract.sift_octaves = cfg.sift_octaves;
    p.extract.sift_scales_per_octave = cfg.sift_scales_per_octave;
    p.extract.surf_octaves = cfg.surf_octaves;
    p.extract.surf_response_thresh = cfg.surf_response_thresh;
    p.extract.max_keypoints = cfg.max_keypoints > 0 ? cfg.max_keypoints : 0;
    p.extract.jobs = 1;  // detection itself stays deterministic-serial per image
    p.t_sift = cfg.t_sift;
    p.t_lpsd = cfg.t_lpsd;
    p.match_max_neighbors = cfg.match_max_neighbors;
    p.geo.spatial_s = cfg.spatial_s;
    p.geo.ransac.min_inliers = cfg.ransac_n;
    p.geo.ransac.epsilon = cfg.ransac_epsilon;
    p.geo.ransac.max_rounds = cfg.ransac_max_rounds;
    p.geo.ransac.seed = cfg.ransac_seed;
    p.radii_r1 = cfg.radii_r1;
    p.radii_rm = cfg.radii_rm;
    p.radii_tau = cfg.radii_tau;
    p.ecdc.feature.mode = feature_mode_from_string(cfg.blockfeat_mode);
    p.ecdc.feature.pcet_max_order = cfg.blockfeat_pcet_max_order;
    p.ecdc.feature.sigma_scale = cfg.blockfeat_sigma_scale;
    p.ecdc.morph_radius = cfg.morph_radius;
    p.ecdc.jobs = 1;
    return p;
}

namespace detail {

template <typename T>
inline T parse_number(const std::string& key, const std::string& value)
{
    std::istringstream in(value);
    T out;
    in >> out;
    if (in.fail() || !in.eof())
        throw std::invalid_argument("config: bad value for " + key + ": " + value);
    return out;
}

}  // namespace detail

inline void apply_config_entry(Config& cfg, const std::string& key, const std::string& value)
{
    using detail::parse_number;
    if (key == "t_sift") cfg.t_sift = parse_number<double>(key, value);
    else if (key == "t_lpsd") cfg.t_lpsd = parse_number<double>(key, value);
    else if (key == "match.max_neighbors") cfg.match_max_neighbors = parse_number<int>(key, value);
    else if (key == "spatial.s") cfg.spatial_s = parse_number<double>(key, value);
    else if (key == "ransac.n") cfg.ransac_n = parse_number<int>(key, value);
    else if (key == "ransac.epsilon") cfg.ransac_epsilon = parse_number<double>(key, value);
    else if (key == "ransac.max_rounds") cfg.ransac_max_rounds = parse_number<int>(key, value);
    else if (key == "ransac.seed") cfg.ransac_seed = parse_number<std::uint32_t>(key, value);
    else if (key == "radii.r1") cfg.radii_r1 = parse_number<double>(key, value);
    else if (key == "radii.rm") cfg.radii_rm = parse_number<double>(key, value);
    else if (key == "radii.tau") cfg.radii_tau = parse_number<double>(key, value);
    else if (key == "blockfeat.mode") {
        feature_mode_from_string(value);  // validates
        cfg.blockfeat_mode = value;
    }
    else if (key == "blockfeat.pcet_max_order")
        cfg.blockfeat_pcet_max_order = parse_number<int>(key, value);
    else if (key == "blockfeat.sigma_scale")
        cfg.blockfeat_sigma_scale = parse_number<double>(key, value);
    else if (key == "morph.radius") cfg.morph_radius = parse_number<int>(key, value);
    else if (key == "sift.contrast") cfg.sift_contrast = parse_number<double>(key, value);
    else if (key == "sift.edge_ratio") cfg.sift_edge_ratio = parse_number<double>(key, value);
    else if (key == "sift.octaves") cfg.sift_octaves = parse_number<int>(key, value);
    else if (key == "sift.scales_per_octave")
        cfg.sift_scales_per_octave = parse_number<int>(key, value);
    else if (key == "surf.octaves") cfg.surf_octaves = parse_number<int>(key, value);
    else if (key == "surf.response_thresh")
        cfg.surf_response_thresh = parse_number<double>(key, value);
    else if (key == "max_keypoints") cfg.max_keypoints = parse_number<int>(key, value);
    else if (key == "jobs") cfg.jobs = parse_number<int>(key, value);
    else
        throw std::invalid_argument("config: unknown key: " + key);
}

inline std::string trim(const std::string& s)
{
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos)
        return "";
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

inline Config parse_config(std::istream& in, Config base = {})
{
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos)
            line = line.substr(0, hash);
        line = trim(line);
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config: line " + std::to_string(line_no) +
                                        " is not `key = value`");
        apply_config_entry(base, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return base;
}

inline Config load_config(const std::string& path, Config base = {})
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open config: " + path);
    return parse_config(in, base);
}

inline std::string dump_config(const Config& cfg)
{
    std::ostringstream out;
    auto put_d = [&](const char* key, double v) {
        // shortest representation that round-trips exactly
        char buf[64];
        const auto res = std::to_chars(buf, buf + sizeof(buf), v);
        out << key << " = " << std::string_view(buf, res.ptr - buf) << "\n";
    };
    auto put_i = [&](const char* key, long long v) { out << key << " = " << v << "\n"; };
    put_d("t_sift", cfg.t_sift);
    put_d("t_lpsd", cfg.t_lpsd);
    put_i("match.max_neighbors", cfg.match_max_neighbors);
    put_d("spatial.s", cfg.spatial_s);
    put_i("ransac.n", cfg.ransac_n);
    put_d("ransac.epsilon", cfg.ransac_epsilon);
    put_i("ransac.max_rounds", cfg.ransac_max_rounds);
    put_i("ransac.seed", cfg.ransac_seed);
    put_d("radii.r1", cfg.radii_r1);
    put_d("radii.rm", cfg.radii_rm);
    put_d("radii.tau", cfg.radii_tau);
    out << "blockfeat.mode = " << cfg.blockfeat_mode << "\n";
    put_i("blockfeat.pcet_max_order", cfg.blockfeat_pcet_max_order);
    put_d("blockfeat.sigma_scale", cfg.blockfeat_sigma_scale);
    put_i("morph.radius", cfg.morph_radius);
    put_d("sift.contrast", cfg.sift_contrast);
    put_d("sift.edge_ratio", cfg.sift_edge_ratio);
    put_i("sift.octaves", cfg.sift_octaves);
    put_i("sift.scales_per_octave", cfg.sift_scales_per_octave);
    put_i("surf.octaves", cfg.surf_octaves);
    put_d("surf.response_thresh", cfg.surf_response_thresh);
    put_i("max_keypoints", cfg.max_keypoints);
    put_i("jobs", cfg.jobs);
    return out.str();
}

inline void save_config(const std::string& path, const Config& cfg)
{
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot write config: " + path);
    out << dump_config(cfg);
}

}  // namespace ecdc
