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
 * Evolving circular domains coverage: each surviving matched pair grows a
 * pair of disks through an increasing radius schedule while the two domains'
 * block features stay within the adaptive threshold; the last passing radius
 * is painted for both endpoints, and the union of all disks (after a
 * morphological close) is the tamper mask.
 */

#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include "ecdc/blockfeat.hpp"
#include "ecdc/extract.hpp"
#include "ecdc/geofilter.hpp"
#include "ecdc/mask.hpp"
#include "ecdc/matching.hpp"
#include "ecdc/parallel.hpp"

namespace ecdc {

/* Strictly increasing radii r1, r1 + tau, ..., capped at rm (inclusive). */
struct RadiusSchedule {
    std::vector<double> radii;
};

inline RadiusSchedule radius_schedule(double r1 = 1.5, double rm = 37.5, double tau = 2.0)
{
    if (r1 <= 0.0 || tau <= 0.0 || r1 > rm)
        throw std::invalid_argument("radius_schedule: need 0 < r1 <= rm and tau > 0");
    RadiusSchedule out;
    for (double r = r1; r <= rm + 1e-9; r += tau)
        out.radii.push_back(r);
    return out;
}

struct EcdcParams {
    BlockFeatParams feature;
    int morph_radius = 0;  // 0 = max(3, 1% of the larger image dimension)
    int jobs = 0;
};

inline int morph_radius_for(const GrayImage& img, int configured)
{
    if (configured > 0)
        return configured;
    return std::max(3, static_cast<int>(std::lround(0.01 * std::max(img.width, img.height))));
}

/*
 * Walks the radius schedule; returns the largest radius at which both
 * endpoint domains still match (nullopt when even the first fails).
 */
inline std::optional<double> grow_pair(const GrayImage& img, const MatchPair& pair,
                                       const RadiusSchedule& sched,
                                       const BlockFeatParams& feature = {})
{
    std::optional<double> last_pass;
    for (double r : sched.radii) {
        DomainFeature fa, fb;
        try {
            fa = compute_domain_feature(img, pair.a, r, feature);
            fb = compute_domain_feature(img, pair.b, r, feature);
        } catch (const std::invalid_argument&) {
            break;  // domain degenerate or off-image at this radius
        }
        const double sigma_s = std::abs(fa.variance - fb.variance);
        if (!domains_match(fa, fb, sigma_s))
            break;
        last_pass = r;
    }
    return last_pass;
}

/* Union of both endpoint disks at each pair's final radius. */
inline CoverageMask cover(const GrayImage& img, const MatchSet& matches,
                          const RadiusSchedule& sched, const EcdcParams& params = {})
{
    CoverageMask mask(img.width, img.height, false);
    std::vector<std::optional<double>> radii(matches.size());
    parallel_for(
        matches.size(),
        [&](std::size_t i) { radii[i] = grow_pair(img, matches[i], sched, params.feature); },
        params.jobs);
    for (std::size_t i = 0; i < matches.size(); ++i) {
        if (!radii[i])
            continue;
        paint_disk(mask, matches[i].a.x, matches[i].a.y, *radii[i]);
        paint_disk(mask, matches[i].b.x, matches[i].b.y, *radii[i]);
    }
    return mask;
}

struct DetectParams {
    ExtractParams extract;
    double t_sift = 0.6;
    double t_lpsd = 0.1;
    int match_max_neighbors = kDefaultMaxNeighbors;
    GeoFilterParams geo;
    double radii_r1 = 1.5;
    double radii_rm = 37.5;
    double radii_tau = 2.0;
    EcdcParams ecdc;
};

/* Detection result with the intermediate stages kept for inspection. */
struct DetectionResult {
    ExtractResult features;
    MatchSet raw_matches;
    FilteredMatches filtered;
    CoverageMask mask;
};

inline DetectionResult detect_full(const GrayImage& img, const DetectParams& params = {})
{
    DetectionResult res;
    res.features = extract_all(img, params.extract);
    res.raw_matches = match_both(res.features.sift, res.features.lpsd, params.t_sift,
                                 params.t_lpsd, params.match_max_neighbors,
                                 params.extract.jobs);
    res.filtered = filter_matches(res.raw_matches, params.geo);
    const RadiusSchedule sched =
        radius_schedule(params.radii_r1, params.radii_rm, params.radii_tau);
    res.mask = cover(img, res.filtered.pairs, sched, params.ecdc);
    res.mask = morph_refine(res.mask, morph_radius_for(img, params.ecdc.morph_radius));
    return res;
}

/* Whole pipeline: extract, match, filter, cover, refine. */
inline CoverageMask detect(const GrayImage& img, const DetectParams& params = {})
{
    return detect_full(img, params).mask;
}

}  // namespace ecdc
