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

#pragma once

#include <vector>

#include "ecdc/lpsd.hpp"
#include "ecdc/parallel.hpp"
#include "ecdc/sift.hpp"
#include "ecdc/surf.hpp"

namespace ecdc {

struct ExtractParams {
    double sift_contrast = 0.03;
    double sift_edge_ratio = 10.0;
    int sift_octaves = 0;  // 0 = derived from the image size
    int sift_scales_per_octave = 3;
    int surf_octaves = 4;
    double surf_response_thresh = 2e-4;
    std::size_t max_keypoints = 4000;  // per family; 0 = unlimited
    int jobs = 0;
};

struct ExtractResult {
    std::vector<Descriptor> sift;
    std::vector<Descriptor> lpsd;
};

/*
 * Runs both detectors over the whole image. The two descriptor families are
 * kept separate; they are never matched against each other. Output order is
 * canonical (keypoint (y, x, scale, orientation)) so runs are reproducible
 * regardless of scheduling.
 */
inline ExtractResult extract_all(const GrayImage& img, const ExtractParams& params = {})
{
    ExtractResult out;

    const int octaves =
        params.sift_octaves > 0 ? params.sift_octaves : default_octave_count(img);
    const int min_dim = std::min(img.width, img.height);
    if (min_dim >= (8 << octaves)) {
        const ScaleSpace ss = build_scale_space(img, octaves, params.sift_scales_per_octave);
        std::vector<Keypoint> kps =
            detect_sift(ss, params.sift_contrast, params.sift_edge_ratio);
        kps = cap_keypoints(std::move(kps), params.max_keypoints);
        std::vector<std::optional<Descriptor>> descs(kps.size());
        parallel_for(
            kps.size(), [&](std::size_t i) { descs[i] = describe_sift(kps[i], ss); },
            params.jobs);
        for (auto& d : descs)
            if (d)
                out.sift.push_back(std::move(*d));
    }

    {
        const IntegralImage ii = integral(img);
        std::vector<Keypoint> kps =
            detect_surf(ii, params.surf_octaves, params.surf_response_thresh);
        kps = cap_keypoints(std::move(kps), params.max_keypoints);
        std::vector<std::optional<Descriptor>> descs(kps.size());
        parallel_for(
            kps.size(), [&](std::size_t i) { descs[i] = describe_lpsd(kps[i], img, ii); },
            params.jobs);
        for (auto& d : descs)
            if (d)
                out.lpsd.push_back(std::move(*d));
    }
    return out;
}

}  // namespace ecdc
