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
 * Log-polar SURF descriptor (LPSD): the circular neighborhood of a keypoint
 * is resampled onto a 4-radial x 4-angular log-polar grid aligned with the
 * keypoint orientation; each cell accumulates SURF-style Haar sums
 * (sum dx, sum dy, sum |dx|, sum |dy|) in the rotated frame, giving a
 * 64-value unit vector.
 */

#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include "ecdc/image.hpp"
#include "ecdc/keypoint.hpp"
#include "ecdc/surf.hpp"

namespace ecdc {

inline constexpr int kLpsdRadialBins = 4;
inline constexpr int kLpsdAngularBins = 4;
inline constexpr double kLpsdSupportFactor = 10.0;  // support radius = 10 * scale

inline std::optional<Descriptor> describe_lpsd(const Keypoint& kp, const GrayImage& img,
                                               const IntegralImage& ii)
{
    constexpr int kRadialSamples = 3;   // per radial bin
    constexpr int kAngularSamples = 5;  // per angular bin

    const double support = kLpsdSupportFactor * kp.scale;
    const double r_inner = kp.scale;  // innermost log-radial edge
    const double log_ratio = std::log(support / r_inner);
    const double cos_o = std::cos(kp.orientation);
    const double sin_o = std::sin(kp.orientation);
    const int haar = std::max(2, 2 * static_cast<int>(std::lround(kp.scale)));
    const double weight_denom = 2.0 * (support / 2.0) * (support / 2.0);

    double cells[kLpsdRadialBins][kLpsdAngularBins][4] = {};
    int used = 0;

    for (int rb = 0; rb < kLpsdRadialBins; ++rb) {
        for (int rs = 0; rs < kRadialSamples; ++rs) {
            const double t = (rb + (rs + 0.5) / kRadialSamples) / kLpsdRadialBins;
            const double radius = r_inner * std::exp(log_ratio * t);
            for (int ab = 0; ab < kLpsdAngularBins; ++ab) {
                for (int as = 0; as < kAngularSamples; ++as) {
                    const double local_angle =
                        2.0 * kPi * (ab + (as + 0.5) / kAngularSamples) / kLpsdAngularBins;
                    const double angle = local_angle + kp.orientation;
                    const int px = static_cast<int>(std::lround(kp.x + radius * std::cos(angle)));
                    const int py = static_cast<int>(std::lround(kp.y + radius * std::sin(angle)));
                    if (px - haar / 2 < 0 || px + haar / 2 >= img.width || py - haar / 2 < 0 ||
                        py + haar / 2 >= img.height)
                        continue;
                    const double rx = detail::haar_x(ii, px, py, haar);
                    const double ry = detail::haar_y(ii, px, py, haar);
                    // rotate the response into the keypoint frame
                    const double dx = rx * cos_o + ry * sin_o;
                    const double dy = -rx * sin_o + ry * cos_o;
                    const double w = std::exp(-radius * radius / weight_denom);
                    cells[rb][ab][0] += w * dx;
                    cells[rb][ab][1] += w * dy;
                    cells[rb][ab][2] += w * std::abs(dx);
                    cells[rb][ab][3] += w * std::abs(dy);
                    ++used;
                }
            }
        }
    }
    if (used == 0)
        return std::nullopt;

    std::vector<float> vec(kLpsdRadialBins * kLpsdAngularBins * 4);
    int idx = 0;
    double norm = 0.0;
    for (int rb = 0; rb < kLpsdRadialBins; ++rb) {
        for (int ab = 0; ab < kLpsdAngularBins; ++ab) {
            for (int c = 0; c < 4; ++c) {
                vec[idx++] = static_cast<float>(cells[rb][ab][c]);
                norm += cells[rb][ab][c] * cells[rb][ab][c];
            }
        }
    }
    norm = std::sqrt(norm);
    if (norm < 1e-12)
        return std::nullopt;
    for (float& v : vec)
        v = static_cast<float>(v / norm);

    Descriptor desc;
    desc.keypoint = kp;
    desc.vector = std::move(vec);
    return desc;
}

/* Convenience overload; builds the integral image internally. */
inline std::optional<Descriptor> describe_lpsd(const Keypoint& kp, const GrayImage& img)
{
    return describe_lpsd(kp, img, integral(img));
}

}  // namespace ecdc
