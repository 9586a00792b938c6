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
 * SURF-style detection: approximated determinant-of-Hessian responses from
 * integral-image box filters, 3-D non-maximum suppression over position and
 * filter size, and dominant-orientation assignment from Haar responses.
 */

#pragma once

#include <array>
#include <cmath>
#include <map>
#include <vector>

#include "ecdc/image.hpp"
#include "ecdc/keypoint.hpp"

namespace ecdc {

/* Determinant-of-Hessian approximation at every pixel for one filter size. */
struct HessianResponse {
    int width = 0;
    int height = 0;
    int filter_size = 0;
    std::vector<float> det;

    float at(int x, int y) const { return det[static_cast<std::size_t>(y) * width + x]; }
};

/* Filter sizes per octave; strides double between octaves. */
inline constexpr int kSurfFilterSizes[4][4] = {
    {9, 15, 21, 27},
    {15, 27, 39, 51},
    {27, 51, 75, 99},
    {51, 99, 147, 195},
};

inline double surf_scale_for_size(double filter_size) { return 1.2 * filter_size / 9.0; }

/*
 * Box-filter second derivatives normalized by filter area on a [0, 1]
 * intensity scale; det = Dxx*Dyy - (0.9*Dxy)^2. Boxes are clamped at the
 * image border.
 */
inline HessianResponse hessian_response(const IntegralImage& ii, int filter_size)
{
    if (filter_size < 9 || filter_size % 2 == 0)
        throw std::invalid_argument("hessian_response: filter size must be odd and >= 9");
    if (filter_size > std::min(ii.width, ii.height))
        throw std::invalid_argument("hessian_response: filter larger than image");

    int lobe = filter_size / 3;
    if (lobe % 2 == 0)
        --lobe;
    const int border = filter_size / 2;
    const double inv_area = 1.0 / (static_cast<double>(filter_size) * filter_size * 255.0);

    HessianResponse out;
    out.width = ii.width;
    out.height = ii.height;
    out.filter_size = filter_size;
    out.det.assign(static_cast<std::size_t>(ii.width) * ii.height, 0.0f);

    // responses are left at zero inside the border band where box filters
    // would be truncated
    for (int y = border; y < ii.height - border; ++y) {
        for (int x = border; x < ii.width - border; ++x) {
            // Dyy: full (2*lobe-1) x (3*lobe) stack minus 3x the middle lobe
            const double dyy = (ii.rect_sum(x - lobe + 1, y - border, x + lobe, y + border + 1) -
                                3.0 * ii.rect_sum(x - lobe + 1, y - (lobe - 1) / 2,
                                                  x + lobe, y + (lobe - 1) / 2 + 1)) *
                               inv_area;
            const double dxx = (ii.rect_sum(x - border, y - lobe + 1, x + border + 1, y + lobe) -
                                3.0 * ii.rect_sum(x - (lobe - 1) / 2, y - lobe + 1,
                                                  x + (lobe - 1) / 2 + 1, y + lobe)) *
                               inv_area;
            const double dxy = (ii.rect_sum(x + 1, y - lobe, x + lobe + 1, y) +
                                ii.rect_sum(x - lobe, y + 1, x, y + lobe + 1) -
                                ii.rect_sum(x - lobe, y - lobe, x, y) -
                                ii.rect_sum(x + 1, y + 1, x + lobe + 1, y + lobe + 1)) *
                               inv_area;
            const double det = dxx * dyy - 0.81 * dxy * dxy;
            out.det[static_cast<std::size_t>(y) * ii.width + x] = static_cast<float>(det);
        }
    }
    return out;
}

namespace detail {

/* Haar response along x over a box of side `size` centered at (x, y). */
inline double haar_x(const IntegralImage& ii, int x, int y, int size)
{
    const int half = size / 2;
    return (ii.rect_sum(x, y - half, x + half, y + half) -
            ii.rect_sum(x - half, y - half, x, y + half)) /
           (static_cast<double>(size) * size * 0.5 * 255.0);
}

inline double haar_y(const IntegralImage& ii, int x, int y, int size)
{
    const int half = size / 2;
    return (ii.rect_sum(x - half, y, x + half, y + half) -
            ii.rect_sum(x - half, y - half, x + half, y)) /
           (static_cast<double>(size) * size * 0.5 * 255.0);
}

/* Dominant Haar direction via a pi/3 sliding window over a 6s circle. */
inline double surf_orientation(const IntegralImage& ii, double x, double y, double scale)
{
    const int s = std::max(1, static_cast<int>(std::lround(scale)));
    const int haar = 4 * s;
    std::vector<std::array<double, 3>> responses;  // angle, rx, ry
    responses.reserve(113);
    for (int i = -6; i <= 6; ++i) {
        for (int j = -6; j <= 6; ++j) {
            if (i * i + j * j > 36)
                continue;
            const int px = static_cast<int>(std::lround(x)) + j * s;
            const int py = static_cast<int>(std::lround(y)) + i * s;
            if (px - haar / 2 < 0 || px + haar / 2 >= ii.width || py - haar / 2 < 0 ||
                py + haar / 2 >= ii.height)
                continue;
            const double g = std::exp(-(static_cast<double>(i) * i + j * j) / 12.5);
            const double rx = g * haar_x(ii, px, py, haar);
            const double ry = g * haar_y(ii, px, py, haar);
            if (rx == 0.0 && ry == 0.0)
                continue;
            responses.push_back({std::atan2(ry, rx), rx, ry});
        }
    }
    if (responses.empty())
        return 0.0;

    double best_len = -1.0;
    double best_angle = 0.0;
    constexpr double window = kPi / 3.0;
    for (double ang = 0.0; ang < 2.0 * kPi; ang += 0.15) {
        double sx = 0.0, sy = 0.0;
        for (const auto& r : responses) {
            double diff = r[0] - ang;
            while (diff <= -kPi)
                diff += 2.0 * kPi;
            while (diff > kPi)
                diff -= 2.0 * kPi;
            if (diff >= 0.0 && diff < window) {
                sx += r[1];
                sy += r[2];
            }
        }
        const double len = sx * sx + sy * sy;
        if (len > best_len) {
            best_len = len;
            best_angle = std::atan2(sy, sx);
        }
    }
    return wrap_angle(best_angle);
}

}  // namespace detail

/*
 * Detects blob keypoints across `octaves` filter banks. Maxima must exceed
 * response_thresh and win a 3x3x3 neighborhood across position and adjacent
 * filter sizes; position and size are then refined by a quadratic fit.
 */
inline std::vector<Keypoint> detect_surf(const IntegralImage& ii, int octaves = 4,
                                         double response_thresh = 2e-4)
{
    octaves = std::clamp(octaves, 1, 4);
    std::map<int, HessianResponse> responses;
    const int min_dim = std::min(ii.width, ii.height);

    std::vector<Keypoint> kps;
    for (int o = 0; o < octaves; ++o) {
        const int* sizes = kSurfFilterSizes[o];
        if (sizes[3] > min_dim)
            break;
        for (int i = 0; i < 4; ++i)
            if (!responses.count(sizes[i]))
                responses.emplace(sizes[i], hessian_response(ii, sizes[i]));

        const int step = 1 << o;
        const int size_gap = sizes[1] - sizes[0];
        for (int level = 1; level <= 2; ++level) {
            const HessianResponse& prev = responses.at(sizes[level - 1]);
            const HessianResponse& cur = responses.at(sizes[level]);
            const HessianResponse& next = responses.at(sizes[level + 1]);
            const int margin = sizes[level + 1] / 2 + 1;

            for (int y = margin; y < ii.height - margin; y += step) {
                for (int x = margin; x < ii.width - margin; x += step) {
                    const float v = cur.at(x, y);
                    if (v <= response_thresh)
                        continue;
                    bool is_max = true;
                    for (int dy = -step; dy <= step && is_max; dy += step) {
                        for (int dx = -step; dx <= step && is_max; dx += step) {
                            if (prev.at(x + dx, y + dy) >= v ||
                                next.at(x + dx, y + dy) >= v ||
                                ((dx != 0 || dy != 0) && cur.at(x + dx, y + dy) >= v))
                                is_max = false;
                        }
                    }
                    if (!is_max)
                        continue;

                    // quadratic refinement over (x, y, size)
                    const double gx = 0.5 * (cur.at(x + step, y) - cur.at(x - step, y));
                    const double gy = 0.5 * (cur.at(x, y + step) - cur.at(x, y - step));
                    const double gs = 0.5 * (next.at(x, y) - prev.at(x, y));
                    const double hxx = cur.at(x + step, y) + cur.at(x - step, y) - 2.0 * v;
                    const double hyy = cur.at(x, y + step) + cur.at(x, y - step) - 2.0 * v;
                    const double hss = next.at(x, y) + prev.at(x, y) - 2.0 * v;
                    const double hxy =
                        0.25 * (cur.at(x + step, y + step) - cur.at(x - step, y + step) -
                                cur.at(x + step, y - step) + cur.at(x - step, y - step));
                    const double hxs = 0.25 * (next.at(x + step, y) - next.at(x - step, y) -
                                               prev.at(x + step, y) + prev.at(x - step, y));
                    const double hys = 0.25 * (next.at(x, y + step) - next.at(x, y - step) -
                                               prev.at(x, y + step) + prev.at(x, y - step));
                    const double hess[3][3] = {{hxx, hxy, hxs}, {hxy, hyy, hys}, {hxs, hys, hss}};
                    const double rhs[3] = {-gx, -gy, -gs};
                    double delta[3] = {0, 0, 0};
                    if (!detail::solve3(hess, rhs, delta))
                        continue;
                    if (std::abs(delta[0]) > 1.0 || std::abs(delta[1]) > 1.0 ||
                        std::abs(delta[2]) > 1.0)
                        continue;

                    Keypoint kp;
                    kp.x = x + delta[0] * step;
                    kp.y = y + delta[1] * step;
                    kp.scale = surf_scale_for_size(sizes[level] + delta[2] * size_gap);
                    kp.response = v;
                    kp.kind = KeypointKind::Lpsd;
                    kp.orientation = detail::surf_orientation(ii, kp.x, kp.y, kp.scale);
                    kps.push_back(kp);
                }
            }
        }
    }
    return dedup_keypoints(std::move(kps));
}

}  // namespace ecdc
