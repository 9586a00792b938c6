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
 * SIFT keypoints: difference-of-Gaussian extrema with subpixel refinement,
 * contrast/edge rejection, orientation histograms, and the 4x4x8 gradient
 * descriptor.
 */

#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <vector>

#include "ecdc/keypoint.hpp"
#include "ecdc/scale_space.hpp"

namespace ecdc {

struct GradientMagOrient {
    double magnitude = 0.0;
    double orientation = 0.0;  // radians in [0, 2*pi)
};

/* Central-difference gradient; requires the full 4-neighborhood in bounds. */
inline GradientMagOrient gradient_mag_orient(const GrayImage& level, int x, int y)
{
    if (x < 1 || y < 1 || x > level.width - 2 || y > level.height - 2)
        throw std::invalid_argument("gradient_mag_orient: 4-neighborhood out of bounds");
    const double dx = static_cast<double>(level.at(x + 1, y)) - level.at(x - 1, y);
    const double dy = static_cast<double>(level.at(x, y + 1)) - level.at(x, y - 1);
    GradientMagOrient g;
    g.magnitude = std::sqrt(dx * dx + dy * dy);
    g.orientation = g.magnitude > 0.0 ? wrap_angle(std::atan2(dy, dx)) : 0.0;
    return g;
}

namespace detail {

inline bool is_dog_extremum(const ScaleOctave& oct, int d, int x, int y)
{
    const float v = oct.dog[d].at(x, y);
    const bool maximum = v > 0;
    for (int dd = -1; dd <= 1; ++dd) {
        const GrayImage& layer = oct.dog[d + dd];
        for (int dy = -1; dy <= 1; ++dy) {
            for (int dx = -1; dx <= 1; ++dx) {
                if (dd == 0 && dy == 0 && dx == 0)
                    continue;
                const float n = layer.at(x + dx, y + dy);
                if (maximum ? (n >= v) : (n <= v))
                    return false;
            }
        }
    }
    return true;
}

struct OrientationHistogram {
    std::array<double, 36> bins{};
};

inline std::vector<double> dominant_orientations(const GrayImage& level, int x, int y,
                                                 double sigma_oct)
{
    constexpr int kBins = 36;
    std::array<double, kBins> hist{};
    const double sig = 1.5 * sigma_oct;
    const int radius = std::max(1, static_cast<int>(std::lround(3.0 * sig)));
    const double denom = 2.0 * sig * sig;

    for (int i = -radius; i <= radius; ++i) {
        const int py = y + i;
        if (py < 1 || py > level.height - 2)
            continue;
        for (int j = -radius; j <= radius; ++j) {
            const int px = x + j;
            if (px < 1 || px > level.width - 2)
                continue;
            const double gdx = static_cast<double>(level.at(px + 1, py)) - level.at(px - 1, py);
            const double gdy = static_cast<double>(level.at(px, py + 1)) - level.at(px, py - 1);
            const double mag = std::sqrt(gdx * gdx + gdy * gdy);
            if (mag <= 0.0)
                continue;
            const double theta = wrap_angle(std::atan2(gdy, gdx));
            const double w = std::exp(-(static_cast<double>(i) * i + j * j) / denom);
            int bin = static_cast<int>(theta / (2.0 * kPi) * kBins);
            if (bin >= kBins)
                bin = 0;
            hist[bin] += w * mag;
        }
    }

    // two passes of circular [1 4 6 4 1]/16 smoothing
    for (int pass = 0; pass < 2; ++pass) {
        std::array<double, kBins> s{};
        for (int b = 0; b < kBins; ++b) {
            s[b] = (hist[(b + kBins - 2) % kBins] + hist[(b + 2) % kBins]) * (1.0 / 16.0) +
                   (hist[(b + kBins - 1) % kBins] + hist[(b + 1) % kBins]) * (4.0 / 16.0) +
                   hist[b] * (6.0 / 16.0);
        }
        hist = s;
    }

    double peak = 0.0;
    for (double v : hist)
        peak = std::max(peak, v);
    std::vector<double> out;
    if (peak <= 0.0)
        return out;
    const double floor_val = 0.8 * peak;
    for (int b = 0; b < kBins; ++b) {
        const double l = hist[(b + kBins - 1) % kBins];
        const double r = hist[(b + 1) % kBins];
        const double c = hist[b];
        if (c < floor_val || c <= l || c <= r)
            continue;
        const double denom_p = l - 2.0 * c + r;
        const double offset = denom_p != 0.0 ? 0.5 * (l - r) / denom_p : 0.0;
        out.push_back(wrap_angle((b + 0.5 + offset) * 2.0 * kPi / kBins));
    }
    return out;
}

}  // namespace detail

/*
 * Finds 26-neighborhood DoG extrema, refines them with an iterated 3-D
 * quadratic fit, rejects low-contrast and edge-like points, and assigns one
 * keypoint per dominant orientation peak.
 */
inline std::vector<Keypoint> detect_sift(const ScaleSpace& ss, double contrast_thresh = 0.03,
                                         double edge_thresh = 10.0)
{
    std::vector<Keypoint> kps;
    // the [0, 1]-scale contrast threshold is spread over the octave's layers
    const double peak_thresh = contrast_thresh * 255.0 / ss.scales_per_octave;
    const double edge_limit =
        (edge_thresh + 1.0) * (edge_thresh + 1.0) / edge_thresh;

    for (const ScaleOctave& oct : ss.octaves) {
        if (oct.dog.size() < 3)
            continue;
        const int w = oct.dog[0].width;
        const int h = oct.dog[0].height;
        const int n_dog = static_cast<int>(oct.dog.size());

        for (int d = 1; d + 1 < n_dog; ++d) {
            for (int y = 1; y + 1 < h; ++y) {
                for (int x = 1; x + 1 < w; ++x) {
                    if (std::abs(oct.dog[d].at(x, y)) < 0.5 * peak_thresh)
                        continue;
                    if (!detail::is_dog_extremum(oct, d, x, y))
                        continue;

                    // iterated subpixel refinement in (x, y, scale)
                    int cx = x, cy = y, cd = d;
                    double delta[3] = {0, 0, 0};
                    double d_hat = 0.0;
                    bool converged = false;
                    for (int iter = 0; iter < 5; ++iter) {
                        const GrayImage& cur = oct.dog[cd];
                        const GrayImage& prev = oct.dog[cd - 1];
                        const GrayImage& next = oct.dog[cd + 1];
                        const double v = cur.at(cx, cy);
                        const double gx = 0.5 * (cur.at(cx + 1, cy) - cur.at(cx - 1, cy));
                        const double gy = 0.5 * (cur.at(cx, cy + 1) - cur.at(cx, cy - 1));
                        const double gs = 0.5 * (next.at(cx, cy) - prev.at(cx, cy));
                        const double hxx = cur.at(cx + 1, cy) + cur.at(cx - 1, cy) - 2.0 * v;
                        const double hyy = cur.at(cx, cy + 1) + cur.at(cx, cy - 1) - 2.0 * v;
                        const double hss = next.at(cx, cy) + prev.at(cx, cy) - 2.0 * v;
                        const double hxy = 0.25 * (cur.at(cx + 1, cy + 1) - cur.at(cx - 1, cy + 1) -
                                                   cur.at(cx + 1, cy - 1) + cur.at(cx - 1, cy - 1));
                        const double hxs = 0.25 * (next.at(cx + 1, cy) - next.at(cx - 1, cy) -
                                                   prev.at(cx + 1, cy) + prev.at(cx - 1, cy));
                        const double hys = 0.25 * (next.at(cx, cy + 1) - next.at(cx, cy - 1) -
                                                   prev.at(cx, cy + 1) + prev.at(cx, cy - 1));
                        const double hess[3][3] = {{hxx, hxy, hxs}, {hxy, hyy, hys}, {hxs, hys, hss}};
                        const double rhs[3] = {-gx, -gy, -gs};
                        if (!detail::solve3(hess, rhs, delta))
                            break;
                        if (std::abs(delta[0]) < 0.5 && std::abs(delta[1]) < 0.5 &&
                            std::abs(delta[2]) < 0.5) {
                            d_hat = v + 0.5 * (gx * delta[0] + gy * delta[1] + gs * delta[2]);
                            converged = true;
                            break;
                        }
                        cx += delta[0] > 0.5 ? 1 : (delta[0] < -0.5 ? -1 : 0);
                        cy += delta[1] > 0.5 ? 1 : (delta[1] < -0.5 ? -1 : 0);
                        cd += delta[2] > 0.5 ? 1 : (delta[2] < -0.5 ? -1 : 0);
                        if (cx < 1 || cx > w - 2 || cy < 1 || cy > h - 2 || cd < 1 ||
                            cd > n_dog - 2)
                            break;
                    }
                    if (!converged || std::abs(d_hat) < peak_thresh)
                        continue;

                    // edge-response test on the spatial 2x2 Hessian
                    {
                        const GrayImage& cur = oct.dog[cd];
                        const double v = cur.at(cx, cy);
                        const double dxx = cur.at(cx + 1, cy) + cur.at(cx - 1, cy) - 2.0 * v;
                        const double dyy = cur.at(cx, cy + 1) + cur.at(cx, cy - 1) - 2.0 * v;
                        const double dxy =
                            0.25 * (cur.at(cx + 1, cy + 1) - cur.at(cx - 1, cy + 1) -
                                    cur.at(cx + 1, cy - 1) + cur.at(cx - 1, cy - 1));
                        const double tr = dxx + dyy;
                        const double det = dxx * dyy - dxy * dxy;
                        if (det <= 0.0 || tr * tr / det >= edge_limit)
                            continue;
                    }

                    const double sigma_oct =
                        ss.base_sigma * std::pow(ss.k, static_cast<double>(cd) + delta[2]);
                    const int grad_level =
                        std::clamp(cd, 1, static_cast<int>(oct.levels.size()) - 2);
                    const auto orientations = detail::dominant_orientations(
                        oct.levels[grad_level].image, cx, cy, sigma_oct);
                    for (double theta : orientations) {
                        Keypoint kp;
                        kp.x = (cx + delta[0]) * oct.subsample;
                        kp.y = (cy + delta[1]) * oct.subsample;
                        kp.scale = sigma_oct * oct.subsample;
                        kp.orientation = theta;
                        kp.response = std::abs(d_hat);
                        kp.kind = KeypointKind::Sift;
                        kps.push_back(kp);
                    }
                }
            }
        }
    }
    return dedup_keypoints(std::move(kps));
}

/*
 * 4x4 spatial grid x 8 orientation bins in the keypoint frame, trilinear
 * scatter, 0.2 clamp, unit normalization. Keypoints whose (rotation-safe)
 * support window leaves the raster are dropped.
 */
inline std::optional<Descriptor> describe_sift(const Keypoint& kp, const ScaleSpace& ss)
{
    constexpr int kGrid = 4;
    constexpr int kBins = 8;

    const int n_oct = static_cast<int>(ss.octaves.size());
    int o = static_cast<int>(std::floor(std::log2(kp.scale / ss.base_sigma)));
    o = std::clamp(o, 0, n_oct - 1);
    const ScaleOctave& oct = ss.octaves[o];
    const double sigma_oct = kp.scale / oct.subsample;

    const double level_f = std::log(sigma_oct / ss.base_sigma) / std::log(ss.k);
    const int level = std::clamp(static_cast<int>(std::lround(level_f)), 0,
                                 static_cast<int>(oct.levels.size()) - 1);
    const GrayImage& L = oct.levels[level].image;

    const double x_oct = kp.x / oct.subsample;
    const double y_oct = kp.y / oct.subsample;
    const double hist_width = 3.0 * sigma_oct;
    const double radius = hist_width * std::sqrt(2.0) * (kGrid + 1) * 0.5;

    if (x_oct - radius < 1.0 || x_oct + radius > L.width - 2.0 || y_oct - radius < 1.0 ||
        y_oct + radius > L.height - 2.0)
        return std::nullopt;

    const double cos_t = std::cos(kp.orientation);
    const double sin_t = std::sin(kp.orientation);
    const int xi = static_cast<int>(std::lround(x_oct));
    const int yi = static_cast<int>(std::lround(y_oct));
    const int r = static_cast<int>(std::lround(radius));

    double hist[kGrid][kGrid][kBins] = {};
    const double bins_per_rad = kBins / (2.0 * kPi);

    for (int i = -r; i <= r; ++i) {
        for (int j = -r; j <= r; ++j) {
            const double x_rot = (j * cos_t + i * sin_t) / hist_width;
            const double y_rot = (-j * sin_t + i * cos_t) / hist_width;
            const double rbin = y_rot + kGrid / 2.0 - 0.5;
            const double cbin = x_rot + kGrid / 2.0 - 0.5;
            if (rbin <= -1.0 || rbin >= kGrid || cbin <= -1.0 || cbin >= kGrid)
                continue;
            const int px = xi + j;
            const int py = yi + i;
            if (px < 1 || px > L.width - 2 || py < 1 || py > L.height - 2)
                continue;
            const double gdx = static_cast<double>(L.at(px + 1, py)) - L.at(px - 1, py);
            const double gdy = static_cast<double>(L.at(px, py + 1)) - L.at(px, py - 1);
            const double mag = std::sqrt(gdx * gdx + gdy * gdy);
            if (mag <= 0.0)
                continue;
            const double theta = wrap_angle(std::atan2(gdy, gdx) - kp.orientation);
            const double obin = theta * bins_per_rad;
            const double weight =
                std::exp(-(x_rot * x_rot + y_rot * y_rot) / (0.5 * kGrid * kGrid)) * mag;

            int r0 = static_cast<int>(std::floor(rbin));
            int c0 = static_cast<int>(std::floor(cbin));
            int o0 = static_cast<int>(std::floor(obin));
            const double dr = rbin - r0;
            const double dc = cbin - c0;
            const double dob = obin - o0;
            o0 %= kBins;

            for (int ir = 0; ir <= 1; ++ir) {
                const int rr = r0 + ir;
                if (rr < 0 || rr >= kGrid)
                    continue;
                const double wr = weight * (ir ? dr : 1.0 - dr);
                for (int ic = 0; ic <= 1; ++ic) {
                    const int cc = c0 + ic;
                    if (cc < 0 || cc >= kGrid)
                        continue;
                    const double wc = wr * (ic ? dc : 1.0 - dc);
                    hist[rr][cc][o0 % kBins] += wc * (1.0 - dob);
                    hist[rr][cc][(o0 + 1) % kBins] += wc * dob;
                }
            }
        }
    }

    std::vector<float> vec(kGrid * kGrid * kBins);
    int idx = 0;
    for (int rr = 0; rr < kGrid; ++rr)
        for (int cc = 0; cc < kGrid; ++cc)
            for (int b = 0; b < kBins; ++b)
                vec[idx++] = static_cast<float>(hist[rr][cc][b]);

    double norm = 0.0;
    for (float v : vec)
        norm += static_cast<double>(v) * v;
    norm = std::sqrt(norm);
    if (norm < 1e-12)
        return std::nullopt;
    for (float& v : vec)
        v = std::min(v / static_cast<float>(norm), 0.2f);
    norm = 0.0;
    for (float v : vec)
        norm += static_cast<double>(v) * v;
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

}  // namespace ecdc
