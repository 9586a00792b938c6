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

/* Gaussian scale space: blurred pyramid plus difference-of-Gaussian layers. */

#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "ecdc/image.hpp"

namespace ecdc {

/* Separable Gaussian blur, kernel truncated at 3 sigma, replicated borders. */
inline GrayImage gaussian_blur(const GrayImage& img, double sigma)
{
    if (sigma <= 0.0)
        return img;
    const int radius = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
    std::vector<double> kernel(2 * radius + 1);
    double sum = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        kernel[i + radius] = std::exp(-(static_cast<double>(i) * i) / (2.0 * sigma * sigma));
        sum += kernel[i + radius];
    }
    for (double& k : kernel)
        k /= sum;

    GrayImage tmp(img.width, img.height);
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            double acc = 0.0;
            for (int i = -radius; i <= radius; ++i) {
                const int sx = std::clamp(x + i, 0, img.width - 1);
                acc += kernel[i + radius] * img.at(sx, y);
            }
            tmp.at(x, y) = static_cast<float>(acc);
        }
    }
    GrayImage out(img.width, img.height);
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            double acc = 0.0;
            for (int i = -radius; i <= radius; ++i) {
                const int sy = std::clamp(y + i, 0, img.height - 1);
                acc += kernel[i + radius] * tmp.at(x, sy);
            }
            out.at(x, y) = static_cast<float>(acc);
        }
    }
    return out;
}

struct ScaleLevel {
    double sigma = 0.0;  // blur in octave coordinates
    GrayImage image;
};

struct ScaleOctave {
    int subsample = 1;  // pixel stride of this octave relative to the input
    std::vector<ScaleLevel> levels;
    std::vector<GrayImage> dog;  // dog[i] = levels[i + 1] - levels[i]
};

struct ScaleSpace {
    int scales_per_octave = 3;
    double k = 0.0;          // per-level sigma ratio, 2^(1/scales_per_octave)
    double base_sigma = 0.0;
    std::vector<ScaleOctave> octaves;
};

inline constexpr double kSiftBaseSigma = 1.6;
inline constexpr double kSiftAssumedInputSigma = 0.5;

/* min(4, floor(log2(min_dim / 16))), at least 1. */
inline int default_octave_count(const GrayImage& img)
{
    const int min_dim = std::min(img.width, img.height);
    int octaves = 0;
    while ((16 << (octaves + 1)) <= min_dim && octaves < 4)
        ++octaves;
    return std::max(1, octaves);
}

inline GrayImage downsample_by_two(const GrayImage& img)
{
    GrayImage out(std::max(1, img.width / 2), std::max(1, img.height / 2));
    for (int y = 0; y < out.height; ++y)
        for (int x = 0; x < out.width; ++x)
            out.at(x, y) = img.at(2 * x, 2 * y);
    return out;
}

inline ScaleSpace build_scale_space(const GrayImage& img, int octaves, int scales_per_octave)
{
    if (octaves < 1)
        throw std::invalid_argument("build_scale_space: octaves must be >= 1");
    if (scales_per_octave < 1)
        throw std::invalid_argument("build_scale_space: scales_per_octave must be >= 1");
    const int min_dim = std::min(img.width, img.height);
    if (min_dim < (8 << octaves))
        throw std::invalid_argument("build_scale_space: image too small for octave count");

    ScaleSpace ss;
    ss.scales_per_octave = scales_per_octave;
    ss.k = std::pow(2.0, 1.0 / scales_per_octave);
    ss.base_sigma = kSiftBaseSigma;
    ss.octaves.resize(octaves);

    const int levels = scales_per_octave + 3;
    for (int o = 0; o < octaves; ++o) {
        ScaleOctave& oct = ss.octaves[o];
        oct.subsample = 1 << o;
        oct.levels.resize(levels);

        if (o == 0) {
            // bring the input (assumed blur 0.5) up to the base sigma
            const double need = std::sqrt(std::max(
                0.01, kSiftBaseSigma * kSiftBaseSigma -
                          kSiftAssumedInputSigma * kSiftAssumedInputSigma));
            oct.levels[0].image = gaussian_blur(img, need);
        } else {
            // level `scales_per_octave` of the previous octave sits at 2x base sigma
            oct.levels[0].image =
                downsample_by_two(ss.octaves[o - 1].levels[scales_per_octave].image);
        }
        oct.levels[0].sigma = kSiftBaseSigma;

        for (int i = 1; i < levels; ++i) {
            const double sigma_prev = kSiftBaseSigma * std::pow(ss.k, i - 1);
            const double sigma_cur = sigma_prev * ss.k;
            const double inc = std::sqrt(sigma_cur * sigma_cur - sigma_prev * sigma_prev);
            oct.levels[i].image = gaussian_blur(oct.levels[i - 1].image, inc);
            oct.levels[i].sigma = sigma_cur;
        }

        oct.dog.resize(levels - 1);
        for (int i = 0; i + 1 < levels; ++i) {
            const GrayImage& a = oct.levels[i].image;
            const GrayImage& b = oct.levels[i + 1].image;
            GrayImage d(a.width, a.height);
            for (std::size_t p = 0; p < d.size(); ++p)
                d.data[p] = b.data[p] - a.data[p];
            oct.dog[i] = std::move(d);
        }
    }
    return ss;
}

}  // namespace ecdc
