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
 * Luminance rasters and the shared sampling primitives: summed-area tables
 * for O(1) box sums and circular-domain extraction around subpixel centers.
 */

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "ecdc/common.hpp"

namespace ecdc {

/* Row-major luminance raster, values in [0, 255]. */
struct GrayImage {
    int width = 0;
    int height = 0;
    std::vector<float> data;

    GrayImage() = default;
    GrayImage(int w, int h, float fill = 0.0f)
        : width(w), height(h), data(static_cast<std::size_t>(w) * h, fill)
    {
        if (w <= 0 || h <= 0)
            throw std::invalid_argument("GrayImage: dimensions must be positive");
    }

    float at(int x, int y) const { return data[static_cast<std::size_t>(y) * width + x]; }
    float& at(int x, int y) { return data[static_cast<std::size_t>(y) * width + x]; }
    bool in_bounds(int x, int y) const { return x >= 0 && x < width && y >= 0 && y < height; }
    bool empty() const { return data.empty(); }
    std::size_t size() const { return data.size(); }
};

/* Bilinear sample with clamp-to-edge semantics. */
inline float sample_bilinear(const GrayImage& img, double x, double y)
{
    x = std::clamp(x, 0.0, static_cast<double>(img.width - 1));
    y = std::clamp(y, 0.0, static_cast<double>(img.height - 1));
    const int x0 = static_cast<int>(x);
    const int y0 = static_cast<int>(y);
    const int x1 = std::min(x0 + 1, img.width - 1);
    const int y1 = std::min(y0 + 1, img.height - 1);
    const double fx = x - x0;
    const double fy = y - y0;
    const double top = img.at(x0, y0) * (1.0 - fx) + img.at(x1, y0) * fx;
    const double bot = img.at(x0, y1) * (1.0 - fx) + img.at(x1, y1) * fx;
    return static_cast<float>(top * (1.0 - fy) + bot * fy);
}

inline GrayImage resize_bilinear(const GrayImage& img, int new_w, int new_h)
{
    if (new_w <= 0 || new_h <= 0)
        throw std::invalid_argument("resize_bilinear: target dimensions must be positive");
    GrayImage out(new_w, new_h);
    const double sx = static_cast<double>(img.width) / new_w;
    const double sy = static_cast<double>(img.height) / new_h;
    for (int y = 0; y < new_h; ++y) {
        const double src_y = (y + 0.5) * sy - 0.5;
        for (int x = 0; x < new_w; ++x) {
            const double src_x = (x + 0.5) * sx - 0.5;
            out.at(x, y) = sample_bilinear(img, src_x, src_y);
        }
    }
    return out;
}

/* Rotates about the raster center; out-of-range samples clamp to the edge. */
inline GrayImage rotate_about_center(const GrayImage& img, double degrees)
{
    GrayImage out(img.width, img.height);
    const double cx = (img.width - 1) / 2.0;
    const double cy = (img.height - 1) / 2.0;
    const double rad = deg_to_rad(degrees);
    const double c = std::cos(rad);
    const double s = std::sin(rad);
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            const double dx = x - cx;
            const double dy = y - cy;
            // inverse rotation of the output grid
            const double sx = cx + c * dx + s * dy;
            const double sy = cy - s * dx + c * dy;
            out.at(x, y) = sample_bilinear(img, sx, sy);
        }
    }
    return out;
}

/*
 * Summed-area table over a GrayImage; entry (x, y) holds the sum of all
 * pixels strictly above and left of it, so any rectangle sum needs 4 reads.
 */
struct IntegralImage {
    int width = 0;   // source raster width
    int height = 0;  // source raster height
    std::vector<double> table;  // (width + 1) x (height + 1)

    double entry(int x, int y) const
    {
        return table[static_cast<std::size_t>(y) * (width + 1) + x];
    }

    /* Sum over [x0, x1) x [y0, y1). Coordinates are clamped to the raster. */
    double rect_sum(int x0, int y0, int x1, int y1) const
    {
        x0 = std::clamp(x0, 0, width);
        x1 = std::clamp(x1, 0, width);
        y0 = std::clamp(y0, 0, height);
        y1 = std::clamp(y1, 0, height);
        if (x0 >= x1 || y0 >= y1)
            return 0.0;
        return entry(x1, y1) - entry(x0, y1) - entry(x1, y0) + entry(x0, y0);
    }
};

inline IntegralImage integral(const GrayImage& img)
{
    IntegralImage ii;
    ii.width = img.width;
    ii.height = img.height;
    ii.table.assign(static_cast<std::size_t>(img.width + 1) * (img.height + 1), 0.0);
    for (int y = 0; y < img.height; ++y) {
        double row = 0.0;
        for (int x = 0; x < img.width; ++x) {
            row += img.at(x, y);
            ii.table[static_cast<std::size_t>(y + 1) * (img.width + 1) + (x + 1)] =
                ii.table[static_cast<std::size_t>(y) * (img.width + 1) + (x + 1)] + row;
        }
    }
    return ii;
}

struct DiskPixel {
    float dx = 0.0f;  // pixel center minus disk center
    float dy = 0.0f;
    float value = 0.0f;
};

/* In-bounds pixels whose integer centers fall within `radius` of the center. */
struct DiskSample {
    double cx = 0.0;
    double cy = 0.0;
    double radius = 0.0;
    std::vector<DiskPixel> pixels;
    double mean = 0.0;
    double variance = 0.0;  // population variance of the sampled values
};

inline DiskSample sample_disk(const GrayImage& img, double cx, double cy, double radius)
{
    if (radius <= 0.0)
        throw std::invalid_argument("sample_disk: radius must be positive");
    if (cx < 0.0 || cy < 0.0 || cx > img.width - 1 || cy > img.height - 1)
        throw std::invalid_argument("sample_disk: center outside image");

    DiskSample out;
    out.cx = cx;
    out.cy = cy;
    out.radius = radius;

    const double r2 = radius * radius;
    const int y_lo = std::max(0, static_cast<int>(std::ceil(cy - radius)));
    const int y_hi = std::min(img.height - 1, static_cast<int>(std::floor(cy + radius)));
    double sum = 0.0;
    double sum_sq = 0.0;
    out.pixels.reserve(static_cast<std::size_t>(r2 * kPi) + 8);
    for (int py = y_lo; py <= y_hi; ++py) {
        const double dy = py - cy;
        const int x_lo = std::max(0, static_cast<int>(std::ceil(cx - radius)));
        const int x_hi = std::min(img.width - 1, static_cast<int>(std::floor(cx + radius)));
        for (int px = x_lo; px <= x_hi; ++px) {
            const double dx = px - cx;
            if (dx * dx + dy * dy > r2)
                continue;
            const float v = img.at(px, py);
            out.pixels.push_back({static_cast<float>(dx), static_cast<float>(dy), v});
            sum += v;
            sum_sq += static_cast<double>(v) * v;
        }
    }
    if (!out.pixels.empty()) {
        const double n = static_cast<double>(out.pixels.size());
        out.mean = sum / n;
        out.variance = std::max(0.0, sum_sq / n - out.mean * out.mean);
    }
    return out;
}

}  // namespace ecdc
