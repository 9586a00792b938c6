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

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "ecdc/image.hpp"
#include "ecdc/image_io.hpp"

namespace ecdc {

/* Per-pixel boolean tamper map; true marks a detected (or planted) pixel. */
struct CoverageMask {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> data;

    CoverageMask() = default;
    CoverageMask(int w, int h, bool fill = false)
        : width(w), height(h), data(static_cast<std::size_t>(w) * h, fill ? 1 : 0)
    {
        if (w <= 0 || h <= 0)
            throw std::invalid_argument("CoverageMask: dimensions must be positive");
    }

    bool at(int x, int y) const { return data[static_cast<std::size_t>(y) * width + x] != 0; }
    void set(int x, int y, bool v) { data[static_cast<std::size_t>(y) * width + x] = v ? 1 : 0; }
    bool in_bounds(int x, int y) const { return x >= 0 && x < width && y >= 0 && y < height; }

    std::size_t count() const
    {
        std::size_t n = 0;
        for (std::uint8_t v : data)
            n += v != 0;
        return n;
    }
    bool any() const { return count() > 0; }

    bool operator==(const CoverageMask& other) const
    {
        return width == other.width && height == other.height && data == other.data;
    }
};

/* Marks pixels whose integer centers lie within `radius` of (cx, cy). */
inline void paint_disk(CoverageMask& mask, double cx, double cy, double radius)
{
    const double r2 = radius * radius;
    const int y_lo = std::max(0, static_cast<int>(std::ceil(cy - radius)));
    const int y_hi = std::min(mask.height - 1, static_cast<int>(std::floor(cy + radius)));
    const int x_lo = std::max(0, static_cast<int>(std::ceil(cx - radius)));
    const int x_hi = std::min(mask.width - 1, static_cast<int>(std::floor(cx + radius)));
    for (int py = y_lo; py <= y_hi; ++py) {
        const double dy = py - cy;
        for (int px = x_lo; px <= x_hi; ++px) {
            const double dx = px - cx;
            if (dx * dx + dy * dy <= r2)
                mask.set(px, py, true);
        }
    }
}

namespace detail {

inline std::vector<std::pair<int, int>> disk_offsets(int radius)
{
    std::vector<std::pair<int, int>> out;
    for (int dy = -radius; dy <= radius; ++dy)
        for (int dx = -radius; dx <= radius; ++dx)
            if (dx * dx + dy * dy <= radius * radius)
                out.emplace_back(dx, dy);
    return out;
}

}  // namespace detail

/*
 * Morphological closing with a disk structuring element. Dilation treats
 * out-of-frame pixels as background and erosion treats them as foreground
 * (the usual padding pair), so closing never shrinks the input.
 */
inline CoverageMask morph_refine(const CoverageMask& mask, int disk_radius)
{
    if (disk_radius < 1)
        throw std::invalid_argument("morph_refine: disk radius must be >= 1");
    const auto offsets = detail::disk_offsets(disk_radius);

    CoverageMask dilated(mask.width, mask.height, false);
    for (int y = 0; y < mask.height; ++y) {
        for (int x = 0; x < mask.width; ++x) {
            if (!mask.at(x, y))
                continue;
            for (const auto& [dx, dy] : offsets) {
                const int px = x + dx;
                const int py = y + dy;
                if (dilated.in_bounds(px, py))
                    dilated.set(px, py, true);
            }
        }
    }

    CoverageMask closed(mask.width, mask.height, false);
    for (int y = 0; y < mask.height; ++y) {
        for (int x = 0; x < mask.width; ++x) {
            bool all = true;
            for (const auto& [dx, dy] : offsets) {
                const int px = x + dx;
                const int py = y + dy;
                if (dilated.in_bounds(px, py) && !dilated.at(px, py)) {
                    all = false;
                    break;
                }
            }
            closed.set(x, y, all);
        }
    }
    return closed;
}

/* 8-bit single-channel PNG: 255 = forged, 0 = clean. */
inline void save_mask_png(const std::string& path, const CoverageMask& mask)
{
    GrayImage img(mask.width, mask.height, 0.0f);
    for (std::size_t i = 0; i < mask.data.size(); ++i)
        img.data[i] = mask.data[i] ? 255.0f : 0.0f;
    save_png_gray(path, img);
}

/* Any nonzero luminance counts as forged. */
inline CoverageMask load_mask_png(const std::string& path)
{
    const GrayImage img = load_grayscale(path);
    CoverageMask mask(img.width, img.height, false);
    for (std::size_t i = 0; i < img.size(); ++i)
        mask.data[i] = img.data[i] > 127.5f ? 1 : 0;
    return mask;
}

}  // namespace ecdc
