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

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <unordered_map>
#include <vector>

#include "ecdc/common.hpp"

namespace ecdc {

enum class KeypointKind { Sift, Lpsd };

struct Keypoint {
    double x = 0.0;
    double y = 0.0;
    double scale = 0.0;        // sigma in input-image pixels
    double orientation = 0.0;  // radians in [0, 2*pi)
    double response = 0.0;     // detector strength
    KeypointKind kind = KeypointKind::Sift;
};

struct Descriptor {
    Keypoint keypoint;
    std::vector<float> vector;  // unit L2 norm; 128 for SIFT, 64 for LPSD
};

inline double descriptor_sq_distance(const Descriptor& a, const Descriptor& b)
{
    double acc = 0.0;
    const std::size_t n = std::min(a.vector.size(), b.vector.size());
    for (std::size_t i = 0; i < n; ++i) {
        const double d = static_cast<double>(a.vector[i]) - b.vector[i];
        acc += d * d;
    }
    return acc;
}

inline bool keypoint_order(const Keypoint& a, const Keypoint& b)
{
    if (a.y != b.y)
        return a.y < b.y;
    if (a.x != b.x)
        return a.x < b.x;
    if (a.scale != b.scale)
        return a.scale < b.scale;
    return a.orientation < b.orientation;
}

/*
 * Drops keypoints closer than 2 px at (nearly) the same scale, keeping the
 * stronger response; prevents degenerate self-matches between re-detections.
 * Distinct orientations at one location are kept (multi-orientation points).
 */
inline std::vector<Keypoint> dedup_keypoints(std::vector<Keypoint> kps)
{
    std::sort(kps.begin(), kps.end(), [](const Keypoint& a, const Keypoint& b) {
        if (std::abs(a.response) != std::abs(b.response))
            return std::abs(a.response) > std::abs(b.response);
        return keypoint_order(a, b);
    });

    struct CellKey {
        long cx, cy;
        bool operator==(const CellKey&) const = default;
    };
    // 2 px cells: near-duplicates always land in the same or adjacent cell
    std::unordered_map<long long, std::vector<std::size_t>> grid;
    auto cell_id = [](long cx, long cy) {
        return (static_cast<long long>(cx) << 32) ^ (cy & 0xffffffffLL);
    };

    std::vector<Keypoint> kept;
    kept.reserve(kps.size());
    for (const Keypoint& kp : kps) {
        const long cx = static_cast<long>(std::floor(kp.x / 2.0));
        const long cy = static_cast<long>(std::floor(kp.y / 2.0));
        bool duplicate = false;
        for (long gy = cy - 1; gy <= cy + 1 && !duplicate; ++gy) {
            for (long gx = cx - 1; gx <= cx + 1 && !duplicate; ++gx) {
                auto it = grid.find(cell_id(gx, gy));
                if (it == grid.end())
                    continue;
                for (std::size_t idx : it->second) {
                    const Keypoint& other = kept[idx];
                    const double dx = kp.x - other.x;
                    const double dy = kp.y - other.y;
                    if (dx * dx + dy * dy >= 4.0)
                        continue;
                    const double ratio = kp.scale / other.scale;
                    if (ratio > 0.95 && ratio < 1.0 / 0.95 &&
                        std::abs(kp.orientation - other.orientation) < 1e-9) {
                        duplicate = true;
                        break;
                    }
                }
            }
        }
        if (!duplicate) {
            grid[cell_id(cx, cy)].push_back(kept.size());
            kept.push_back(kp);
        }
    }
    std::sort(kept.begin(), kept.end(), keypoint_order);
    return kept;
}

/* Keeps the `limit` strongest keypoints (by |response|); 0 means no cap. */
inline std::vector<Keypoint> cap_keypoints(std::vector<Keypoint> kps, std::size_t limit)
{
    if (limit == 0 || kps.size() <= limit)
        return kps;
    std::sort(kps.begin(), kps.end(), [](const Keypoint& a, const Keypoint& b) {
        if (std::abs(a.response) != std::abs(b.response))
            return std::abs(a.response) > std::abs(b.response);
        return keypoint_order(a, b);
    });
    kps.resize(limit);
    std::sort(kps.begin(), kps.end(), keypoint_order);
    return kps;
}

}  // namespace ecdc
