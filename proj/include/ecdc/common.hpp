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

#include <cmath>
#include <stdexcept>
#include <string>

namespace ecdc {

/* Raised when an input file cannot be decoded as a raster image. */
class DecodeError : public std::runtime_error {
public:
    explicit DecodeError(const std::string& what) : std::runtime_error(what) {}
};

struct Point {
    double x = 0.0;
    double y = 0.0;
};

inline double distance(const Point& a, const Point& b)
{
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    return std::sqrt(dx * dx + dy * dy);
}

inline constexpr double kPi = 3.14159265358979323846;

inline double deg_to_rad(double deg) { return deg * kPi / 180.0; }

namespace detail {

/* Solves a 3x3 linear system by Cramer's rule; false if near-singular. */
inline bool solve3(const double a[3][3], const double b[3], double out[3])
{
    const double det = a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) -
                       a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0]) +
                       a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
    if (std::abs(det) < 1e-12)
        return false;
    const double inv = 1.0 / det;
    out[0] = inv * (b[0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) -
                    a[0][1] * (b[1] * a[2][2] - a[1][2] * b[2]) +
                    a[0][2] * (b[1] * a[2][1] - a[1][1] * b[2]));
    out[1] = inv * (a[0][0] * (b[1] * a[2][2] - a[1][2] * b[2]) -
                    b[0] * (a[1][0] * a[2][2] - a[1][2] * a[2][0]) +
                    a[0][2] * (a[1][0] * b[2] - b[1] * a[2][0]));
    out[2] = inv * (a[0][0] * (a[1][1] * b[2] - b[1] * a[2][1]) -
                    a[0][1] * (a[1][0] * b[2] - b[1] * a[2][0]) +
                    b[0] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]));
    return true;
}

}  // namespace detail

/* Maps an angle to [0, 2*pi). */
inline double wrap_angle(double rad)
{
    const double two_pi = 2.0 * kPi;
    double a = std::fmod(rad, two_pi);
    if (a < 0.0)
        a += two_pi;
    if (a >= two_pi)
        a = 0.0;
    return a;
}

}  // namespace ecdc
