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
 * Rotation-robust block features over circular domains: polar complex
 * exponential transform (PCET) moment magnitudes, and the largest singular
 * value of the orthonormal 2-D DCT coefficient matrix of the disk's bounding
 * square. Similarity thresholds adapt to the variance difference between
 * the two compared domains.
 */

#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "ecdc/image.hpp"

namespace ecdc {

enum class FeatureMode { Dct, Pcet };

/* |M_{n,l}| for n, l in 0..max_order, row-major by n. */
struct PcetFeature {
    int max_order = 3;
    std::vector<double> magnitudes;
};

struct DctLambda {
    double lambda = 0.0;    // largest singular value of the DCT matrix
    double variance = 0.0;  // intensity variance of the domain on the sigma scale
};

/*
 * PCET moments over a disk normalized to unit radius:
 *   M_{n,l} = (1/pi) * sum f(r, theta) exp(-i 2 pi n r^2) exp(-i l theta) dA
 * with dA = 1/R^2 per source pixel. Magnitudes are rotation invariant.
 */
inline PcetFeature compute_pcet(const DiskSample& disk, int max_order = 3)
{
    if (disk.pixels.size() < 4)
        throw std::invalid_argument("compute_pcet: degenerate disk");
    if (max_order < 0)
        throw std::invalid_argument("compute_pcet: order must be non-negative");

    const int orders = max_order + 1;
    std::vector<std::complex<double>> moments(static_cast<std::size_t>(orders) * orders,
                                              {0.0, 0.0});
    const double inv_r2 = 1.0 / (disk.radius * disk.radius);

    std::vector<std::complex<double>> radial(orders);
    std::vector<std::complex<double>> angular(orders);
    for (const DiskPixel& px : disk.pixels) {
        const double rr = (static_cast<double>(px.dx) * px.dx + static_cast<double>(px.dy) * px.dy) *
                          inv_r2;  // r^2 on the unit disk
        const double phase = -2.0 * kPi * rr;
        const std::complex<double> er(std::cos(phase), std::sin(phase));
        const double r = std::sqrt(rr);
        std::complex<double> et(1.0, 0.0);
        if (r > 0.0)
            et = {px.dx / (r * disk.radius), -px.dy / (r * disk.radius)};  // exp(-i theta)

        radial[0] = {1.0, 0.0};
        angular[0] = {1.0, 0.0};
        for (int k = 1; k < orders; ++k) {
            radial[k] = radial[k - 1] * er;
            angular[k] = angular[k - 1] * et;
        }
        const double f = px.value * inv_r2;
        for (int n = 0; n < orders; ++n)
            for (int l = 0; l < orders; ++l)
                moments[static_cast<std::size_t>(n) * orders + l] += f * radial[n] * angular[l];
    }

    PcetFeature out;
    out.max_order = max_order;
    out.magnitudes.resize(moments.size());
    for (std::size_t i = 0; i < moments.size(); ++i)
        out.magnitudes[i] = std::abs(moments[i]) / kPi;
    return out;
}

inline double pcet_distance(const PcetFeature& a, const PcetFeature& b)
{
    if (a.magnitudes.size() != b.magnitudes.size())
        throw std::invalid_argument("pcet_distance: order mismatch");
    double acc = 0.0;
    for (std::size_t i = 0; i < a.magnitudes.size(); ++i) {
        const double d = a.magnitudes[i] - b.magnitudes[i];
        acc += d * d;
    }
    return std::sqrt(acc);
}

namespace detail {

/* Largest singular value via power iteration on F^T F. */
inline double max_singular_value(const std::vector<double>& f, int n)
{
    std::vector<double> v(n), fv(n), ftfv(n);
    // mildly asymmetric start vector so symmetric blocks cannot begin
    // orthogonal to the dominant singular direction
    double v_norm = 0.0;
    for (int j = 0; j < n; ++j) {
        v[j] = 1.0 + 1e-3 * j;
        v_norm += v[j] * v[j];
    }
    v_norm = std::sqrt(v_norm);
    for (double& x : v)
        x /= v_norm;
    double lambda = 0.0;
    for (int iter = 0; iter < 200; ++iter) {
        for (int i = 0; i < n; ++i) {
            double acc = 0.0;
            for (int j = 0; j < n; ++j)
                acc += f[static_cast<std::size_t>(i) * n + j] * v[j];
            fv[i] = acc;
        }
        for (int j = 0; j < n; ++j) {
            double acc = 0.0;
            for (int i = 0; i < n; ++i)
                acc += f[static_cast<std::size_t>(i) * n + j] * fv[i];
            ftfv[j] = acc;
        }
        double norm = 0.0;
        for (double x : ftfv)
            norm += x * x;
        norm = std::sqrt(norm);
        if (norm < 1e-300)
            return 0.0;
        double fv_norm = 0.0;
        for (double x : fv)
            fv_norm += x * x;
        const double next = std::sqrt(fv_norm);
        for (int j = 0; j < n; ++j)
            v[j] = ftfv[j] / norm;
        if (iter > 2 && std::abs(next - lambda) <= 1e-12 * std::max(1.0, next)) {
            lambda = next;
            break;
        }
        lambda = next;
    }
    return lambda;
}

}  // namespace detail

/*
 * Largest singular value of the orthonormal DCT-II matrix of the square of
 * side 2*floor(radius)+1 around `center`. Pixels outside the inscribed disk
 * or outside the image contribute zero. Variance is computed over the
 * in-disk, in-bounds pixels with intensities divided by sigma_scale.
 */
inline DctLambda compute_dct_lambda(const GrayImage& img, Point center, double radius,
                                    double sigma_scale = 1.0)
{
    if (radius < 1.0)
        throw std::invalid_argument("compute_dct_lambda: radius must be >= 1");
    const int half = static_cast<int>(std::floor(radius));
    const int n = 2 * half + 1;
    const int cx = static_cast<int>(std::lround(center.x));
    const int cy = static_cast<int>(std::lround(center.y));
    if (cx + half < 0 || cx - half >= img.width || cy + half < 0 || cy - half >= img.height)
        throw std::invalid_argument("compute_dct_lambda: block outside image");

    std::vector<double> block(static_cast<std::size_t>(n) * n, 0.0);
    const double r2 = radius * radius;
    double sum = 0.0, sum_sq = 0.0;
    long count = 0;
    for (int i = 0; i < n; ++i) {
        const int py = cy - half + i;
        for (int j = 0; j < n; ++j) {
            const int px = cx - half + j;
            const double dx = px - center.x;
            const double dy = py - center.y;
            if (dx * dx + dy * dy > r2 || !img.in_bounds(px, py))
                continue;
            const double v = img.at(px, py);
            block[static_cast<std::size_t>(i) * n + j] = v;
            sum += v;
            sum_sq += v * v;
            ++count;
        }
    }

    // orthonormal DCT-II basis
    std::vector<double> basis(static_cast<std::size_t>(n) * n);
    for (int k = 0; k < n; ++k) {
        const double amp = std::sqrt((k == 0 ? 1.0 : 2.0) / n);
        for (int m = 0; m < n; ++m)
            basis[static_cast<std::size_t>(k) * n + m] =
                amp * std::cos(kPi * (2.0 * m + 1.0) * k / (2.0 * n));
    }

    // F = C * X * C^T
    std::vector<double> tmp(static_cast<std::size_t>(n) * n, 0.0);
    for (int k = 0; k < n; ++k)
        for (int m = 0; m < n; ++m) {
            double acc = 0.0;
            for (int q = 0; q < n; ++q)
                acc += basis[static_cast<std::size_t>(k) * n + q] *
                       block[static_cast<std::size_t>(q) * n + m];
            tmp[static_cast<std::size_t>(k) * n + m] = acc;
        }
    std::vector<double> coeff(static_cast<std::size_t>(n) * n, 0.0);
    for (int k = 0; k < n; ++k)
        for (int m = 0; m < n; ++m) {
            double acc = 0.0;
            for (int q = 0; q < n; ++q)
                acc += tmp[static_cast<std::size_t>(k) * n + q] *
                       basis[static_cast<std::size_t>(m) * n + q];
            coeff[static_cast<std::size_t>(k) * n + m] = acc;
        }

    DctLambda out;
    out.lambda = detail::max_singular_value(coeff, n);
    if (count > 0) {
        const double mean = sum / count;
        const double var = std::max(0.0, sum_sq / count - mean * mean);
        out.variance = var / (sigma_scale * sigma_scale);
    }
    return out;
}

/*
 * Threshold branches keyed by the variance-difference statistic sigma_s.
 * sigma_s is the absolute difference of the two domains' intensity
 * variances after dividing intensities by sigma_scale (1 = raw [0, 255]).
 */
inline double k_pcet(double sigma_s)
{
    if (sigma_s < 0.0)
        throw std::invalid_argument("k_pcet: sigma_s must be non-negative");
    if (sigma_s <= 0.1)
        return 1.0;
    if (sigma_s <= 1.0)
        return 25.0;
    return 75.0;
}

inline double k_dct(double sigma_s)
{
    if (sigma_s < 0.0)
        throw std::invalid_argument("k_dct: sigma_s must be non-negative");
    if (sigma_s <= 1.0)
        return 25.0;
    if (sigma_s <= 10.0)
        return 50.0;
    return 100.0;
}

/* (K_PCET, K_DCT) for one sigma_s. */
inline std::pair<double, double> adaptive_thresholds(double sigma_s)
{
    return {k_pcet(sigma_s), k_dct(sigma_s)};
}

/* One circular domain's feature plus the variance used to pick thresholds. */
struct DomainFeature {
    FeatureMode mode = FeatureMode::Dct;
    PcetFeature pcet;
    double lambda = 0.0;
    double variance = 0.0;  // on the sigma_s scale
};

struct BlockFeatParams {
    FeatureMode mode = FeatureMode::Dct;
    int pcet_max_order = 3;
    double sigma_scale = 1.0;
};

inline DomainFeature compute_domain_feature(const GrayImage& img, Point center, double radius,
                                            const BlockFeatParams& params = {})
{
    DomainFeature out;
    out.mode = params.mode;
    if (params.mode == FeatureMode::Dct) {
        const DctLambda dl = compute_dct_lambda(img, center, radius, params.sigma_scale);
        out.lambda = dl.lambda;
        out.variance = dl.variance;
    } else {
        const DiskSample disk = sample_disk(img, center.x, center.y, radius);
        if (disk.pixels.size() < 4)
            throw std::invalid_argument("compute_domain_feature: degenerate disk");
        out.pcet = compute_pcet(disk, params.pcet_max_order);
        out.variance = disk.variance / (params.sigma_scale * params.sigma_scale);
    }
    return out;
}

/*
 * PCET mode: Euclidean distance of moment magnitudes below K_PCET(sigma_s).
 * DCT mode: |lambda_1 - lambda_2| below K_DCT(sigma_s).
 */
inline bool domains_match(const DomainFeature& a, const DomainFeature& b, double sigma_s)
{
    if (a.mode != b.mode)
        throw std::invalid_argument("domains_match: feature mode mismatch");
    if (a.mode == FeatureMode::Dct)
        return std::abs(a.lambda - b.lambda) < k_dct(sigma_s);
    return pcet_distance(a.pcet, b.pcet) < k_pcet(sigma_s);
}

}  // namespace ecdc
