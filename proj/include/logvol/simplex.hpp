#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "logvol/error.hpp"
#include "logvol/rng.hpp"
#include "logvol/sampling.hpp"
#include "logvol/specfun.hpp"

namespace logvol {

struct SimplexDims {
    int n = 1;
    int p = 1;

    SimplexDims() = default;
    SimplexDims(int n_, int p_) : n(n_), p(p_) {
        if (p < 1 || n < 1 || p > n)
            throw domain_error("SimplexDims: need 1 <= p <= n (n=" + std::to_string(n) +
                               ", p=" + std::to_string(p) + ")");
    }
    double theta() const { return double(p - 1) / n; }
};

struct MomentSummary {
    double mean = 0.0;
    double variance = 0.0;
    double third_abs_bound = 0.0;  // bound on E|X - mean|^3; 0 when absent
    bool has_third = false;
};

// Log-volume, or an explicit marker for a numerically rank-deficient vertex set.
struct LogVolume {
    double log_volume = 0.0;
    bool degenerate = false;

    double value() const {
        if (degenerate) throw rank_deficient("log-volume of a degenerate simplex");
        return log_volume;
    }
};

inline double log_factorial(int p) { return std::lgamma(p + 1.0); }

// -log p! + 1/2 log det Gram via diagonally pivoted Cholesky of the Gram matrix.
inline LogVolume log_volume_gram(const std::vector<std::vector<double>>& vectors) {
    const int p = static_cast<int>(vectors.size());
    if (p == 0) throw domain_error("log_volume_gram: no vectors");
    const std::size_t n = vectors[0].size();
    if (static_cast<std::size_t>(p) > n) throw domain_error("log_volume_gram: p exceeds dimension");
    for (const auto& v : vectors)
        if (v.size() != n) throw domain_error("log_volume_gram: ragged vectors");
    std::vector<double> G(std::size_t(p) * p);
    for (int i = 0; i < p; ++i)
        for (int j = 0; j <= i; ++j) {
            long double s = 0.0L;
            for (std::size_t k = 0; k < n; ++k) s += static_cast<long double>(vectors[i][k]) * vectors[j][k];
            G[i * p + j] = G[j * p + i] = static_cast<double>(s);
        }
    double max_diag = 0.0;
    for (int i = 0; i < p; ++i) max_diag = std::max(max_diag, G[i * p + i]);
    const double threshold = 1e3 * std::numeric_limits<double>::epsilon() * max_diag;
    LogVolume out;
    if (!(max_diag > 0.0)) {
        out.degenerate = true;
        return out;
    }
    std::vector<int> perm(p);
    for (int i = 0; i < p; ++i) perm[i] = i;
    double log_det = 0.0;
    for (int k = 0; k < p; ++k) {
        int best = k;
        for (int i = k + 1; i < p; ++i)
            if (G[perm[i] * p + perm[i]] > G[perm[best] * p + perm[best]]) best = i;
        std::swap(perm[k], perm[best]);
        const int pk = perm[k];
        const double pivot = G[pk * p + pk];
        if (!(pivot > threshold)) {
            out.degenerate = true;
            return out;
        }
        log_det += std::log(pivot);
        for (int i = k + 1; i < p; ++i) {
            const int pi = perm[i];
            const double lik = G[pi * p + pk] / pivot;
            for (int j = k + 1; j <= i; ++j) {
                const int pj = perm[j];
                G[pi * p + pj] -= lik * G[pk * p + pj];
                G[pj * p + pi] = G[pi * p + pj];
            }
        }
    }
    out.log_volume = -log_factorial(p) + 0.5 * log_det;
    return out;
}

// log|det A| by LU with partial pivoting; A is n x n row-major.
inline LogVolume log_abs_det(std::vector<double> a, int n) {
    if (a.size() != std::size_t(n) * n) throw domain_error("log_abs_det: size mismatch");
    double scale = 0.0;
    for (double v : a) scale = std::max(scale, std::abs(v));
    LogVolume out;
    double acc = 0.0;
    for (int k = 0; k < n; ++k) {
        int best = k;
        for (int i = k + 1; i < n; ++i)
            if (std::abs(a[i * n + k]) > std::abs(a[best * n + k])) best = i;
        if (best != k)
            for (int j = 0; j < n; ++j) std::swap(a[k * n + j], a[best * n + j]);
        const double piv = a[k * n + k];
        if (!(std::abs(piv) > 1e3 * std::numeric_limits<double>::epsilon() * scale)) {
            out.degenerate = true;
            return out;
        }
        acc += std::log(std::abs(piv));
        for (int i = k + 1; i < n; ++i) {
            const double f = a[i * n + k] / piv;
            for (int j = k + 1; j < n; ++j) a[i * n + j] -= f * a[k * n + j];
        }
    }
    out.log_volume = acc;
    return out;
}

// ---- samplers --------------------------------------------------------------

// -log p! + 1/2 sum_j log beta_{(n-j)/2, j/2}
inline double sample_logvol_spherical(SimplexDims d, Generator& gen) {
    double s = 0.0;
    for (int j = 1; j < d.p; ++j) s += sample_log_beta(0.5 * (d.n - j), 0.5 * j, gen);
    return -log_factorial(d.p) + 0.5 * s;
}

inline double sample_logvol_radial(const LogRadiusSampler& radius, SimplexDims d, Generator& gen) {
    double r = 0.0;
    for (int i = 0; i < d.p; ++i) r += radius(gen);
    return sample_logvol_spherical(d, gen) + r;
}

inline double sample_logvol_radial(const RadialLaw& law, SimplexDims d, Generator& gen) {
    return sample_logvol_radial(LogRadiusSampler(law, d.n), d, gen);
}

// p independent vertex vectors drawn from the law: direction times radius, or
// i.i.d. N(0, 1/n) coordinates for the Gaussian preset.
inline std::vector<std::vector<double>> sample_vertices(const LogRadiusSampler& radius,
                                                        SimplexDims d, Generator& gen) {
    std::vector<std::vector<double>> v(d.p);
    const RadialLaw& law = radius.law();
    for (auto& y : v) {
        if (law.kind == RadialKind::ScaledGaussian) {
            y.resize(d.n);
            const double s = 1.0 / std::sqrt(double(d.n));
            for (auto& c : y) c = s * gen.normal();
        } else {
            y = sample_sphere_point(d.n, gen);
            const double r = std::exp(radius(gen));
            for (auto& c : y) c *= r;
        }
    }
    return v;
}

// Log-volume from explicitly simulated vertices.
inline LogVolume sample_logvol_gram(const LogRadiusSampler& radius, SimplexDims d, Generator& gen) {
    return log_volume_gram(sample_vertices(radius, d, gen));
}

inline LogVolume sample_logvol_gram(const RadialLaw& law, SimplexDims d, Generator& gen) {
    return sample_logvol_gram(LogRadiusSampler(law, d.n), d, gen);
}

// (n/2) log 2 + 1/2 sum_{j=1}^n log Gamma(j/2)-variates
inline double goodman_sample_logdet(int n, Generator& gen) {
    if (n < 1) throw domain_error("goodman_sample_logdet: n must be positive");
    double s = 0.0;
    for (int j = 1; j <= n; ++j) s += sample_log_gamma(0.5 * j, gen);
    return 0.5 * n * std::numbers::ln2 + 0.5 * s;
}

// log|det| of an explicitly simulated n x n standard Gaussian matrix.
inline LogVolume sample_gaussian_logdet_direct(int n, Generator& gen) {
    std::vector<double> a(std::size_t(n) * n);
    for (auto& v : a) v = gen.normal();
    return log_abs_det(std::move(a), n);
}

// ---- exact moments -----------------------------------------------------------

namespace detail {

// E|S|^3 <= (E S^4)^{3/4}, E S^4 = sum kappa4 + 3 var^2 for independent summands.
inline double lyapunov_third_bound(double sum_kappa4, double variance) {
    return std::pow(sum_kappa4 + 3.0 * variance * variance, 0.75);
}

}  // namespace detail

inline MomentSummary spherical_moments(SimplexDims d) {
    const double half_n = 0.5 * d.n;
    const double psi0n = digamma(half_n), psi1n = trigamma(half_n), psi3n = polygamma(3, half_n);
    double m = 0.0, v = 0.0, k4 = 0.0;
    for (int j = 1; j < d.p; ++j) {
        const double a = 0.5 * (d.n - j);
        m += digamma(a) - psi0n;
        v += trigamma(a) - psi1n;
        k4 += polygamma(3, a) - psi3n;
    }
    MomentSummary s;
    s.mean = -log_factorial(d.p) + 0.5 * m;
    s.variance = 0.25 * v;
    s.third_abs_bound = detail::lyapunov_third_bound(k4 / 16.0, s.variance);
    s.has_third = true;
    return s;
}

// spherical_moments for p = 1..n by running sums; element p-1 holds dims (n,p).
inline std::vector<MomentSummary> spherical_moments_profile(int n) {
    if (n < 1) throw domain_error("spherical_moments_profile: n must be positive");
    std::vector<MomentSummary> out(n);
    const double half_n = 0.5 * n;
    const double psi0n = digamma(half_n), psi1n = trigamma(half_n), psi3n = polygamma(3, half_n);
    double m = 0.0, v = 0.0, k4 = 0.0;
    for (int p = 1; p <= n; ++p) {
        if (p > 1) {
            const double a = 0.5 * (n - (p - 1));
            m += digamma(a) - psi0n;
            v += trigamma(a) - psi1n;
            k4 += polygamma(3, a) - psi3n;
        }
        auto& s = out[p - 1];
        s.mean = -log_factorial(p) + 0.5 * m;
        s.variance = 0.25 * v;
        s.third_abs_bound = detail::lyapunov_third_bound(k4 / 16.0, s.variance);
        s.has_third = true;
    }
    return out;
}

inline MomentSummary gaussian_logdet_moments(int n) {
    if (n < 1) throw domain_error("gaussian_logdet_moments: n must be positive");
    double m = 0.0, v = 0.0, k4 = 0.0;
    for (int j = 1; j <= n; ++j) {
        const double a = 0.5 * j;
        m += digamma(a);
        v += trigamma(a);
        k4 += polygamma(3, a);
    }
    MomentSummary s;
    s.mean = 0.5 * n * std::numbers::ln2 + 0.5 * m;
    s.variance = 0.25 * v;
    s.third_abs_bound = detail::lyapunov_third_bound(k4 / 16.0, s.variance);
    s.has_third = true;
    return s;
}

// Mean and variance of the log-volume under a radial law with finite log-radius moments.
inline MomentSummary radial_moments(const RadialLaw& law, SimplexDims d) {
    auto s = spherical_moments(d);
    const auto r = log_radius_moments(law, d.n);
    s.mean += d.p * r.mean;
    s.variance += d.p * r.var;
    s.has_third = false;
    s.third_abs_bound = 0.0;
    return s;
}

}  // namespace logvol
