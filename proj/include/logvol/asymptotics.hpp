#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/special_functions/expint.hpp>

#include "logvol/error.hpp"
#include "logvol/quadrature.hpp"
#include "logvol/sampling.hpp"
#include "logvol/simplex.hpp"
#include "logvol/specfun.hpp"

namespace logvol {

inline constexpr double kBerryConstant = 28.0;

// (7/96) sigma^{-3} sum_{j<p} [1/(n-j)^2 - 1/n^2]
inline double epsilon_np(SimplexDims d) {
    if (d.p < 2) throw degenerate_variance("epsilon_np: variance vanishes for p = 1");
    const double sigma = std::sqrt(spherical_moments(d).variance);
    const double inv_n2 = 1.0 / (double(d.n) * d.n);
    double s = 0.0;
    for (int j = 1; j < d.p; ++j) {
        const double m = d.n - j;
        s += 1.0 / (m * m) - inv_n2;
    }
    return 7.0 / 96.0 * s / (sigma * sigma * sigma);
}

// theta^2 / (n (1-theta) (log(1/(1-theta)) - theta)^{3/2})
inline double spherical_rate(SimplexDims d) {
    const double th = d.theta();
    const double gap = -std::log1p(-th) - th;
    return th * th / (d.n * (1.0 - th) * std::pow(gap, 1.5));
}

// Upper bound on epsilon_np valid for p >= 7.
inline double epsilon_upper_bound(SimplexDims d) { return 1.75 * spherical_rate(d); }

// Lower bounds on the spherical variance: the explicit one and, for p >= 7, the smoother one.
inline double variance_lower_bound_explicit(SimplexDims d) {
    const double x = double(d.p - 1) / d.n;
    return 0.5 * (-std::log1p(-x) - x * (1.0 + 1.5 / d.n));
}

inline double variance_lower_bound_smooth(SimplexDims d) {
    const double th = d.theta();
    return 0.25 * (-std::log1p(-th) - th);
}

enum class BoundForm { general, theta_capped, codimension };

inline const char* to_string(BoundForm f) {
    switch (f) {
        case BoundForm::general: return "general";
        case BoundForm::theta_capped: return "theta_capped";
        case BoundForm::codimension: return "codimension";
    }
    return "?";
}

struct BoundAlternative {
    BoundForm form;
    double value;
    bool applicable;
    std::string reason;
};

struct BoundReport {
    SimplexDims dims;
    double epsilon_np = 0.0;
    double ks_bound = 1.0;
    BoundForm bound_form = BoundForm::general;
    bool applicable = false;
    std::string reason;
    std::vector<BoundAlternative> alternatives;
};

// Kolmogorov distance bound for the standardized spherical log-volume (constant 28),
// with the bounded-theta form C_phi/(p-1) and the codimension form in q = n-p+1.
inline BoundReport spherical_ks_bound(SimplexDims d, double phi = 0.5) {
    BoundReport r;
    r.dims = d;
    if (d.p >= 2) r.epsilon_np = epsilon_np(d);
    if (d.p >= 2) {
        r.ks_bound = kBerryConstant * spherical_rate(d);
    } else {
        r.ks_bound = 1.0;
    }
    r.applicable = d.p >= 41;
    if (!r.applicable) r.reason = d.p == 1 ? "p < 41 (p = 1: zero variance)" : "p < 41";
    else if (d.p == d.n) r.reason = "p = n: theta = 1 - 1/n, bound degenerates";

    BoundAlternative capped{BoundForm::theta_capped, 1.0, false, ""};
    if (d.p >= 2) {
        capped.value = 2.0 * std::numbers::sqrt2 * kBerryConstant / (1.0 - phi) / (d.p - 1);
        capped.applicable = r.applicable && d.theta() <= phi;
        if (!capped.applicable) capped.reason = r.applicable ? "theta > phi" : r.reason;
    } else {
        capped.reason = r.reason;
    }
    r.alternatives.push_back(capped);

    const double q = d.n - d.p + 1;
    BoundAlternative codim{BoundForm::codimension, 1.0, false, ""};
    const double lg = std::log(d.n / q) - 1.0;
    if (lg > 0.0) {
        codim.value = kBerryConstant / (q * std::pow(lg, 1.5));
        codim.applicable = r.applicable;
        if (!codim.applicable) codim.reason = r.reason;
    } else {
        codim.reason = "log(n/q) <= 1";
    }
    r.alternatives.push_back(codim);
    return r;
}

// Critical variance sequence.
inline double omega_sq(SimplexDims d) {
    const double n = d.n, p = d.p;
    return -0.5 * std::log((n - p + 1.0) / n) - p * p / (2.0 * n * (p + 1.0));
}

// Reference shape 1/log^{3/2} n of the Gaussian log-determinant rate.
inline double gaussian_rate(int n) { return std::pow(std::log(double(n)), -1.5); }

// ---- universal constants ------------------------------------------------------

namespace detail {

// 1/2 - 1/z + 1/(e^z - 1), with its Taylor series near 0
inline double binet_kernel(double z) {
    if (z < 1e-2) {
        const double z2 = z * z;
        return z * (1.0 / 12.0 + z2 * (-1.0 / 720.0 + z2 * (1.0 / 30240.0 - z2 / 1209600.0)));
    }
    return 0.5 - 1.0 / z + 1.0 / std::expm1(z);
}

inline double c0_integrand(double z) { return binet_kernel(z) / std::expm1(0.5 * z); }

inline double c1_integrand(double z) { return binet_kernel(z) * z / std::expm1(0.5 * z); }

}  // namespace detail

struct UniversalConstants {
    double c0 = 0.0;
    double c1 = 0.0;
    double c1_integral = 0.0;  // gamma/2 + (1/4) * integral, without the pi^2/12 term
    double quadrature_error = 0.0;
};

// Constants of the Gaussian log-determinant mean/variance expansions, each
// computed by adaptive Gauss-Kronrod on [0,50] plus an analytic tail and by
// exp-sinh on (0,inf).
inline UniversalConstants universal_constants() {
    constexpr double euler = std::numbers::egamma;
    quad::Options opt;
    opt.abs_tol = 1e-15;
    opt.rel_tol = 1e-15;
    std::vector<double> pts = {0.0, 1e-2, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 50.0};
    const double e25 = std::exp(-25.0);
    const double i0_a = quad::integrate_pieces(detail::c0_integrand, pts, opt).value +
                        (e25 - boost::math::expint(1, 25.0));
    const double i1_a = quad::integrate_pieces(detail::c1_integrand, pts, opt).value + 50.0 * e25;

    boost::math::quadrature::exp_sinh<double> es;
    const double i0_b = es.integrate(detail::c0_integrand, 0.0, std::numeric_limits<double>::infinity(), 1e-15);
    const double i1_b = es.integrate(detail::c1_integrand, 0.0, std::numeric_limits<double>::infinity(), 1e-15);

    UniversalConstants u;
    u.c0 = -0.5 * euler - 0.5 * i0_a;
    u.c1_integral = 0.5 * euler + 0.25 * i1_a;
    u.c1 = u.c1_integral + std::numbers::pi * std::numbers::pi / 12.0;
    u.quadrature_error = std::max(0.5 * std::abs(i0_a - i0_b), 0.25 * std::abs(i1_a - i1_b));
    if (!(u.quadrature_error <= 1e-10))
        throw quadrature_failure("universal_constants: schemes disagree");
    return u;
}

struct GaussianMomentApprox {
    MomentSummary approx;  // mean = 1/2 log (n-1)! + c0, variance = 1/2 log n + c1
    MomentSummary exact;
    double mean_residual = 0.0;  // exact - approx
    double var_residual = 0.0;
};

inline GaussianMomentApprox gaussian_matrix_mean_var_approx(int n, const UniversalConstants& uc) {
    if (n < 2) throw domain_error("gaussian_matrix_mean_var_approx: n must be at least 2");
    GaussianMomentApprox g;
    g.exact = gaussian_logdet_moments(n);
    g.approx.mean = 0.5 * std::lgamma(double(n)) + uc.c0;
    g.approx.variance = 0.5 * std::log(double(n)) + uc.c1;
    g.mean_residual = g.exact.mean - g.approx.mean;
    g.var_residual = g.exact.variance - g.approx.variance;
    return g;
}

inline GaussianMomentApprox gaussian_matrix_mean_var_approx(int n) {
    static const UniversalConstants uc = universal_constants();
    return gaussian_matrix_mean_var_approx(n, uc);
}

// ---- characteristic functions ---------------------------------------------------

// log E exp(i u log beta) with beta ~ Beta(a, b), centred: the -iu E[log beta] term removed.
inline complex log_beta_char_centred(double a, double b, double u) {
    const complex iu(0.0, u);
    const double mean = digamma(a) - digamma(a + b);
    return log_gamma(complex(a, u)) - std::lgamma(a) - log_gamma(complex(a + b, u)) +
           std::lgamma(a + b) - iu * mean;
}

// Per-j factor: log E exp(i t V) for V the standardized log beta_{(n-j)/2, j/2}.
inline complex log_beta_char_factor(int n, int j, double t) {
    const double a = 0.5 * (n - j), b = 0.5 * j;
    const double sd = std::sqrt(trigamma(a) - trigamma(a + b));
    return log_beta_char_centred(a, b, t / sd);
}

// The same factor from -t^2/2 + (i/2) int_0^s int_0^{t1} int_0^{t2} int_0^j psi_3((n-r)/2 + i t3),
// s = t/sd, collapsed to int_0^s (s-u)^2/2 [int_0^j psi_3 dr] du.
inline complex log_beta_char_factor_integral(int n, int j, double t) {
    const double a = 0.5 * (n - j), b = 0.5 * j;
    const double sd = std::sqrt(trigamma(a) - trigamma(a + b));
    const double s = t / sd;
    quad::Options inner;
    inner.abs_tol = 1e-15;
    inner.rel_tol = 1e-13;
    auto psi3_sum = [&](double u) {
        return quad::integrate(
                   [&](double r) { return polygamma(3, complex(0.5 * (n - r), u)); }, 0.0,
                   double(j), inner)
            .value;
    };
    quad::Options outer;
    outer.abs_tol = 1e-14;
    outer.rel_tol = 1e-12;
    const complex tri =
        quad::integrate([&](double u) { return 0.5 * (s - u) * (s - u) * psi3_sum(u); }, 0.0, s, outer)
            .value;
    return complex(-0.5 * t * t, 0.0) + complex(0.0, 0.5) * tri;
}

// log of the characteristic function of the standardized spherical log-volume.
inline complex spherical_log_char(SimplexDims d, double t) {
    const double sigma = std::sqrt(spherical_moments(d).variance);
    const double u = t / (2.0 * sigma);
    complex s = 0.0;
    for (int j = 1; j < d.p; ++j) s += log_beta_char_centred(0.5 * (d.n - j), 0.5 * j, u);
    return s;
}

struct CharBoundEntry {
    double t;
    double lhs;  // |log phi(t) + t^2/2|
    double rhs;  // epsilon |t|^3
    double violation;
};

struct CharBoundReport {
    SimplexDims dims;
    double epsilon = 0.0;
    double window = 0.0;  // 1/(4 epsilon)
    std::vector<CharBoundEntry> entries;
    double max_violation = -std::numeric_limits<double>::infinity();
    int violations = 0;
    // same check against 8 epsilon: psi_3 bounded at real part (n-s)/2 rather than n-s
    int violations_8eps = 0;
};

inline CharBoundReport verify_char_bound(SimplexDims d, const std::vector<double>& t_values) {
    CharBoundReport r;
    r.dims = d;
    r.epsilon = epsilon_np(d);
    r.window = 1.0 / (4.0 * r.epsilon);
    for (double t : t_values) {
        if (std::abs(t) > r.window)
            throw instability_error("verify_char_bound: |t| outside 1/(4 epsilon)");
        CharBoundEntry e;
        e.t = t;
        e.lhs = std::abs(spherical_log_char(d, t) + 0.5 * t * t);
        e.rhs = r.epsilon * std::abs(t * t * t);
        e.violation = e.lhs - e.rhs;
        r.max_violation = std::max(r.max_violation, e.violation);
        if (e.violation > 0.0) ++r.violations;
        if (e.lhs > 8.0 * e.rhs) ++r.violations_8eps;
        r.entries.push_back(e);
    }
    return r;
}

// log E exp(i t (log W - psi0(lambda))/sqrt(psi1(lambda))), W ~ Gamma(lambda).
inline complex log_gamma_char(double lambda, double t) {
    const double sd = std::sqrt(trigamma(lambda));
    const double u = t / sd;
    return log_gamma(complex(lambda, u)) - std::lgamma(lambda) - complex(0.0, u * digamma(lambda));
}

// Same through -t^2/2 - i int_0^u (u-v)^2/2 psi_2(lambda + i v) dv.
inline complex log_gamma_char_integral(double lambda, double t) {
    const double sd = std::sqrt(trigamma(lambda));
    const double u = t / sd;
    quad::Options opt;
    opt.abs_tol = 1e-15;
    opt.rel_tol = 1e-13;
    const complex tri = quad::integrate(
                            [&](double v) {
                                return 0.5 * (u - v) * (u - v) * polygamma(2, complex(lambda, v));
                            },
                            0.0, u, opt)
                            .value;
    return complex(-0.5 * t * t, 0.0) - complex(0.0, 1.0) * tri;
}

struct LogGammaCharEntry {
    double t;
    complex direct;
    complex integral;
    std::optional<complex> empirical;
};

struct LogGammaCharReport {
    double lambda;
    std::vector<LogGammaCharEntry> entries;
    double max_direct_vs_integral = 0.0;
    double max_direct_vs_empirical = 0.0;
    std::size_t samples = 0;
};

inline LogGammaCharReport verify_loggamma_char(double lambda, const std::vector<double>& t_values,
                                               std::size_t samples = 0, RngStream stream = {}) {
    if (!(lambda > 0.0)) throw domain_error("verify_loggamma_char: lambda must be positive");
    LogGammaCharReport r;
    r.lambda = lambda;
    r.samples = samples;
    std::vector<double> q;
    if (samples > 0) {
        const double mu = digamma(lambda), sd = std::sqrt(trigamma(lambda));
        q.resize(samples);
        for (std::size_t i = 0; i < samples; ++i) {
            Generator g = stream.substream(i);
            q[i] = (sample_log_gamma(lambda, g) - mu) / sd;
        }
    }
    for (double t : t_values) {
        LogGammaCharEntry e{t, std::exp(log_gamma_char(lambda, t)),
                            std::exp(log_gamma_char_integral(lambda, t)), std::nullopt};
        r.max_direct_vs_integral = std::max(r.max_direct_vs_integral, std::abs(e.direct - e.integral));
        if (!q.empty()) {
            double re = 0.0, im = 0.0;
            for (double x : q) {
                re += std::cos(t * x);
                im += std::sin(t * x);
            }
            e.empirical = complex(re / q.size(), im / q.size());
            r.max_direct_vs_empirical = std::max(r.max_direct_vs_empirical, std::abs(e.direct - *e.empirical));
        }
        r.entries.push_back(e);
    }
    return r;
}

// KS distance bound between (X - mu_t)/sigma_t and N given d_KS((X - mu)/sigma, N) <= epsilon.
inline double ks_composite_bound(double epsilon, double mu, double mu_t, double sigma, double sigma_t) {
    if (!(sigma > 0.0) || !(sigma_t > 0.0))
        throw domain_error("ks_composite_bound: scales must be positive");
    if (epsilon < 0.0) throw domain_error("ks_composite_bound: epsilon must be non-negative");
    const double s2 = sigma * sigma, t2 = sigma_t * sigma_t;
    return epsilon + std::abs(mu - mu_t) / std::max(sigma, sigma_t) +
           0.375 * std::abs(s2 - t2) / std::min(s2, t2);
}

}  // namespace logvol
