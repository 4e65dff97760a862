#include <cmath>
#include <numbers>
#include <vector>

#include <boost/math/special_functions/trigamma.hpp>
#include <gtest/gtest.h>

#include "logvol/asymptotics.hpp"
#include "logvol/batch.hpp"
#include "logvol/stats.hpp"

using namespace logvol;

namespace {

// Kahan-summed long double evaluation of the char-bound factor
double epsilon_oracle(int n, int p) {
    long double s = 0.0L, comp = 0.0L, v = 0.0L, vc = 0.0L;
    const long double inv_n2 = 1.0L / ((long double)n * n);
    for (int j = 1; j < p; ++j) {
        const long double m = n - j;
        long double y = 1.0L / (m * m) - inv_n2 - comp;
        long double t = s + y;
        comp = (t - s) - y;
        s = t;
        y = boost::math::trigamma((long double)(0.5L * (n - j))) - boost::math::trigamma(0.5L * n) - vc;
        t = v + y;
        vc = (t - v) - y;
        v = t;
    }
    const long double sigma = std::sqrt(0.25L * v);
    return static_cast<double>(7.0L / 96.0L * s / (sigma * sigma * sigma));
}

}  // namespace

TEST(Epsilon, MatchesCompensatedOracle) {
    for (auto [n, p] : {std::pair{3, 2}, {50, 20}, {1000, 501}, {5000, 4999}, {20000, 100}})
        EXPECT_NEAR(epsilon_np({n, p}), epsilon_oracle(n, p), 1e-12 * epsilon_oracle(n, p)) << n << "," << p;
    EXPECT_THROW(epsilon_np({10, 1}), degenerate_variance);
}

TEST(Epsilon, UpperBoundHoldsForLargerP) {
    for (int n : {10, 50, 200, 1000})
        for (int p = 7; p <= n; p += std::max(1, n / 40))
            if (p < n) {
                EXPECT_LE(epsilon_np({n, p}), epsilon_upper_bound({n, p})) << n << "," << p;
            }
}

TEST(VarianceLowerBounds, FullScan) {
    for (int n : {7, 30, 200}) {
        const auto prof = spherical_moments_profile(n);
        for (int p = 2; p <= n; ++p) {
            const SimplexDims d(n, p);
            EXPECT_LE(variance_lower_bound_explicit(d), prof[p - 1].variance) << n << "," << p;
            if (p >= 7) {
                EXPECT_LE(variance_lower_bound_smooth(d), prof[p - 1].variance) << n << "," << p;
            }
        }
    }
}

TEST(KsBound, ExplicitValues) {
    const SimplexDims d(1000, 501);
    const double th = 0.5;
    const double ref = 28.0 * th * th / (1000.0 * (1 - th) * std::pow(std::log(2.0) - th, 1.5));
    const auto b = spherical_ks_bound(d);
    EXPECT_NEAR(b.ks_bound, ref, 1e-14);
    EXPECT_NEAR(b.ks_bound, 0.164928, 5e-6);
    EXPECT_TRUE(b.applicable);
    EXPECT_EQ(b.bound_form, BoundForm::general);
    ASSERT_EQ(b.alternatives.size(), 2u);
    EXPECT_EQ(b.alternatives[0].form, BoundForm::theta_capped);
    EXPECT_NEAR(b.alternatives[0].value, 2 * std::numbers::sqrt2 * 28.0 / 0.5 / 500.0, 1e-14);
    EXPECT_TRUE(b.alternatives[0].applicable);
    EXPECT_EQ(b.alternatives[1].form, BoundForm::codimension);
    EXPECT_FALSE(b.alternatives[1].applicable);  // log(n/q) < 1
}

TEST(KsBound, ApplicabilityFlags) {
    const auto small = spherical_ks_bound({100, 40});
    EXPECT_FALSE(small.applicable);
    EXPECT_FALSE(small.reason.empty());
    const auto one = spherical_ks_bound({100, 1});
    EXPECT_EQ(one.ks_bound, 1.0);
    EXPECT_FALSE(one.applicable);
    const auto full = spherical_ks_bound({200, 200});
    EXPECT_NE(full.reason.find("p = n"), std::string::npos);
    const auto codim = spherical_ks_bound({10000, 9950});
    EXPECT_TRUE(codim.alternatives[1].applicable);
    EXPECT_NEAR(codim.alternatives[1].value, 28.0 / (51.0 * std::pow(std::log(10000.0 / 51.0) - 1.0, 1.5)), 1e-14);
    EXPECT_FALSE(spherical_ks_bound({1000, 800}, 0.5).alternatives[0].applicable);
}

TEST(KsBound, DominatesEmpiricalDistance) {
    const SimplexDims d(200, 100);
    const auto m = spherical_moments(d);
    auto x = generate(100000, RngStream{9, 9}, 1, [d](Generator& g) { return sample_logvol_spherical(d, g); });
    for (auto& v : x) v = (v - m.mean) / std::sqrt(m.variance);
    const auto ks = ks_one_sample(x, normal_cdf);
    EXPECT_LE(ks.statistic, spherical_ks_bound(d).ks_bound + ks.mc_half_width);
}

TEST(Omega, TracksSphericalVariance) {
    for (int n : {1000, 10000, 100000}) {
        const SimplexDims d(n, n / 2);
        EXPECT_NEAR(omega_sq(d) / spherical_moments(d).variance, 1.0, 20.0 / n) << n;
    }
    // omega^2 = -1/2 log(q/n) - p^2/(2n(p+1)) by direct evaluation
    EXPECT_NEAR(omega_sq({10, 4}), -0.5 * std::log(0.7) - 16.0 / 100.0, 1e-15);
}

TEST(UniversalConstants, ValuesAndSchemeAgreement) {
    const auto u = universal_constants();
    EXPECT_LE(u.quadrature_error, 1e-10);
    EXPECT_NEAR(u.c0, -0.5270599779677021, 1e-12);
    EXPECT_NEAR(u.c1, 1.4054581075188513, 1e-12);
    EXPECT_NEAR(u.c1 - u.c1_integral, std::numbers::pi * std::numbers::pi / 12.0, 1e-15);
}

TEST(UniversalConstants, ResidualsDecayLikeOneOverN) {
    const auto u = universal_constants();
    double max_m = 0.0, max_v = 0.0;
    for (int n = 2; n <= 10000; ++n) {
        const auto g = gaussian_matrix_mean_var_approx(n, u);
        max_m = std::max(max_m, std::abs(g.mean_residual) * n);
        max_v = std::max(max_v, std::abs(g.var_residual) * n);
    }
    EXPECT_LT(max_m, 1.0);
    EXPECT_LT(max_v, 1.0);
    // log-log slope between n = 10^3 and 10^4
    const auto a = gaussian_matrix_mean_var_approx(1000, u), b = gaussian_matrix_mean_var_approx(10000, u);
    EXPECT_NEAR(std::log10(std::abs(b.mean_residual) / std::abs(a.mean_residual)), -1.0, 0.1);
    EXPECT_NEAR(std::log10(std::abs(b.var_residual) / std::abs(a.var_residual)), -1.0, 0.1);
    EXPECT_THROW(gaussian_matrix_mean_var_approx(1, u), domain_error);
}

TEST(CharFactor, IntegralFormMatchesGammaRatio) {
    for (auto [n, j] : {std::pair{10, 3}, {50, 20}, {400, 399}})
        for (double t : {0.1, 0.7, 2.0}) {
            const complex a = log_beta_char_factor(n, j, t), b = log_beta_char_factor_integral(n, j, t);
            EXPECT_NEAR(std::abs(a - b), 0.0, 1e-10 * (1 + std::abs(a))) << n << " " << j << " " << t;
        }
}

TEST(CharFactor, SphericalSumMatchesFactorIntegrals) {
    const SimplexDims d(30, 8);
    const double sigma = std::sqrt(spherical_moments(d).variance);
    for (double t : {0.5, 1.5}) {
        complex s = 0.0;
        for (int j = 1; j < d.p; ++j) {
            const double sd = std::sqrt(trigamma(0.5 * (d.n - j)) - trigamma(0.5 * d.n));
            s += log_beta_char_factor_integral(d.n, j, t * sd / (2.0 * sigma));
        }
        EXPECT_NEAR(std::abs(spherical_log_char(d, t) - s), 0.0, 1e-10);
    }
}

TEST(CharFactor, EmpiricalCharacteristicFunction) {
    const SimplexDims d(40, 10);
    const auto m = spherical_moments(d);
    const std::size_t N = 200000;
    const auto x = generate(N, RngStream{12, 0}, 1, [d](Generator& g) { return sample_logvol_spherical(d, g); });
    for (double t : {0.5, 1.0, 2.0}) {
        double re = 0.0, im = 0.0;
        for (double v : x) {
            const double z = t * (v - m.mean) / std::sqrt(m.variance);
            re += std::cos(z);
            im += std::sin(z);
        }
        EXPECT_NEAR(std::abs(complex(re / N, im / N) - std::exp(spherical_log_char(d, t))), 0.0, 5.0 / std::sqrt(double(N)));
    }
}

TEST(CharBound, ReportStructure) {
    const auto r = verify_char_bound({200, 100}, {0.25, 1.0, 4.0});
    EXPECT_NEAR(r.window, 1.0 / (4.0 * r.epsilon), 1e-12);
    ASSERT_EQ(r.entries.size(), 3u);
    for (const auto& e : r.entries) {
        EXPECT_NEAR(e.rhs, r.epsilon * std::pow(e.t, 3), 1e-15);
        EXPECT_NEAR(e.violation, e.lhs - e.rhs, 1e-15);
        EXPECT_GE(e.lhs, 0.0);
    }
    EXPECT_THROW(verify_char_bound({200, 100}, {1e6}), instability_error);
}

TEST(CharBound, HoldsWithEightfoldFactor) {
    for (auto [n, p] : {std::pair{50, 20}, {200, 100}, {500, 400}}) {
        const auto r = verify_char_bound({n, p}, {0.25, 0.5, 1.0, 2.0, 4.0});
        EXPECT_EQ(r.violations_8eps, 0) << n << "," << p;
    }
}

TEST(CharBound, CubicTermDominatesSmallT) {
    // log phi(t) + t^2/2 ~ -i kappa3 t^3 / 6 as t -> 0
    const SimplexDims d(50, 20);
    const double sigma = std::sqrt(spherical_moments(d).variance);
    double k3 = 0.0;
    for (int j = 1; j < d.p; ++j) k3 += polygamma(2, 0.5 * (d.n - j)) - polygamma(2, 0.5 * d.n);
    k3 /= 8.0 * sigma * sigma * sigma;
    const double t = 1e-2;
    const complex r = spherical_log_char(d, t) + 0.5 * t * t;
    EXPECT_NEAR(r.imag(), -k3 * t * t * t / 6.0, 1e-3 * std::abs(k3) * t * t * t);
}

TEST(LogGammaChar, DirectIntegralAndEmpirical) {
    for (double lambda : {0.3, 2.5, 40.0}) {
        const auto r = verify_loggamma_char(lambda, {0.2, 1.0, 3.0}, 100000, RngStream{13, 1});
        EXPECT_LT(r.max_direct_vs_integral, 1e-10) << lambda;
        EXPECT_LT(r.max_direct_vs_empirical, 5.0 / std::sqrt(1e5)) << lambda;
        for (const auto& e : r.entries) EXPECT_TRUE(e.empirical.has_value());
    }
    EXPECT_THROW(verify_loggamma_char(0.0, {1.0}), domain_error);
}

TEST(CompositeBound, ReducesToEpsilonAndDominatesExactNormal) {
    EXPECT_EQ(ks_composite_bound(0.03, 1.0, 1.0, 2.0, 2.0), 0.03);
    EXPECT_THROW(ks_composite_bound(0.1, 0, 0, 0, 1), domain_error);
    EXPECT_THROW(ks_composite_bound(-0.1, 0, 0, 1, 1), domain_error);
    // X ~ N(mu, sigma^2): the true distance of (X - mu_t)/sigma_t from N by grid search
    for (auto [mu, mt, s, st] : {std::tuple{0.0, 0.1, 1.0, 1.0}, {0.0, 0.0, 1.0, 1.3}, {1.0, 0.7, 2.0, 1.6}, {0.0, 0.02, 1.0, 0.98}}) {
        double d = 0.0;
        for (int i = -20000; i <= 20000; ++i) {
            const double x = i * 1e-3;
            d = std::max(d, std::abs(normal_cdf((st * x + mt - mu) / s) - normal_cdf(x)));
        }
        EXPECT_LE(d, ks_composite_bound(0.0, mu, mt, s, st)) << mu << " " << mt << " " << s << " " << st;
    }
}
