#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/trigamma.hpp>
#include <gtest/gtest.h>

#include "logvol/batch.hpp"
#include "logvol/experiments.hpp"
#include "logvol/limits.hpp"
#include "logvol/stats.hpp"

using namespace logvol;
namespace bq = boost::math::quadrature;

namespace {

constexpr double kPi = std::numbers::pi;

// Levy-Khintchine exponent with x/(1+x^2) compensation, by direct quadrature
std::complex<double> lk_exponent(double alpha, double c1, double c2, double t) {
    auto side = [&](double w) {
        auto f = [&](double x) -> std::complex<double> {
            if (x <= 0.0) return 0.0;
            if (x < 1e-4)  // leading terms, the direct form cancels
                return {-0.5 * t * t * alpha * std::pow(x, 1.0 - alpha), (t - t * t * t / 6.0) * alpha * std::pow(x, 2.0 - alpha)};
            const double h = std::sin(0.5 * t * x);
            const std::complex<double> e(-2.0 * h * h, std::sin(t * x) - t * x / (1.0 + x * x));
            return e * alpha * std::pow(x, -alpha - 1.0);
        };
        auto re = [&](double x) { return f(x).real(); };
        auto im = [&](double x) { return f(x).imag(); };
        bq::tanh_sinh<double> ts;
        std::complex<double> s(ts.integrate(re, 0.0, 1.0), ts.integrate(im, 0.0, 1.0));
        const double X = 2e4;
        for (double a = 1.0; a < X; a += 0.5) {
            s += std::complex<double>(bq::gauss_kronrod<double, 21>::integrate(re, a, a + 0.5, 0, 0),
                                      bq::gauss_kronrod<double, 21>::integrate(im, a, a + 0.5, 0, 0));
        }
        // far tail: -1 and the compensator, the oscillating part is O(X^{-alpha-1})
        s += std::complex<double>(-std::pow(X, -alpha), -t * alpha / (alpha + 1.0) * std::pow(X, -alpha - 1.0));
        return w * s;
    };
    const auto right = side(c2);
    // x -> -x mirrors the t -> -t exponent
    const auto left = std::conj(side(c1));
    return right + left;
}

// Chambers-Mallows-Stuck draw for exponent k |t|^a (1 - i b sgn t tan(pi a/2)) + i mu t, a != 1
double cms_draw(double a, double b, double sigma, double mu, Generator& g) {
    const double u = kPi * (g.uniform() - 0.5);
    const double w = -std::log(g.uniform());
    const double z = b * std::tan(kPi * a / 2.0);
    const double xi = std::atan(z) / a;
    const double x = std::pow(1.0 + z * z, 1.0 / (2.0 * a)) * std::sin(a * (u + xi)) / std::pow(std::cos(u), 1.0 / a) *
                     std::pow(std::cos(u - a * (u + xi)) / w, (1.0 - a) / a);
    return sigma * x + mu;
}

}  // namespace

TEST(TruncatedMoments, ParetoClosedForm) {
    const double a = 1.5, s = 2.0;
    const auto law = RadialLaw::from_log_radius(pareto_log_radius(a, s, 0.0, 1.0));
    for (double c : {3.0, 50.0, 1e4}) {
        const auto t = truncated_mean_var(law, 10, c);
        const double m1 = a * std::pow(s, a) * (std::pow(c, 1 - a) - std::pow(s, 1 - a)) / (1 - a);
        const double m2 = a * std::pow(s, a) * (std::pow(c, 2 - a) - std::pow(s, 2 - a)) / (2 - a);
        EXPECT_NEAR(t.mean, m1, 1e-9 * std::abs(m1)) << c;
        EXPECT_NEAR(t.var, m2 - m1 * m1, 1e-9 * m2) << c;
        EXPECT_NEAR(t.tail_prob, std::pow(c / s, -a), 1e-14) << c;
    }
    EXPECT_THROW(truncated_mean_var(law, 10, 0.0), domain_error);
}

TEST(TruncatedMoments, QuadratureAgreesWithMonteCarlo) {
    const std::size_t N = 400000;
    for (const auto& law : {RadialLaw::scaled_gaussian(), RadialLaw::beta_prime(0.5)}) {
        const int n = 20;
        const auto q = truncated_mean_var(law, n, 0.3);
        const auto m = truncated_mean_var_mc(LogRadiusSampler(law, n), 0.3, N, RngStream{40, 1});
        EXPECT_EQ(m.value.method, "monte-carlo");
        EXPECT_NEAR(q.mean, m.value.mean, 4 * m.se_mean) << law.name();
        EXPECT_NEAR(q.var, m.value.var, 4 * m.se_var) << law.name();
        EXPECT_NEAR(q.tail_prob, m.value.tail_prob, 4 * m.se_tail + 1e-12) << law.name();
    }
    const auto sph = truncated_mean_var(RadialLaw::spherical_unit(), 5, 1.0);
    EXPECT_EQ(sph.mean, 0.0);
    EXPECT_EQ(sph.tail_prob, 0.0);
}

TEST(BetaTerms, WideCutoffRecoversFullMoments) {
    for (auto [n, p] : {std::pair{10, 4}, {40, 39}, {300, 100}}) {
        const auto t = beta_truncated_terms({n, p}, 1e3);
        double m = 0.0, v = 0.0;
        for (int j = 1; j < p; ++j) {
            const double a = 0.5 * (n - j), b = 0.5 * j;
            m += boost::math::digamma(a) - boost::math::digamma(a + b);
            v += boost::math::trigamma(a) - boost::math::trigamma(a + b);
        }
        EXPECT_NEAR(t.sum_mean, m, 1e-9 * (1 + std::abs(m))) << n << "," << p;
        EXPECT_NEAR(t.sum_var, v, 1e-9 * (1 + v)) << n << "," << p;
        EXPECT_LT(t.sum_tail, 1e-200);
    }
}

TEST(BetaTerms, TightCutoffAgreesWithMonteCarlo) {
    // b = 1/2 exercises the substituted branch
    const int n = 6, j = 1;
    const double a = 0.5 * (n - j), b = 0.5 * j, cutoff = 0.4;
    const std::size_t N = 400000;
    const auto y = generate(N, RngStream{41, 0}, 1, [&](Generator& g) { return sample_log_beta(a, b, g); });
    std::vector<double> y1(N), y2(N);
    std::size_t tail = 0;
    for (std::size_t i = 0; i < N; ++i) {
        const bool in = y[i] > -2 * cutoff;
        y1[i] = in ? y[i] : 0.0;
        y2[i] = in ? y[i] * y[i] : 0.0;
        tail += !in;
    }
    const auto s1 = summarize(y1), s2 = summarize(y2);
    const auto t = beta_truncated_terms({n, 2}, cutoff);
    EXPECT_NEAR(t.sum_mean, s1.mean, 4 * s1.se_mean);
    EXPECT_NEAR(t.sum_var, s2.mean - s1.mean * s1.mean, 4 * (s2.se_mean + 2 * std::abs(s1.mean) * s1.se_mean));
    const double pt = double(tail) / N;
    EXPECT_NEAR(t.sum_tail, pt, 4 * std::sqrt(pt * (1 - pt) / N));
}

TEST(NormalConditions, GaussianLawAtExactScale) {
    const auto law = RadialLaw::scaled_gaussian();
    const SimplexDims d(1000, 300);
    const double sigma = std::sqrt(radial_moments(law, d).variance);
    const auto r = check_normal_conditions(law, d, sigma, {0.1, 0.5});
    EXPECT_NEAR(r.condition1, 1.0, 1e-3);
    EXPECT_NEAR(r.condition1, r.condition1_radial + r.condition1_beta, 1e-15);
    ASSERT_EQ(r.condition2.size(), 2u);
    EXPECT_GE(r.condition2[0], r.condition2[1]);
    EXPECT_GT(r.condition2[1], 0.0);
    EXPECT_THROW(check_normal_conditions(law, d, -1.0, {0.1}), domain_error);
    EXPECT_THROW(check_normal_conditions(law, d, 1.0, {0.0}), domain_error);
}

TEST(NormalConditions, ReferenceScales) {
    // spherical: the truncation at 2 sigma_n cuts log-beta terms whose means sit near
    // log(1 - theta), so condition 1 at sigma_n = omega_n exceeds 1; with the cut
    // moved out of reach the beta part is the spherical variance
    const SimplexDims big(10000, 5000);
    const double w = std::sqrt(omega_sq(big));
    const auto at_omega = check_normal_conditions(RadialLaw::spherical_unit(), big, w, {0.1});
    EXPECT_GT(at_omega.condition1, 2.0);
    const double wide = 10.0;
    const auto no_cut = check_normal_conditions(RadialLaw::spherical_unit(), big, wide, {0.1});
    EXPECT_NEAR(no_cut.condition1 * wide * wide, spherical_moments(big).variance, 1e-9);
    EXPECT_NEAR(spherical_moments(big).variance / (w * w), 1.0, 0.05);
    const SimplexDims d(10000, 1000);
    const auto law = RadialLaw::scaled_gaussian();
    const double s2 = d.p * log_radius_moments(law, d.n).var + omega_sq(d);
    EXPECT_NEAR(check_normal_conditions(law, d, std::sqrt(s2), {0.1}).condition1, 1.0, 0.05);
}

TEST(NormalConditions, HeavyTailKeepsTailConditionAwayFromZero) {
    const auto law = RadialLaw::from_log_radius(pareto_log_radius(1.5, 1.0, 0.0, 1.0));
    for (int n : {200, 2000}) {
        const SimplexDims d(n, n / 2);
        const auto r = check_normal_conditions(law, d, propose_sigma_n(law, d), {0.5});
        EXPECT_GT(r.condition2.front(), 0.05) << n;
    }
}

TEST(NormalConditions, ProposedScaleSolvesConditionOne) {
    const auto law = RadialLaw::beta_prime(1.0);
    const SimplexDims d(200, 50);
    const double s = propose_sigma_n(law, d);
    const auto r = check_normal_conditions(law, d, s, {0.1});
    EXPECT_NEAR(r.condition1, 1.0, 1e-9);
}

TEST(Centering, NormalCenteringMatchesExactMeanWhenTailsAreLight) {
    const auto law = RadialLaw::scaled_gaussian();
    const SimplexDims d(1000, 300);
    const auto m = radial_moments(law, d);
    const auto c = centering_normal(law, d, std::sqrt(m.variance));
    EXPECT_NEAR(c.b_n, m.mean, 1e-6 * std::abs(m.mean));
    EXPECT_NEAR(c.omega_n_sq, omega_sq(d), 0.0);
    EXPECT_THROW(centering_normal(law, d, 0.0), domain_error);
}

TEST(Centering, SymmetricStableHasNoCompensation) {
    const auto law = RadialLaw::from_log_radius(pareto_log_radius(1.5, 1.0, 0.5, 0.5));
    const SimplexDims d(100, 30);
    const auto c = centering_stable(law, d, 3.0);
    EXPECT_EQ(c.c_n, 0.0);
    EXPECT_NEAR(c.b_n, spherical_moments(d).mean, 1e-12);
}

TEST(Centering, CompensatedConstantByDirectQuadrature) {
    // one-sided Pareto, s = 1: E[z/(1+z^2)] with z = X/sigma - a_n
    const double alpha = 1.5, sigma = 5.0;
    const auto law = RadialLaw::from_log_radius(pareto_log_radius(alpha, 1.0, 0.0, 1.0));
    const double a_n = truncated_mean_var(law, 10, sigma).mean / sigma;
    auto f = [&](double x) {
        const double z = x / sigma - a_n;
        return z / (1 + z * z) * alpha * std::pow(x, -alpha - 1);
    };
    bq::tanh_sinh<double> ts;
    const double ref = a_n + ts.integrate(f, 1.0, 1e3) + bq::exp_sinh<double>().integrate(f, 1e3, INFINITY);
    EXPECT_NEAR(compensated_centering(law, 10, sigma, a_n), ref, 1e-9);
}

TEST(StableParams, Validation) {
    EXPECT_THROW(StableParams(2.0, 0, 1), domain_error);
    EXPECT_THROW(StableParams(1.5, -1, 1), domain_error);
    EXPECT_THROW(StableParams(1.5, 0, 0), domain_error);
    EXPECT_DOUBLE_EQ(StableParams(1.2, 1, 3).eta(), 0.5);
}

TEST(StableParams, DriftMatchesLevyKhintchineQuadrature) {
    for (auto [alpha, c1, c2] : {std::tuple{1.5, 0.0, 1.0}, {1.5, 0.3, 0.7}, {0.7, 0.2, 1.0}, {1.0, 0.0, 1.0}, {1.2, 1.0, 1.0}})
        for (double t : {0.5, 1.0, -2.0}) {
            const auto lk = lk_exponent(alpha, c1, c2, t);
            const auto cf = stable_log_cf(matched_stable_params(alpha, c1, c2), t);
            EXPECT_NEAR(std::abs(lk - cf), 0.0, 2e-5 * (1 + std::abs(cf))) << alpha << " " << c1 << " " << c2 << " " << t;
        }
}

TEST(StableCdf, CauchyClosedForm) {
    const double c = 0.4;
    const StableParams s(1.0, c, c);
    const double g = c * kPi;
    for (double x : {-30.0, -2.0, -0.3, 0.0, 0.5, 4.0, 25.0})
        EXPECT_NEAR(stable_cdf(s, x), 0.5 + std::atan(x / g) / kPi, 1e-8) << x;
}

TEST(StableCdf, SymmetryAndMonotonicity) {
    const StableParams s(1.5, 0.5, 0.5);
    double prev = 0.0;
    for (int i = -40; i <= 40; ++i) {
        const double x = 0.25 * i;
        const double f = stable_cdf(s, x);
        EXPECT_NEAR(f + stable_cdf(s, -x), 1.0, 1e-8) << x;
        EXPECT_GE(f, prev - 1e-10);
        prev = f;
    }
}

TEST(StableCdf, AgreesWithChambersMallowsStuck) {
    const std::size_t N = 200000;
    for (auto [alpha, c1, c2] : {std::tuple{1.5, 0.0, 1.0}, {0.8, 0.25, 0.75}}) {
        const auto s = matched_stable_params(alpha, c1, c2);
        const double sigma = std::pow(stable_decay_rate(s), 1.0 / alpha);
        const auto x = generate(N, RngStream{50, std::uint64_t(alpha * 10)}, 1,
                                [&](Generator& g) { return cms_draw(alpha, s.eta(), sigma, s.gamma_shift, g); });
        // sup distance over a grid; the heavy tails make a full sup expensive
        auto sorted = x;
        std::sort(sorted.begin(), sorted.end());
        double d = 0.0;
        for (int i = 0; i <= 200; ++i) {
            const double v = -10.0 + 0.15 * i;
            const double emp = double(std::upper_bound(sorted.begin(), sorted.end(), v) - sorted.begin()) / N;
            d = std::max(d, std::abs(emp - stable_cdf(s, v)));
        }
        EXPECT_LT(d, kKs99 / std::sqrt(double(N))) << alpha;
    }
}

TEST(MixedCdf, MatchesNormalConvolution) {
    const auto s = matched_stable_params(1.5, 0.0, 1.0);
    const double q = 0.8;
    auto inner = [&](double x) {
        auto f = [&](double z) { return stable_cdf(s, x - q * z) * normal_pdf(z); };
        double acc = 0.0;
        for (double a = -9.0; a < 9.0; a += 1.0) acc += bq::gauss_kronrod<double, 31>::integrate(f, a, a + 1.0, 0, 0);
        return acc;
    };
    for (double x : {-4.0, -1.0, 0.0, 2.0, 7.0}) EXPECT_NEAR(mixed_cdf(q, s, x), inner(x), 1e-7) << x;
    EXPECT_THROW(mixed_cdf(0.0, s, 0.0), domain_error);
}

TEST(LimitTable, QuantileInvertsCdf) {
    const auto s = matched_stable_params(1.5, 0.0, 1.0);
    const LimitLawTable t([&](double x) { return stable_cdf(s, x); }, -12, 60, 1441);
    for (double u : {0.01, 0.2, 0.5, 0.9, 0.99}) EXPECT_NEAR(t.cdf(t.quantile(u)), u, 1e-4) << u;
    EXPECT_EQ(t.quantile(0.0), -12.0);
    EXPECT_EQ(t.quantile(1.0), 60.0);
}

TEST(StableSetup, MixedScaleBalancesBothParts) {
    const auto s = stable_setup(1.5, {20000, 10000}, true);
    EXPECT_EQ(s.q, 1.0);
    EXPECT_NEAR(s.q_measured, 1.0, 1e-3);
    const auto pure = stable_setup(1.5, {2000, 1000}, false);
    EXPECT_EQ(pure.q, 0.0);
    EXPECT_NEAR(pure.centering.sigma_n, std::pow(1000.0, 1 / 1.5), 1e-9);
}

TEST(StableSetup, DistanceToStableLimitShrinksWithP) {
    std::vector<double> d;
    for (auto [n, p] : {std::pair{200, 100}, {2000, 1000}}) {
        const auto s = stable_setup(1.5, {n, p}, false);
        const auto table = stable_limit_table(s);
        const auto x = standardize(logvol_batch(s.law, s.dims, 20000, RngStream{60, 0}, 1), s.centering.b_n,
                                   s.centering.sigma_n);
        d.push_back(ks_one_sample(x, table).statistic);
    }
    EXPECT_LT(d[1], 0.6 * d[0]);
    EXPECT_LT(d[1], 0.06);
}
