#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "logvol/error.hpp"

namespace logvol {

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

inline double normal_pdf(double x) {
    return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

// Limiting Kolmogorov distribution P(K <= x).
inline double kolmogorov_cdf(double x) {
    if (x <= 0.0) return 0.0;
    if (x < 1.0) {
        // small-x form converges faster
        const double c = std::sqrt(2.0 * std::numbers::pi) / x;
        double s = 0.0;
        for (int k = 1; k <= 20; ++k) {
            const double odd = (2 * k - 1) * std::numbers::pi;
            const double a = odd * odd / (8.0 * x * x);
            s += std::exp(-a);
        }
        return c * s;
    }
    double s = 0.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = std::exp(-2.0 * k * k * x * x);
        s += (k % 2 == 1 ? term : -term);
        if (term < 1e-18) break;
    }
    return 1.0 - 2.0 * s;
}

inline double kolmogorov_quantile(double prob) {
    double lo = 0.2, hi = 5.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (kolmogorov_cdf(mid) < prob ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

inline const double kKs99 = kolmogorov_quantile(0.99);
inline const double kKs95 = kolmogorov_quantile(0.95);

struct KSResult {
    double statistic = 0.0;
    std::size_t n_samples = 0;
    std::size_t m_samples = 0;  // zero for the one-sample test
    double mc_half_width = 0.0;  // 95% Kolmogorov band
    double critical_1pct = 0.0;
};

namespace detail {

inline void require_finite(std::span<const double> v, const char* who) {
    for (double x : v)
        if (!std::isfinite(x)) throw numeric_failure(std::string(who) + ": non-finite sample");
}

}  // namespace detail

// Sup distance between the empirical CDF of `samples` and `cdf`.
template <class Cdf>
KSResult ks_one_sample(std::span<const double> samples, Cdf&& cdf) {
    if (samples.empty()) throw domain_error("ks_one_sample: empty batch");
    detail::require_finite(samples, "ks_one_sample");
    std::vector<double> x(samples.begin(), samples.end());
    std::sort(x.begin(), x.end());
    const double n = static_cast<double>(x.size());
    double d = 0.0;
    std::size_t i = 0;
    while (i < x.size()) {
        std::size_t j = i;
        while (j < x.size() && x[j] == x[i]) ++j;
        const double f = cdf(x[i]);
        d = std::max({d, std::abs(f - i / n), std::abs(j / n - f)});
        i = j;
    }
    KSResult r;
    r.statistic = std::min(1.0, d);
    r.n_samples = x.size();
    r.mc_half_width = kKs95 / std::sqrt(n);
    r.critical_1pct = kKs99 / std::sqrt(n);
    return r;
}

template <class Cdf>
KSResult ks_one_sample(const std::vector<double>& samples, Cdf&& cdf) {
    return ks_one_sample(std::span<const double>(samples), std::forward<Cdf>(cdf));
}

inline KSResult ks_two_sample(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty()) throw domain_error("ks_two_sample: empty batch");
    detail::require_finite(a, "ks_two_sample");
    detail::require_finite(b, "ks_two_sample");
    std::vector<double> x(a.begin(), a.end()), y(b.begin(), b.end());
    std::sort(x.begin(), x.end());
    std::sort(y.begin(), y.end());
    const double n = static_cast<double>(x.size()), m = static_cast<double>(y.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < x.size() && j < y.size()) {
        const double v = std::min(x[i], y[j]);
        while (i < x.size() && x[i] == v) ++i;
        while (j < y.size() && y[j] == v) ++j;
        d = std::max(d, std::abs(i / n - j / m));
    }
    KSResult r;
    r.statistic = std::min(1.0, d);
    r.n_samples = x.size();
    r.m_samples = y.size();
    const double scale = std::sqrt((n + m) / (n * m));
    r.mc_half_width = kKs95 * scale;
    r.critical_1pct = kKs99 * scale;
    return r;
}

inline KSResult ks_two_sample(const std::vector<double>& a, const std::vector<double>& b) {
    return ks_two_sample(std::span<const double>(a), std::span<const double>(b));
}

// Sample mean and variance with standard errors of both.
struct SampleSummary {
    std::size_t count = 0;
    double mean = 0.0;
    double variance = 0.0;
    double se_mean = 0.0;
    double se_variance = 0.0;
};

inline SampleSummary summarize(std::span<const double> v) {
    SampleSummary s;
    s.count = v.size();
    if (v.empty()) return s;
    long double sum = 0.0L;
    for (double x : v) sum += x;
    const long double mean = sum / v.size();
    long double m2 = 0.0L, m4 = 0.0L;
    for (double x : v) {
        const long double d = x - mean;
        const long double d2 = d * d;
        m2 += d2;
        m4 += d2 * d2;
    }
    const double n = static_cast<double>(v.size());
    s.mean = static_cast<double>(mean);
    s.variance = n > 1 ? static_cast<double>(m2 / (n - 1)) : 0.0;
    const double mu4 = static_cast<double>(m4 / n);
    const double var_pop = static_cast<double>(m2 / n);
    s.se_mean = std::sqrt(s.variance / n);
    s.se_variance = std::sqrt(std::max(0.0, mu4 - var_pop * var_pop) / n);
    return s;
}

inline SampleSummary summarize(const std::vector<double>& v) {
    return summarize(std::span<const double>(v));
}

// CDF tabulated on a uniform grid and linearly interpolated; falls back to the
// exact function outside the grid.
class TabulatedCdf {
public:
    TabulatedCdf(std::function<double(double)> cdf, double lo, double hi, int nodes)
        : exact_(std::move(cdf)), lo_(lo), hi_(hi), values_(nodes) {
        if (!(hi > lo) || nodes < 2) throw domain_error("TabulatedCdf: bad grid");
        step_ = (hi - lo) / (nodes - 1);
        for (int i = 0; i < nodes; ++i) values_[i] = exact_(lo + i * step_);
        for (int i = 1; i < nodes; ++i) values_[i] = std::max(values_[i], values_[i - 1]);
    }

    double operator()(double x) const {
        if (!(x >= lo_ && x < hi_)) return exact_(x);
        const double t = (x - lo_) / step_;
        const auto i = static_cast<std::size_t>(t);
        if (i + 1 >= values_.size()) return values_.back();
        const double w = t - i;
        return values_[i] + w * (values_[i + 1] - values_[i]);
    }

    double lo() const { return lo_; }
    double hi() const { return hi_; }

private:
    std::function<double(double)> exact_;
    double lo_, hi_, step_ = 1.0;
    std::vector<double> values_;
};

}  // namespace logvol
