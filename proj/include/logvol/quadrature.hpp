#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdio>
#include <limits>
#include <queue>
#include <string>
#include <type_traits>
#include <vector>

#include "logvol/error.hpp"

namespace logvol::quad {

struct Options {
    double abs_tol = 1e-13;
    double rel_tol = 1e-12;
    int max_intervals = 4000;
    bool throw_on_failure = true;
};

template <class T>
struct Result {
    T value{};
    double error = 0.0;
    int evaluations = 0;
    bool converged = false;
};

namespace detail {

// Gauss-Kronrod 7/15 abscissae and weights.
inline constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

inline double abs_of(double x) { return std::abs(x); }
inline double abs_of(const std::complex<double>& z) { return std::abs(z); }
inline bool is_finite(double x) { return std::isfinite(x); }
inline bool is_finite(const std::complex<double>& z) {
    return std::isfinite(z.real()) && std::isfinite(z.imag());
}

template <class T>
struct Panel {
    double a, b;
    T value;
    double error;
    bool operator<(const Panel& o) const { return error < o.error; }
};

template <class T, class F>
Panel<T> gk15(F& f, double a, double b, int& evals) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    const T fc = f(c);
    T kron = fc * kWgk[7];
    T gauss = fc * kWg[3];
    for (int i = 0; i < 7; ++i) {
        const double dx = h * kXgk[i];
        const T f1 = f(c - dx);
        const T f2 = f(c + dx);
        kron += (f1 + f2) * kWgk[i];
        if (i % 2 == 1) gauss += (f1 + f2) * kWg[i / 2];
    }
    evals += 15;
    const T value = kron * h;
    if (!is_finite(value)) throw quadrature_failure("quadrature: non-finite integrand value");
    return {a, b, value, abs_of((kron - gauss) * h)};
}

}  // namespace detail

// Globally adaptive Gauss-Kronrod over [a,b] split at the given interior points.
template <class F>
auto integrate_pieces(F&& f, const std::vector<double>& points, const Options& opt = {})
    -> Result<std::decay_t<decltype(f(0.0))>> {
    using T = std::decay_t<decltype(f(0.0))>;
    Result<T> res;
    if (points.size() < 2) return res;
    std::priority_queue<detail::Panel<T>> heap;
    T total{};
    double err = 0.0, mass = 0.0;
    for (std::size_t i = 0; i + 1 < points.size(); ++i) {
        if (points[i + 1] == points[i]) continue;
        auto p = detail::gk15<T>(f, points[i], points[i + 1], res.evaluations);
        total += p.value;
        err += p.error;
        mass += detail::abs_of(p.value);
        heap.push(p);
    }
    constexpr double kRoundoff = 100.0 * std::numeric_limits<double>::epsilon();
    while (!heap.empty()) {
        // the roundoff floor keeps tolerances near machine precision attainable
        const double target = std::max({opt.abs_tol, opt.rel_tol * detail::abs_of(total), kRoundoff * mass});
        if (err <= target) {
            res.converged = true;
            break;
        }
        if (static_cast<int>(heap.size()) >= opt.max_intervals) break;
        auto worst = heap.top();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b)) break;
        heap.pop();
        auto left = detail::gk15<T>(f, worst.a, mid, res.evaluations);
        auto right = detail::gk15<T>(f, mid, worst.b, res.evaluations);
        total += left.value + right.value - worst.value;
        err += left.error + right.error - worst.error;
        mass += detail::abs_of(left.value) + detail::abs_of(right.value) - detail::abs_of(worst.value);
        heap.push(left);
        heap.push(right);
    }
    // re-sum to shed drift from incremental updates
    T fresh{};
    double fresh_err = 0.0;
    while (!heap.empty()) {
        fresh += heap.top().value;
        fresh_err += heap.top().error;
        heap.pop();
    }
    res.value = fresh;
    res.error = fresh_err;
    if (!res.converged && opt.throw_on_failure)
    {
        char buf[96];
        std::snprintf(buf, sizeof buf, "quadrature: no convergence (error estimate %.3g, value %.6g)", fresh_err,
                      detail::abs_of(fresh));
        throw quadrature_failure(buf);
    }
    return res;
}

template <class F>
auto integrate(F&& f, double a, double b, const Options& opt = {}) {
    return integrate_pieces(std::forward<F>(f), std::vector<double>{a, b}, opt);
}

// [a, inf) through x = a + t/(1-t).
template <class F>
auto integrate_to_infinity(F&& f, double a, const Options& opt = {}) {
    auto g = [&f, a](double t) {
        const double s = 1.0 - t;
        using T = std::decay_t<decltype(f(0.0))>;
        if (s <= 0.0) return T{};
        return f(a + t / s) * (1.0 / (s * s));
    };
    return integrate_pieces(g, std::vector<double>{0.0, 0.5, 0.9, 0.99, 1.0}, opt);
}

// (-inf, b] through x = b - t/(1-t).
template <class F>
auto integrate_from_minus_infinity(F&& f, double b, const Options& opt = {}) {
    auto g = [&f, b](double t) {
        const double s = 1.0 - t;
        using T = std::decay_t<decltype(f(0.0))>;
        if (s <= 0.0) return T{};
        return f(b - t / s) * (1.0 / (s * s));
    };
    return integrate_pieces(g, std::vector<double>{0.0, 0.5, 0.9, 0.99, 1.0}, opt);
}

}  // namespace logvol::quad
