#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "logvol/error.hpp"

namespace logvol {

using complex = std::complex<double>;

inline constexpr int kMaxPolygammaOrder = 6;
inline constexpr int kMaxPartitionOrder = 12;

namespace detail {

// B_2, B_4, ..., B_40
inline constexpr std::array<double, 20> kBernoulliEven = {
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
    854513.0 / 138.0,
    -236364091.0 / 2730.0,
    8553103.0 / 6.0,
    -23749461029.0 / 870.0,
    8615841276005.0 / 14322.0,
    -7709321041217.0 / 510.0,
    2577687858367.0 / 6.0,
    -26315271553053477373.0 / 1919190.0,
    2929993913841559.0 / 6.0,
    -261082718496449122051.0 / 13530.0,
};

inline double factorial(int k) {
    double f = 1.0;
    for (int i = 2; i <= k; ++i) f *= i;
    return f;
}

inline double real_part(double x) { return x; }
inline double real_part(const complex& z) { return z.real(); }
inline double magnitude(double x) { return std::abs(x); }
inline double magnitude(const complex& z) { return std::abs(z); }

inline bool finite_value(double x) { return std::isfinite(x); }
inline bool finite_value(const complex& z) {
    return std::isfinite(z.real()) && std::isfinite(z.imag());
}

template <class T>
void require_right_half_plane(const T& z, const char* who) {
    if (!finite_value(z)) throw domain_error(std::string(who) + ": non-finite argument");
    if (!(real_part(z) > 0.0))
        throw domain_error(std::string(who) + ": argument must have positive real part");
}

inline double log_of(double x) { return std::log(x); }
inline complex log_of(const complex& z) { return std::log(z); }

template <class T>
T ipow(T base, int e) {
    T r = T(1.0);
    while (e > 0) {
        if (e & 1) r *= base;
        base *= base;
        e >>= 1;
    }
    return r;
}

// Any-order polygamma on re(z) > 0; the public entry points cap the order.
template <class T>
T polygamma_unchecked(int k, T z) {
    const double shift_to = 20.0 + k;
    const double kfact = factorial(k);
    T head = T(0.0);
    while (real_part(z) < shift_to) {
        head += T(1.0) / ipow(z, k + 1);
        z += 1.0;
    }
    const T w = T(1.0) / z;
    const T w2 = w * w;
    T tail;
    if (k == 0) {
        T sum = log_of(z) - 0.5 * w;
        T zp = T(1.0);
        for (int j = 1; j <= 20; ++j) {
            zp *= w2;
            const T term = kBernoulliEven[j - 1] / (2.0 * j) * zp;
            sum -= term;
            if (magnitude(term) < 1e-17 * magnitude(sum)) break;
        }
        tail = sum;
    } else {
        const T wk = ipow(w, k);
        T sum = factorial(k - 1) * wk + 0.5 * kfact * wk * w;
        // (2j+k-1)!/(2j)!
        double ratio = factorial(k + 1) / 2.0;
        T zp = wk;
        for (int j = 1; j <= 20; ++j) {
            zp *= w2;
            const T term = kBernoulliEven[j - 1] * ratio * zp;
            sum += term;
            if (magnitude(term) < 1e-17 * magnitude(sum)) break;
            ratio *= (2.0 * j + k) * (2.0 * j + k + 1) / ((2.0 * j + 1) * (2.0 * j + 2));
        }
        tail = (k % 2 == 1) ? sum : T(-1.0) * sum;
    }
    const double sign = (k % 2 == 0) ? 1.0 : -1.0;
    return tail - sign * kfact * head;
}

}  // namespace detail

// Principal branch of log Gamma on re(z) > 0.
inline complex log_gamma(complex z) {
    detail::require_right_half_plane(z, "log_gamma");
    complex shift_sum = 0.0;
    while (z.real() < 20.0) {
        shift_sum += std::log(z);
        z += 1.0;
    }
    const complex w = 1.0 / z;
    const complex w2 = w * w;
    complex series = 0.0;
    complex zp = w;
    for (int j = 1; j <= 20; ++j) {
        const complex term = detail::kBernoulliEven[j - 1] / (2.0 * j * (2.0 * j - 1.0)) * zp;
        series += term;
        if (std::abs(term) < 1e-17 * std::abs(series)) break;
        zp *= w2;
    }
    const double half_log_2pi = 0.5 * std::log(2.0 * std::numbers::pi);
    return (z - 0.5) * std::log(z) - z + half_log_2pi + series - shift_sum;
}

inline double log_gamma(double x) {
    detail::require_right_half_plane(x, "log_gamma");
    return std::lgamma(x);
}

inline complex polygamma(int k, complex z) {
    if (k < 0) throw domain_error("polygamma: negative order");
    if (k > kMaxPolygammaOrder) throw unsupported_order("polygamma: order above 6");
    detail::require_right_half_plane(z, "polygamma");
    return detail::polygamma_unchecked<complex>(k, z);
}

inline double polygamma(int k, double x) {
    if (k < 0) throw domain_error("polygamma: negative order");
    if (k > kMaxPolygammaOrder) throw unsupported_order("polygamma: order above 6");
    detail::require_right_half_plane(x, "polygamma");
    return detail::polygamma_unchecked<double>(k, x);
}

inline double digamma(double x) { return polygamma(0, x); }
inline double trigamma(double x) { return polygamma(1, x); }

// Constant C_k with |psi_k(z)| <= C_k / re(z)^k on re(z) >= 1/2, k >= 1.
inline double polygamma_modulus_constant(int k) {
    return detail::factorial(k - 1) + 2.0 * detail::factorial(k);
}

// Sandwich for real x >= 1/2, k >= 1:
// (k-1)!/x^k + k!/(2x^{k+1}) <= |psi_k(x)| <= (k-1)!/x^k + k!/x^{k+1}.
struct Sandwich {
    double lower;
    double upper;
};

inline Sandwich polygamma_sandwich(int k, double x) {
    const double a = detail::factorial(k - 1) / std::pow(x, k);
    const double b = detail::factorial(k) / std::pow(x, k + 1);
    return {a + 0.5 * b, a + b};
}

// ---- partition sums ---------------------------------------------------------

struct PartitionMoment {
    int order;
    double value;
};

// One block-size multiset of {1..k} with the number of set partitions of that shape.
struct PartitionShape {
    std::vector<int> blocks;  // non-increasing
    double count;
};

namespace detail {

inline void integer_partitions(int remaining, int max_part, std::vector<int>& current,
                               std::vector<std::vector<int>>& out) {
    if (remaining == 0) {
        out.push_back(current);
        return;
    }
    for (int part = std::min(remaining, max_part); part >= 1; --part) {
        current.push_back(part);
        integer_partitions(remaining - part, part, current, out);
        current.pop_back();
    }
}

inline std::vector<PartitionShape> build_shapes(int k) {
    std::vector<std::vector<int>> parts;
    std::vector<int> current;
    integer_partitions(k, k, current, parts);
    std::vector<PartitionShape> shapes;
    shapes.reserve(parts.size());
    for (auto& blocks : parts) {
        double denom = 1.0;
        int run = 1;
        for (std::size_t i = 0; i < blocks.size(); ++i) {
            denom *= factorial(blocks[i]);
            if (i > 0 && blocks[i] == blocks[i - 1]) {
                ++run;
                denom *= run;
            } else {
                run = 1;
            }
        }
        shapes.push_back({blocks, factorial(k) / denom});
    }
    return shapes;
}

inline const std::vector<PartitionShape>& shapes_for(int k) {
    static const auto table = [] {
        std::vector<std::vector<PartitionShape>> t(kMaxPartitionOrder + 1);
        for (int i = 1; i <= kMaxPartitionOrder; ++i) t[i] = build_shapes(i);
        return t;
    }();
    return table[k];
}

inline void check_partition_order(int k) {
    if (k < 1) throw domain_error("partition moment: order must be positive");
    if (k > kMaxPartitionOrder)
        throw combinatorial_limit("partition moment: order above " +
                                  std::to_string(kMaxPartitionOrder));
}

// Cumulants kappa_1..kappa_k of log beta_{zeta,eta}.
inline std::vector<double> log_beta_cumulants(int k, double zeta, double eta) {
    if (!(zeta > 0.0) || !(eta > 0.0) || !std::isfinite(zeta) || !std::isfinite(eta))
        throw domain_error("log-beta moment: parameters must be positive");
    std::vector<double> q(k + 1, 0.0);
    for (int j = 1; j <= k; ++j)
        q[j] = polygamma_unchecked<double>(j - 1, zeta) - polygamma_unchecked<double>(j - 1, zeta + eta);
    return q;
}

inline double partition_sum(int k, const std::vector<double>& q, bool skip_singletons) {
    double total = 0.0;
    for (const auto& shape : shapes_for(k)) {
        if (skip_singletons && shape.blocks.back() == 1) continue;
        double prod = shape.count;
        for (int b : shape.blocks) prod *= q[b];
        total += prod;
    }
    return total;
}

}  // namespace detail

// Block-size multisets of set partitions of {1..k}; counts sum to Bell(k).
inline const std::vector<PartitionShape>& partition_shapes(int k) {
    detail::check_partition_order(k);
    return detail::shapes_for(k);
}

inline double set_partition_count(int k, bool singleton_free) {
    double total = 0.0;
    for (const auto& s : partition_shapes(k))
        if (!singleton_free || s.blocks.back() != 1) total += s.count;
    return total;
}

// E[(log beta)^k] as a sum over all set partitions.
inline PartitionMoment log_beta_moment(int k, double zeta, double eta) {
    detail::check_partition_order(k);
    const auto q = detail::log_beta_cumulants(k, zeta, eta);
    return {k, detail::partition_sum(k, q, false)};
}

// E[(log beta - E log beta)^k] as a sum over singleton-free set partitions.
inline PartitionMoment log_beta_central_moment(int k, double zeta, double eta) {
    detail::check_partition_order(k);
    const auto q = detail::log_beta_cumulants(k, zeta, eta);
    return {k, detail::partition_sum(k, q, true)};
}

}  // namespace logvol
