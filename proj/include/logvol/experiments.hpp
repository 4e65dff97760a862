#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <numbers>
#include <string>
#include <vector>

#include <json.hpp>

#include "logvol/asymptotics.hpp"
#include "logvol/batch.hpp"
#include "logvol/error.hpp"
#include "logvol/io.hpp"
#include "logvol/limits.hpp"
#include "logvol/sampling.hpp"
#include "logvol/simplex.hpp"
#include "logvol/stats.hpp"

namespace logvol {

using json = nlohmann::json;

struct ExperimentConfig {
    std::string experiment;
    std::vector<SimplexDims> dims;
    std::vector<int> n_values;
    json law = {{"kind", "spherical"}};
    std::size_t samples = 10000;
    std::uint64_t seed = 1;
    unsigned workers = 1;
    std::string format = "csv";
    std::string out;
    json params = json::object();

    double param(const std::string& key, double fallback) const {
        if (!params.contains(key)) return fallback;
        if (!params[key].is_number()) throw config_error("parameter '" + key + "' must be a number");
        return params[key].get<double>();
    }
};

// ---- configuration -------------------------------------------------------------

namespace detail {

template <class T>
T get_or(const json& j, const char* key, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw config_error(std::string("config key '") + key + "': " + e.what());
    }
}

inline std::vector<SimplexDims> parse_dims(const json& j) {
    std::vector<SimplexDims> out;
    if (!j.is_array()) throw config_error("'dims' must be an array of [n, p] pairs");
    for (const auto& e : j) {
        if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() || !e[1].is_number_integer())
            throw config_error("'dims' entries must be [n, p] integer pairs");
        try {
            out.emplace_back(e[0].get<int>(), e[1].get<int>());
        } catch (const domain_error& err) {
            throw config_error(err.what());
        }
    }
    return out;
}

}  // namespace detail

// Fields of `j` override those already in `c`.
inline void apply_config(ExperimentConfig& c, const json& j) {
    if (!j.is_object()) throw config_error("config must be a JSON object");
    static const std::vector<std::string> known = {"experiment", "dims", "n", "theta", "law", "samples",
                                                   "seed", "workers", "format", "out", "params"};
    for (const auto& [k, v] : j.items())
        if (std::find(known.begin(), known.end(), k) == known.end())
            throw config_error("unknown config key '" + k + "'");
    c.experiment = detail::get_or<std::string>(j, "experiment", c.experiment);
    if (j.contains("n")) {
        c.n_values.clear();
        for (const auto& v : j["n"]) {
            if (!v.is_number_integer() || v.get<long long>() < 1) throw config_error("'n' entries must be positive integers");
            c.n_values.push_back(v.get<int>());
        }
    }
    if (j.contains("dims")) c.dims = detail::parse_dims(j["dims"]);
    if (j.contains("theta")) {
        const double th = detail::get_or<double>(j, "theta", 0.5);
        if (!(th >= 0.0 && th < 1.0)) throw config_error("'theta' must lie in [0,1)");
        c.dims.clear();
        for (int n : c.n_values) c.dims.emplace_back(n, static_cast<int>(std::floor(th * n)) + 1);
    }
    if (j.contains("law")) c.law = j["law"].is_string() ? json{{"kind", j["law"]}} : j["law"];
    if (j.contains("samples")) {
        const auto s = detail::get_or<long long>(j, "samples", 1);
        if (s < 1) throw config_error("'samples' must be at least 1");
        c.samples = static_cast<std::size_t>(s);
    }
    if (j.contains("seed")) {
        if (!j["seed"].is_number_unsigned() && !j["seed"].is_number_integer())
            throw config_error("'seed' must be a non-negative integer");
        c.seed = j["seed"].get<std::uint64_t>();
    }
    if (j.contains("workers")) {
        const auto w = detail::get_or<long long>(j, "workers", 1);
        if (w < 1) throw config_error("'workers' must be at least 1");
        c.workers = static_cast<unsigned>(w);
    }
    c.format = detail::get_or<std::string>(j, "format", c.format);
    if (c.format != "csv" && c.format != "json") throw config_error("'format' must be csv or json");
    c.out = detail::get_or<std::string>(j, "out", c.out);
    if (j.contains("params")) {
        if (!j["params"].is_object()) throw config_error("'params' must be an object");
        for (const auto& [k, v] : j["params"].items()) c.params[k] = v;
    }
}

// Canonical echo of the configuration (output path and worker count excluded:
// neither changes the payload).
inline json config_echo(const ExperimentConfig& c) {
    json dims = json::array();
    for (auto d : c.dims) dims.push_back({d.n, d.p});
    return {{"experiment", c.experiment}, {"dims", dims},      {"n", c.n_values},
            {"law", c.law},               {"samples", c.samples}, {"seed", c.seed},
            {"format", c.format},         {"params", c.params}};
}

// ---- laws from configuration ---------------------------------------------------------

inline RadialLaw make_law(const json& spec) {
    const std::string kind = detail::get_or<std::string>(spec, "kind", "spherical");
    if (kind == "spherical") return RadialLaw::spherical_unit();
    if (kind == "gaussian") return RadialLaw::scaled_gaussian();
    if (kind == "betaprime") {
        const double phi = detail::get_or<double>(spec, "phi", 1.0);
        if (!(phi > 0.0)) throw config_error("betaprime: 'phi' must be positive");
        return RadialLaw::beta_prime(phi);
    }
    if (kind == "pareto") {
        const double a = detail::get_or<double>(spec, "alpha", 1.5);
        const double s = detail::get_or<double>(spec, "scale", 1.0);
        const double l = detail::get_or<double>(spec, "left", 0.0);
        const double r = detail::get_or<double>(spec, "right", 1.0 - l);
        return RadialLaw::from_log_radius(pareto_log_radius(a, s, l, r));
    }
    if (kind == "quadratic") {
        // g(x) = 1 + tilt x^2, h(x) = x^2/2
        const double tilt = detail::get_or<double>(spec, "tilt", 0.0);
        if (tilt < 0.0 || tilt > 0.05) throw config_error("quadratic: 'tilt' must lie in [0, 0.05]");
        AdmissiblePair p;
        p.name = "quadratic";
        p.g = [tilt](double x) { return 1.0 + tilt * x * x; };
        p.h = [](double x) { return 0.5 * x * x; };
        p.x0 = 0.0;
        p.delta = 1.0;
        p.alpha = 2.0;
        p.c = 0.5;
        p.Cbound = 1.0 + tilt;
        return RadialLaw::custom(std::move(p));
    }
    throw config_error("unknown law kind '" + kind + "'");
}

// ---- shared pieces --------------------------------------------------------------------

inline std::vector<double> standardize(std::vector<double> v, double mean, double sd) {
    for (auto& x : v) x = (x - mean) / sd;
    return v;
}

// Log-volumes through the radial representation; spherical laws skip the radius draws.
inline std::vector<double> logvol_batch(const RadialLaw& law, SimplexDims d, std::size_t count,
                                        RngStream stream, unsigned workers) {
    if (law.kind == RadialKind::SphericalUnit)
        return generate(count, stream, workers, [d](Generator& g) { return sample_logvol_spherical(d, g); });
    const LogRadiusSampler radius(law, d.n);
    return generate(count, stream, workers,
                    [&radius, d](Generator& g) { return sample_logvol_radial(radius, d, g); });
}

inline std::vector<double> goodman_batch(int n, std::size_t count, RngStream stream, unsigned workers) {
    return generate(count, stream, workers, [n](Generator& g) { return goodman_sample_logdet(n, g); });
}

inline RngStream grid_stream(const ExperimentConfig& c, std::size_t point) {
    return RngStream{c.seed, 0}.child(point);
}

// Setup for the heavy-tailed limit experiments.
struct StableSetup {
    RadialLaw law;
    SimplexDims dims;
    CenteringSequences centering;
    StableParams params;
    double q = 0.0;          // Gaussian weight of the mixed limit, 0 for the pure stable one
    double q_measured = 0.0; // spherical sd / sigma_n
};

// Pure case: one-sided Pareto log-radius with unit scale, sigma_n = p^{1/alpha}.
// Mixed case: sigma_n = omega_n and the Pareto scale omega_n p^{-1/alpha}, which
// balances the Gaussian and stable parts.
inline StableSetup stable_setup(double alpha, SimplexDims d, bool mixed) {
    StableSetup s;
    s.dims = d;
    double sigma = std::pow(double(d.p), 1.0 / alpha);
    double scale = 1.0;
    if (mixed) {
        const double w2 = omega_sq(d);
        if (!(w2 > 0.0)) throw config_error("mixed limit: omega_n^2 must be positive for these dims");
        sigma = std::sqrt(w2);
        scale = sigma * std::pow(double(d.p), -1.0 / alpha);
    }
    s.law = RadialLaw::from_log_radius(pareto_log_radius(alpha, scale, 0.0, 1.0));
    s.centering = centering_stable(s.law, d, sigma);
    s.params = matched_stable_params(alpha, 0.0, 1.0);
    s.q_measured = std::sqrt(spherical_moments(d).variance) / sigma;
    s.q = mixed ? 1.0 : 0.0;
    return s;
}

// Tabulated limit CDF of a stable setup on a range covering the bulk.
inline TabulatedCdf stable_limit_table(const StableSetup& s, double lo = -12.0, double hi = 60.0,
                                       int nodes = 3601) {
    const StableParams p = s.params;
    const double q = s.q;
    std::function<double(double)> f;
    if (q > 0.0)
        f = [p, q](double x) { return mixed_cdf(q, p, x); };
    else
        f = [p](double x) { return stable_cdf(p, x); };
    return TabulatedCdf(f, lo, hi, nodes);
}

// ---- registry ----------------------------------------------------------------------------

struct ExperimentInfo {
    std::string name;
    std::string statement;
    std::function<Table(const ExperimentConfig&)> run;
};

namespace detail {

inline void require_dims(const ExperimentConfig& c) {
    if (c.dims.empty()) throw config_error("experiment '" + c.experiment + "' needs 'dims' (or 'n' with 'theta')");
}

inline std::vector<int> n_list(const ExperimentConfig& c, std::vector<int> fallback) {
    return c.n_values.empty() ? fallback : c.n_values;
}

inline Table spherical_ks_scan(const ExperimentConfig& c) {
    require_dims(c);
    Table t;
    t.columns = {"n", "p", "theta", "d_ks", "mc_half_width", "ks_bound", "applicable", "ratio"};
    for (std::size_t k = 0; k < c.dims.size(); ++k) {
        const auto d = c.dims[k];
        if (d.p < 2) throw config_error("spherical-ks-scan: p must be at least 2");
        const auto m = spherical_moments(d);
        const auto v = standardize(logvol_batch(RadialLaw::spherical_unit(), d, c.samples, grid_stream(c, k), c.workers),
                                   m.mean, std::sqrt(m.variance));
        const auto ks = ks_one_sample(v, normal_cdf);
        const auto b = spherical_ks_bound(d);
        t.add({std::int64_t(d.n), std::int64_t(d.p), d.theta(), ks.statistic, ks.mc_half_width, b.ks_bound,
               b.applicable, ks.statistic / b.ks_bound});
    }
    return t;
}

inline Table radial_ks_scan(const ExperimentConfig& c) {
    require_dims(c);
    const RadialLaw law = make_law(c.law);
    Table t;
    t.columns = {"n", "p", "law", "d_ks", "mc_half_width", "spherical_bound", "ratio"};
    for (std::size_t k = 0; k < c.dims.size(); ++k) {
        const auto d = c.dims[k];
        const auto m = radial_moments(law, d);
        if (!(m.variance > 0.0)) throw config_error("radial-ks-scan: zero variance at these dims");
        const auto v = standardize(logvol_batch(law, d, c.samples, grid_stream(c, k), c.workers), m.mean,
                                   std::sqrt(m.variance));
        const auto ks = ks_one_sample(v, normal_cdf);
        const double bound = d.p >= 2 ? spherical_ks_bound(d).ks_bound : 1.0;
        t.add({std::int64_t(d.n), std::int64_t(d.p), law.name(), ks.statistic, ks.mc_half_width, bound,
               ks.statistic / bound});
    }
    return t;
}

inline Table logvol_histogram(const ExperimentConfig& c) {
    const auto d = c.dims.empty() ? SimplexDims(1000, 300) : c.dims.front();
    Table t;
    t.columns = {"law", "index", "standardized_log_volume"};
    std::size_t k = 0;
    for (const auto& law : {RadialLaw::spherical_unit(), RadialLaw::scaled_gaussian()}) {
        const auto m = radial_moments(law, d);
        const auto v = standardize(logvol_batch(law, d, c.samples, grid_stream(c, k++), c.workers), m.mean,
                                   std::sqrt(m.variance));
        for (std::size_t i = 0; i < v.size(); ++i) t.add({law.name(), std::int64_t(i), v[i]});
    }
    return t;
}

// Columns: p i.i.d. vertex vectors in R^n. Rows: n i.i.d. rotationally invariant
// rows in R^p forming the same n x p matrix.
inline Table rows_columns_histogram(const ExperimentConfig& c) {
    const auto d = c.dims.empty() ? SimplexDims(100, 30) : c.dims.front();
    const RadialLaw law = make_law(c.law.contains("kind") && c.law["kind"] != "spherical" ? c.law
                                                                                       : json{{"kind", "betaprime"}, {"phi", 1.0}});
    const LogRadiusSampler col_radius(law, d.n), row_radius(law, d.p);
    Table t;
    t.columns = {"variant", "index", "log_volume", "degenerate"};
    const auto cols = generate(c.samples, grid_stream(c, 0), c.workers, [&](Generator& g) {
        const auto lv = sample_logvol_gram(col_radius, d, g);
        return lv.degenerate ? std::nan("") : lv.log_volume;
    });
    const auto rows = generate(c.samples, grid_stream(c, 1), c.workers, [&](Generator& g) {
        std::vector<std::vector<double>> r(d.n);
        for (auto& y : r) {
            y = sample_sphere_point(d.p, g);
            const double rad = std::exp(row_radius(g));
            for (auto& v : y) v *= rad;
        }
        std::vector<std::vector<double>> columns(d.p, std::vector<double>(d.n));
        for (int i = 0; i < d.n; ++i)
            for (int j = 0; j < d.p; ++j) columns[j][i] = r[i][j];
        const auto lv = log_volume_gram(columns);
        return lv.degenerate ? std::nan("") : lv.log_volume;
    });
    for (std::size_t i = 0; i < cols.size(); ++i) t.add({"columns", std::int64_t(i), cols[i], std::isnan(cols[i])});
    for (std::size_t i = 0; i < rows.size(); ++i) t.add({"rows", std::int64_t(i), rows[i], std::isnan(rows[i])});
    t.note("law", law.name());
    return t;
}

inline Table gaussian_logdet_scan(const ExperimentConfig& c) {
    Table t;
    t.columns = {"n", "d_ks", "mc_half_width", "reference", "scaled"};
    const auto ns = n_list(c, {100, 1000, 10000});
    for (std::size_t k = 0; k < ns.size(); ++k) {
        const int n = ns[k];
        const auto m = gaussian_logdet_moments(n);
        const auto v = standardize(goodman_batch(n, c.samples, grid_stream(c, k), c.workers), m.mean,
                                   std::sqrt(m.variance));
        const auto ks = ks_one_sample(v, normal_cdf);
        const double ref = gaussian_rate(n);
        t.add({std::int64_t(n), ks.statistic, ks.mc_half_width, ref, ks.statistic / ref});
    }
    return t;
}

// sup over |x| <= n^{1/6} - 1 of |I(x) sqrt(2 pi) e^{x^2/2} - 1| sqrt(n) / (1 + |x|^3)
inline Table laplace_density_scan(const ExperimentConfig& c) {
    const RadialLaw law = make_law(c.law.contains("kind") && c.law["kind"] != "spherical"
                                       ? c.law
                                       : json{{"kind", "quadratic"}, {"tilt", 0.02}});
    if (law.kind != RadialKind::CustomAdmissible) throw config_error("laplace-density-scan: needs a custom law");
    Table t;
    t.columns = {"n", "window", "scaled_sup_deviation", "mean", "sd"};
    for (int n : n_list(c, {100, 1000, 10000})) {
        const auto rep = check_admissible(*law.pair, n);
        if (!rep.ok) throw config_error("law is not admissible: " + rep.failures.front());
        const LaplaceDensity dens(law.pair, n);
        const double w = std::pow(double(n), 1.0 / 6.0) - 1.0;
        double sup = 0.0;
        for (int i = -400; i <= 400; ++i) {
            const double x = w * i / 400.0;
            const double dev = std::abs(dens.standardized(x) / normal_pdf(x) - 1.0);
            sup = std::max(sup, dev * std::sqrt(double(n)) / (1.0 + std::abs(x * x * x)));
        }
        t.add({std::int64_t(n), w, sup, dens.mean(), dens.sd()});
    }
    return t;
}

inline double sigma_from_params(const ExperimentConfig& c, const RadialLaw& law, SimplexDims d) {
    const std::string mode = c.params.contains("sigma_n") && c.params["sigma_n"].is_string()
                                 ? c.params["sigma_n"].get<std::string>()
                                 : (c.params.contains("sigma_n") ? "value" : "exact");
    if (mode == "value") {
        const double s = c.param("sigma_n", 1.0);
        if (!(s > 0.0)) throw config_error("'sigma_n' must be positive");
        return s;
    }
    if (mode == "exact") return std::sqrt(radial_moments(law, d).variance);
    if (mode == "proposed") return propose_sigma_n(law, d);
    throw config_error("'sigma_n' must be a number, \"exact\" or \"proposed\"");
}

inline Table normal_limit(const ExperimentConfig& c) {
    require_dims(c);
    const RadialLaw law = make_law(c.law);
    Table t;
    t.columns = {"n", "p", "law", "sigma_n", "b_n", "condition1", "condition2_eps_0.1", "d_ks", "mc_half_width"};
    for (std::size_t k = 0; k < c.dims.size(); ++k) {
        const auto d = c.dims[k];
        const double sigma = sigma_from_params(c, law, d);
        const auto cs = centering_normal(law, d, sigma);
        const auto cond = check_normal_conditions(law, d, sigma, {0.1});
        const auto v = standardize(logvol_batch(law, d, c.samples, grid_stream(c, k), c.workers), cs.b_n, sigma);
        const auto ks = ks_one_sample(v, normal_cdf);
        t.add({std::int64_t(d.n), std::int64_t(d.p), law.name(), sigma, cs.b_n, cond.condition1,
               cond.condition2.front(), ks.statistic, ks.mc_half_width});
    }
    return t;
}

inline Table heavy_limit(const ExperimentConfig& c, bool mixed) {
    require_dims(c);
    const double alpha = c.param("alpha", 1.5);
    if (!(alpha > 0.0 && alpha < 2.0)) throw config_error("'alpha' must lie in (0,2)");
    Table t;
    t.columns = {"n", "p", "alpha", "sigma_n", "b_n", "c_n", "shift", "q", "q_measured", "d_ks", "mc_half_width"};
    for (std::size_t k = 0; k < c.dims.size(); ++k) {
        const auto d = c.dims[k];
        const auto s = stable_setup(alpha, d, mixed);
        const auto table = stable_limit_table(s);
        const auto v = standardize(logvol_batch(s.law, d, c.samples, grid_stream(c, k), c.workers),
                                   s.centering.b_n, s.centering.sigma_n);
        const auto ks = ks_one_sample(v, table);
        t.add({std::int64_t(d.n), std::int64_t(d.p), alpha, s.centering.sigma_n, s.centering.b_n, s.centering.c_n,
               s.params.gamma_shift, s.q, s.q_measured, ks.statistic, ks.mc_half_width});
    }
    return t;
}

}  // namespace detail

inline const std::vector<ExperimentInfo>& experiment_registry() {
    static const std::vector<ExperimentInfo> reg = {
        {"spherical-ks-scan",
         "Berry-Esseen rate for the spherical simplex: empirical Kolmogorov distance of the standardized "
         "log-volume against the explicit bound 28 theta^2/(n(1-theta)(log(1/(1-theta))-theta)^{3/2}), valid for p >= 41",
         detail::spherical_ks_scan},
        {"radial-ks-scan",
         "Normal approximation for radially admissible laws: Kolmogorov distance of the log-volume "
         "standardized by its exact mean and variance",
         detail::radial_ks_scan},
        {"logvol-histogram",
         "Standardized log-volumes of spherical and Gaussian random simplices for histogram plots",
         detail::logvol_histogram},
        {"rows-columns-histogram",
         "Log-volumes when the p vertex vectors (columns) are i.i.d. rotationally invariant versus when the n rows "
         "of the same n x p matrix are",
         detail::rows_columns_histogram},
        {"gaussian-logdet-scan",
         "Normal approximation of log|det| of an n x n standard Gaussian matrix through the product of "
         "independent chi-square variables, against the reference rate log^{-3/2} n",
         detail::gaussian_logdet_scan},
        {"laplace-density-scan",
         "Local deviation of the standardized log-radius density g e^{-n h} from the normal density on "
         "|x| <= n^{1/6} - 1, scaled by sqrt(n)/(1+|x|^3)",
         detail::laplace_density_scan},
        {"normal-limit",
         "Normal limit of the log-volume under the truncated-variance and tail conditions with centering b_n "
         "and scale sigma_n",
         detail::normal_limit},
        {"stable-limit",
         "alpha-stable limit of the log-volume for a Pareto-tailed log-radius with compensated centering",
         [](const ExperimentConfig& c) { return detail::heavy_limit(c, false); }},
        {"mixed-limit",
         "Mixed Gaussian plus alpha-stable limit when the spherical variance and the heavy radial tail are of the "
         "same order",
         [](const ExperimentConfig& c) { return detail::heavy_limit(c, true); }},
    };
    return reg;
}

inline const ExperimentInfo& find_experiment(const std::string& name) {
    for (const auto& e : experiment_registry())
        if (e.name == name) return e;
    std::string known;
    for (const auto& e : experiment_registry()) known += (known.empty() ? "" : ", ") + e.name;
    throw config_error("unknown experiment '" + name + "' (known: " + known + ")");
}

inline void stamp(Table& t, const std::string& kind, const std::string& statement, const json& echo) {
    Table head;
    head.note("experiment", kind);
    head.note("statement", statement);
    head.note("library_version", kLibraryVersion);
    head.note("config", echo.dump());
    for (auto& kv : t.meta) head.meta.push_back(kv);
    t.meta = std::move(head.meta);
}

inline Table run_experiment(const ExperimentConfig& c) {
    const auto& info = find_experiment(c.experiment);
    Table t = info.run(c);
    stamp(t, info.name, info.statement, config_echo(c));
    return t;
}

// ---- analytic tables for the other subcommands ---------------------------------------

inline Table moments_table(const ExperimentConfig& c) {
    Table t;
    t.columns = {"model", "n", "p", "mean", "variance", "third_abs_bound"};
    const RadialLaw law = make_law(c.law);
    for (auto d : c.dims) {
        const auto m = law.kind == RadialKind::SphericalUnit ? spherical_moments(d) : radial_moments(law, d);
        t.add({law.name(), std::int64_t(d.n), std::int64_t(d.p), m.mean, m.variance,
               m.has_third ? Cell(m.third_abs_bound) : Cell(std::string("na"))});
    }
    for (int n : c.n_values) {
        const auto m = gaussian_logdet_moments(n);
        t.add({"gaussian-logdet", std::int64_t(n), std::int64_t(n), m.mean, m.variance, m.third_abs_bound});
    }
    stamp(t, "moments", "Exact polygamma-sum moments of spherical/radial log-volumes and Gaussian log-determinants",
          config_echo(c));
    return t;
}

inline Table bounds_table(const ExperimentConfig& c) {
    Table t;
    t.columns = {"n", "p", "theta", "epsilon_np", "ks_bound", "applicable", "reason", "theta_capped",
                 "codimension"};
    for (auto d : c.dims) {
        const auto b = spherical_ks_bound(d, c.param("phi", 0.5));
        t.add({std::int64_t(d.n), std::int64_t(d.p), d.theta(), b.epsilon_np, b.ks_bound, b.applicable, b.reason,
               b.alternatives[0].value, b.alternatives[1].value});
    }
    stamp(t, "bounds", "Explicit Kolmogorov-distance bounds for the spherical log-volume and the factor epsilon_{n,p}",
          config_echo(c));
    return t;
}

inline Table constants_table(const ExperimentConfig& c) {
    const auto u = universal_constants();
    Table t;
    t.columns = {"name", "value"};
    t.add({"c0", u.c0});
    t.add({"c1", u.c1});
    t.add({"c1_integral_only", u.c1_integral});
    t.add({"quadrature_error", u.quadrature_error});
    for (int n : c.n_values) {
        const auto g = gaussian_matrix_mean_var_approx(n, u);
        t.add({"mean_residual_n" + std::to_string(n), g.mean_residual});
        t.add({"var_residual_n" + std::to_string(n), g.var_residual});
    }
    stamp(t, "constants",
          "Constants of the expansions E log|det A_n| = 1/2 log (n-1)! + c0 + O(1/n) and "
          "Var log|det A_n| = 1/2 log n + c1 + O(1/n)",
          config_echo(c));
    return t;
}

inline Table limits_table(const ExperimentConfig& c) {
    const double alpha = c.param("alpha", 1.5);
    const double c1 = c.param("c1", 0.0), c2 = c.param("c2", 1.0);
    const double q = c.param("q", 0.0);
    const double lo = c.param("lo", -5.0), hi = c.param("hi", 20.0);
    const int points = static_cast<int>(c.param("points", 101));
    if (points < 2 || !(hi > lo)) throw config_error("limits: need points >= 2 and hi > lo");
    const StableParams sp = c.params.contains("shift") ? StableParams(alpha, c1, c2, c.param("shift", 0.0))
                                                       : matched_stable_params(alpha, c1, c2);
    Table t;
    t.columns = {"x", "cdf"};
    for (int i = 0; i < points; ++i) {
        const double x = lo + (hi - lo) * i / (points - 1);
        t.add({x, q > 0.0 ? mixed_cdf(q, sp, x) : stable_cdf(sp, x)});
    }
    t.note("alpha", format_number(alpha));
    t.note("c1", format_number(c1));
    t.note("c2", format_number(c2));
    t.note("shift", format_number(sp.gamma_shift));
    t.note("q", format_number(q));
    stamp(t, "limits", "Distribution function of q N + Z_alpha by Fourier inversion of its characteristic function",
          config_echo(c));
    return t;
}

}  // namespace logvol
