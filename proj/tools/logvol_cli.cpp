// logvol: experiment driver for random-simplex log-volumes.
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "logvol/experiments.hpp"

namespace {

enum Exit { kOk = 0, kConfig = 2, kNumeric = 3 };

struct Flags {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<long long> samples;
    std::optional<long long> workers;
    std::string out;
    std::string format;
    std::string experiment;
    std::vector<std::string> dims;
    std::vector<int> n;
    std::string law;
    std::vector<std::string> params;
};

void add_common(CLI::App* app, Flags& f) {
    app->add_option("--config", f.config_path, "JSON config file; flags override its values");
    app->add_option("--seed", f.seed, "RNG seed (u64)");
    app->add_option("--samples", f.samples, "Monte Carlo sample count per grid point");
    app->add_option("--workers", f.workers, "worker threads (results do not depend on it)");
    app->add_option("--out", f.out, "output path (default: stdout)");
    app->add_option("--format", f.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    app->add_option("--dims", f.dims, "grid point n,p (repeatable)");
    app->add_option("--n", f.n, "dimension list");
    app->add_option("--law", f.law, "law kind: spherical, gaussian, betaprime, pareto, quadratic");
    app->add_option("--param", f.params, "experiment parameter key=value (repeatable)");
}

logvol::ExperimentConfig build_config(const Flags& f) {
    logvol::ExperimentConfig c;
    if (!f.config_path.empty()) {
        std::ifstream in(f.config_path);
        if (!in) throw logvol::config_error("cannot read config '" + f.config_path + "'");
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(in);
        } catch (const nlohmann::json::exception& e) {
            throw logvol::config_error(std::string("config parse error: ") + e.what());
        }
        logvol::apply_config(c, j);
    }
    nlohmann::json over = nlohmann::json::object();
    if (!f.experiment.empty()) over["experiment"] = f.experiment;
    if (f.seed) over["seed"] = *f.seed;
    if (f.samples) over["samples"] = *f.samples;
    if (f.workers) over["workers"] = *f.workers;
    if (!f.out.empty()) over["out"] = f.out;
    if (!f.format.empty()) over["format"] = f.format;
    if (!f.n.empty()) over["n"] = f.n;
    if (!f.dims.empty()) {
        nlohmann::json d = nlohmann::json::array();
        for (const auto& s : f.dims) {
            const auto comma = s.find(',');
            if (comma == std::string::npos) throw logvol::config_error("--dims expects n,p");
            try {
                d.push_back({std::stoi(s.substr(0, comma)), std::stoi(s.substr(comma + 1))});
            } catch (const std::exception&) {
                throw logvol::config_error("--dims expects integers n,p, got '" + s + "'");
            }
        }
        over["dims"] = d;
    }
    if (!f.law.empty()) over["law"] = {{"kind", f.law}};
    if (!f.params.empty()) {
        nlohmann::json p = nlohmann::json::object();
        for (const auto& kv : f.params) {
            const auto eq = kv.find('=');
            if (eq == std::string::npos) throw logvol::config_error("--param expects key=value");
            const std::string key = kv.substr(0, eq), val = kv.substr(eq + 1);
            p[key] = val;
            try {
                std::size_t used = 0;
                const long long i = std::stoll(val, &used);
                if (used == val.size()) {
                    p[key] = i;
                    continue;
                }
                const double v = std::stod(val, &used);
                if (used == val.size()) p[key] = v;
            } catch (const std::exception&) {
            }
        }
        over["params"] = p;
    }
    logvol::apply_config(c, over);
    return c;
}

void emit(const logvol::Table& t, const logvol::ExperimentConfig& c) {
    const std::string payload = logvol::render(t, c.format);
    if (c.out.empty())
        std::cout << payload;
    else
        logvol::write_file(c.out, payload);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Log-volumes of random simplices and log-determinants of random matrices"};
    app.require_subcommand(1);
    Flags f;
    std::string ks_input, ks_column = "value", ks_against;

    auto* sim = app.add_subcommand("simulate", "run a registered Monte Carlo experiment");
    add_common(sim, f);
    sim->add_option("--experiment", f.experiment, "experiment name");
    auto* list = app.add_subcommand("list", "list registered experiments");
    auto* mom = app.add_subcommand("moments", "exact moments for --dims and --n");
    add_common(mom, f);
    auto* bnd = app.add_subcommand("bounds", "Kolmogorov-distance bound table for --dims");
    add_common(bnd, f);
    auto* cst = app.add_subcommand("constants", "expansion constants c0, c1 and residuals for --n");
    add_common(cst, f);
    auto* lim = app.add_subcommand("limits", "stable or mixed limit CDF table");
    add_common(lim, f);
    auto* ks = app.add_subcommand("ks", "Kolmogorov-Smirnov statistic of a CSV column");
    add_common(ks, f);
    ks->add_option("--input", ks_input, "CSV file")->required();
    ks->add_option("--column", ks_column, "column name");
    ks->add_option("--against", ks_against, "second CSV file for a two-sample test (default: normal CDF)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfig;
    }

    try {
        if (list->parsed()) {
            for (const auto& e : logvol::experiment_registry()) std::cout << e.name << "\t" << e.statement << "\n";
            return kOk;
        }
        auto c = build_config(f);
        if (sim->parsed()) {
            if (c.experiment.empty()) throw logvol::config_error("simulate needs --experiment or 'experiment'");
            emit(logvol::run_experiment(c), c);
        } else if (mom->parsed()) {
            emit(logvol::moments_table(c), c);
        } else if (bnd->parsed()) {
            emit(logvol::bounds_table(c), c);
        } else if (cst->parsed()) {
            emit(logvol::constants_table(c), c);
        } else if (lim->parsed()) {
            emit(logvol::limits_table(c), c);
        } else if (ks->parsed()) {
            const auto a = logvol::read_csv_column(ks_input, ks_column);
            const auto r = ks_against.empty() ? logvol::ks_one_sample(a, logvol::normal_cdf)
                                              : logvol::ks_two_sample(a, logvol::read_csv_column(ks_against, ks_column));
            logvol::Table t;
            t.columns = {"statistic", "n_samples", "m_samples", "mc_half_width", "critical_1pct"};
            t.add({r.statistic, std::int64_t(r.n_samples), std::int64_t(r.m_samples), r.mc_half_width, r.critical_1pct});
            logvol::stamp(t, "ks", ks_against.empty() ? "One-sample Kolmogorov-Smirnov statistic against the normal CDF"
                                                      : "Two-sample Kolmogorov-Smirnov statistic",
                          {{"input", ks_input}, {"column", ks_column}, {"against", ks_against}});
            emit(t, c);
        }
    } catch (const logvol::config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfig;
    } catch (const logvol::numeric_failure& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return kNumeric;
    } catch (const logvol::domain_error& e) {
        std::cerr << "domain error: " << e.what() << "\n";
        return kConfig;
    }
    return kOk;
}
