/**
 * @file cli.hpp
 * @brief Command implementations behind the `gsm` executable.
 *
 * Each command returns the process exit code: 0 success, 1 a bound was
 * violated, 2 bad input.
 */
#pragma once

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "gsm/bounds.hpp"
#include "gsm/config.hpp"
#include "gsm/montecarlo.hpp"
#include "gsm/version.hpp"

namespace gsm {

enum ExitCode : int { kExitOk = 0, kExitBoundViolated = 1, kExitBadInput = 2 };

inline constexpr std::string_view kResultsCsvHeader =
    "scenario_id,oracle_risk,oracle_index,ure_mean,ure_se,ew_mean,ew_se,t1_shape,t2_budget,"
    "t3_budget,empirical_K,t2_pass,t3_pass";

/// 17 significant digits; round-trips every double.
inline std::string format_real(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline void write_results_csv(std::span<const ComparisonRow> rows, std::ostream& out) {
    out << kResultsCsvHeader << '\n';
    for (const auto& row : rows) {
        out << row.scenario_id << ',' << format_real(row.oracle.oracle_risk) << ','
            << row.oracle.oracle_index << ',' << format_real(row.ure_risk.mean) << ','
            << format_real(row.ure_risk.std_error) << ',' << format_real(row.ew_risk.mean) << ','
            << format_real(row.ew_risk.std_error) << ','
            << format_real(*row.oracle.regret_budget_t1) << ','
            << format_real(*row.oracle.regret_budget_t2) << ','
            << format_real(*row.oracle.regret_budget_t3) << ',' << format_real(row.empirical_k)
            << ',' << (row.t2_pass ? "true" : "false") << ',' << (row.t3_pass ? "true" : "false")
            << '\n';
    }
}

inline nlohmann::json results_json(std::span<const ComparisonRow> rows) {
    nlohmann::json scenarios = nlohmann::json::array();
    for (const auto& row : rows) {
        scenarios.push_back({
            {"scenario_id", row.scenario_id},
            {"oracle_risk", row.oracle.oracle_risk},
            {"oracle_index", row.oracle.oracle_index},
            {"ure_mean", row.ure_risk.mean},
            {"ure_se", row.ure_risk.std_error},
            {"ew_mean", row.ew_risk.mean},
            {"ew_se", row.ew_risk.std_error},
            {"replicates", row.ew_risk.replicates},
            {"t1_shape", *row.oracle.regret_budget_t1},
            {"t2_budget", *row.oracle.regret_budget_t2},
            {"t3_budget", *row.oracle.regret_budget_t3},
            {"combined_budget", *row.oracle.combined_budget},
            {"empirical_K", row.empirical_k},
            {"t2_pass", row.t2_pass},
            {"t3_pass", row.t3_pass},
            {"combined_pass", row.combined_pass},
        });
    }
    return {{"scenarios", scenarios}};
}

/// Provenance record written next to simulation outputs.
struct RunManifest {
    std::string tool_version{kVersion};
    std::string config_digest;
    std::uint64_t base_seed = 0;
    std::vector<std::pair<std::string, double>> timings_seconds;
    std::vector<std::string> outputs;

    nlohmann::json to_json() const {
        nlohmann::json timings = nlohmann::json::object();
        for (const auto& [name, secs] : timings_seconds) timings[name] = secs;
        return {{"tool_version", tool_version},
                {"config_digest", config_digest},
                {"base_seed", base_seed},
                {"timings_seconds", timings},
                {"outputs", outputs}};
    }
};

/**
 * @brief `simulate --config <path> --out <dir>`
 *
 * Writes results.csv, results.json and manifest.json into the output
 * directory. Exit 1 if any t2 or t3 flag is false.
 */
inline int cmd_simulate(const std::filesystem::path& config_path,
                        const std::filesystem::path& out_dir, std::ostream& out, std::ostream& err,
                        std::optional<unsigned> threads_override = std::nullopt) {
    using Clock = std::chrono::steady_clock;
    const auto start = Clock::now();
    ExperimentConfig config;
    try {
        config = load_experiment_config(config_path.string());
    } catch (const ConfigError& e) {
        err << "simulate: config error: " << e.what() << '\n';
        return kExitBadInput;
    }
    const unsigned threads = threads_override.value_or(config.threads);

    RunManifest manifest;
    manifest.config_digest = config.digest();
    manifest.base_seed = config.default_seed;

    std::vector<ComparisonRow> rows;
    try {
        for (const auto& scenario : config.scenarios) {
            const auto t0 = Clock::now();
            rows.push_back(verify_oracle_inequalities(scenario, threads));
            manifest.timings_seconds.emplace_back(
                scenario.id, std::chrono::duration<double>(Clock::now() - t0).count());
        }
    } catch (const std::invalid_argument& e) {
        err << "simulate: " << e.what() << '\n';
        return kExitBadInput;
    }

    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) {
        err << "simulate: cannot create output directory '" << out_dir.string() << "'\n";
        return kExitBadInput;
    }
    const auto csv_path = out_dir / "results.csv";
    const auto json_path = out_dir / "results.json";
    const auto manifest_path = out_dir / "manifest.json";
    {
        std::ofstream csv(csv_path, std::ios::binary);
        write_results_csv(rows, csv);
        std::ofstream json(json_path, std::ios::binary);
        json << results_json(rows).dump(2) << '\n';
        if (!csv || !json) {
            err << "simulate: failed writing outputs\n";
            return kExitBadInput;
        }
    }
    manifest.outputs = {csv_path.string(), json_path.string(), manifest_path.string()};
    manifest.timings_seconds.emplace_back("simulate",
                                          std::chrono::duration<double>(Clock::now() - start).count());
    std::ofstream(manifest_path, std::ios::binary) << manifest.to_json().dump(2) << '\n';

    bool all_pass = true;
    for (const auto& row : rows) {
        out << row.scenario_id << ": oracle " << format_real(row.oracle.oracle_risk) << ", ew "
            << format_real(row.ew_risk.mean) << ", ure " << format_real(row.ure_risk.mean)
            << (row.t2_pass && row.t3_pass ? "  ok" : "  BOUND VIOLATED") << '\n';
        all_pass = all_pass && row.t2_pass && row.t3_pass;
    }
    return all_pass ? kExitOk : kExitBoundViolated;
}

inline nlohmann::json psi_json(const PsiEvaluation& p) {
    return {{"r", p.r}, {"psi", p.psi}, {"epsilon_star", p.epsilon_star},
            {"objective_at_star", p.objective_at_star}};
}

/// `bounds --r <r/sigma^2> --m <#M>`: budgets in units of sigma^2 = 1.
inline int cmd_bounds(double r_over_sigma2, std::uint64_t count_m, std::ostream& out,
                      std::ostream& err) {
    if (!(r_over_sigma2 >= 1.0) || !std::isfinite(r_over_sigma2) || count_m < 1) {
        err << "bounds: need r >= 1 (r^M / sigma^2) and m >= 1\n";
        return kExitBadInput;
    }
    const NoiseLevel unit(1.0);
    const double t2 = budget_weight_count(unit, count_m);
    const double t3 = budget_effective_dimension(unit, r_over_sigma2);
    const nlohmann::json doc = {
        {"r_over_sigma2", r_over_sigma2},
        {"count_M", count_m},
        {"t1_shape", budget_selection_shape(unit, r_over_sigma2)},
        {"t2_budget", t2},
        {"t3_budget", t3},
        {"combined_budget", std::min(t2, t3)},
        {"psi", psi_json(psi(1.0 / r_over_sigma2))},
    };
    out << doc.dump(2) << '\n';
    return kExitOk;
}

/// `psi <r>...`: CSV rows r,psi,epsilon_star.
inline int cmd_psi(std::span<const double> r_values, std::ostream& out, std::ostream& err) {
    if (r_values.empty()) {
        err << "psi: at least one r value is required\n";
        return kExitBadInput;
    }
    for (const double r : r_values) {
        if (!(r >= 0.0 && r <= 1.0)) {
            err << "psi: r must lie in [0, 1], got " << format_real(r) << '\n';
            return kExitBadInput;
        }
    }
    out << "r,psi,epsilon_star\n";
    for (const double r : r_values) {
        const auto p = psi(r);
        out << format_real(p.r) << ',' << format_real(p.psi) << ',' << format_real(p.epsilon_star)
            << '\n';
    }
    return kExitOk;
}

struct LemmaCheckOptions {
    std::string which = "chi2_upper";
    double alpha = 0.25;
    std::optional<std::string> mu_spec;
    std::size_t horizon = kDefaultMaximalHorizon;
    std::size_t replicates = 10000;
    std::optional<std::uint64_t> seed;
    unsigned threads = 0;
};

/**
 * @brief `lemma-check`: empirical maximal inequality against its 1/alpha budget.
 *
 * For the linear statistic, mean-vector families without n= take N = --kmax.
 */
inline int cmd_lemma_check(const LemmaCheckOptions& opts, std::ostream& out, std::ostream& err) {
    RiskEstimate estimate;
    try {
        const MaximalStatistic which = parse_maximal_statistic(opts.which);
        std::optional<MeanVector> mu;
        if (opts.mu_spec) mu = parse_mean_vector(*opts.mu_spec, opts.horizon);
        const std::uint64_t seed = opts.seed ? *opts.seed : default_seed();
        estimate = lemma2_empirical(opts.alpha, which, mu, opts.horizon, opts.replicates, seed,
                                    opts.threads);
    } catch (const std::exception& e) {
        err << "lemma-check: " << e.what() << '\n';
        return kExitBadInput;
    }
    const bool pass = lemma2_holds(estimate, opts.alpha);
    const nlohmann::json doc = {
        {"which", opts.which},          {"alpha", opts.alpha},
        {"budget", 1.0 / opts.alpha},   {"mean", estimate.mean},
        {"std_error", estimate.std_error}, {"replicates", estimate.replicates},
        {"pass", pass},
    };
    out << doc.dump(2) << '\n';
    return pass ? kExitOk : kExitBoundViolated;
}

}  // namespace gsm
