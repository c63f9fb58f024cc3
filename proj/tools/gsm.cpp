// Command-line front end: simulate, bounds, psi, lemma-check.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gsm/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Projection estimation, URE selection and exponential weighting in the Gaussian "
                 "sequence model"};
    app.set_version_flag("--version", std::string(gsm::kVersion));
    app.require_subcommand(1);

    unsigned threads = 0;
    app.add_option("--threads", threads, "Worker threads (0 = hardware concurrency)");

    auto* simulate = app.add_subcommand("simulate", "Run a scenario file and verify the oracle inequalities");
    std::string config_path;
    std::string out_dir;
    simulate->add_option("--config", config_path, "Experiment file")->required();
    simulate->add_option("--out", out_dir, "Output directory")->required();

    auto* bounds = app.add_subcommand("bounds", "Print regret budgets for r^M/sigma^2 and #M");
    double r_over_sigma2 = 0.0;
    std::uint64_t count_m = 0;
    bounds->add_option("--r", r_over_sigma2, "r^M(mu) / sigma^2")->required();
    bounds->add_option("--m", count_m, "Number of models #M")->required();

    auto* psi = app.add_subcommand("psi", "Evaluate Psi(r) and its minimiser");
    std::vector<double> r_values;
    psi->add_option("r", r_values, "Values in [0, 1]")->required();

    auto* lemma = app.add_subcommand("lemma-check", "Empirical maximal inequality vs. 1/alpha");
    gsm::LemmaCheckOptions opts;
    std::string mu_spec;
    std::uint64_t seed = 0;
    lemma->add_option("--which", opts.which, "chi2_upper | linear | chi2_lower")->required();
    lemma->add_option("--alpha", opts.alpha, "alpha")->required();
    auto* mu_opt = lemma->add_option("--mu", mu_spec, "Mean vector family (linear statistic)");
    lemma->add_option("--kmax", opts.horizon, "Truncation horizon / default support length");
    lemma->add_option("--reps", opts.replicates, "Replicates");
    auto* seed_opt = lemma->add_option("--seed", seed, "Seed (default: $GSM_SEED or 1)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return gsm::kExitBadInput;
    }

    if (simulate->parsed()) {
        return gsm::cmd_simulate(config_path, out_dir, std::cout, std::cerr,
                                 threads == 0 ? std::nullopt : std::optional<unsigned>(threads));
    }
    if (bounds->parsed()) {
        return gsm::cmd_bounds(r_over_sigma2, count_m, std::cout, std::cerr);
    }
    if (psi->parsed()) {
        return gsm::cmd_psi(r_values, std::cout, std::cerr);
    }
    if (mu_opt->count() > 0) opts.mu_spec = mu_spec;
    if (seed_opt->count() > 0) opts.seed = seed;
    opts.threads = threads;
    return gsm::cmd_lemma_check(opts, std::cout, std::cerr);
}
