/**
 * @file montecarlo.hpp
 * @brief Reproducible Monte Carlo risk estimation and oracle-inequality checks.
 *
 * Replicate r of a scenario draws from the substream (base_seed, stream_id, r),
 * where stream_id is a hash of the scenario name. Per-replicate results are
 * stored and then summed sequentially, so every estimate is bit-identical for
 * any thread count.
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <exception>
#include <functional>
#include <limits>
#include <mutex>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "gsm/bounds.hpp"
#include "gsm/estimators.hpp"
#include "gsm/risk.hpp"
#include "gsm/rng.hpp"
#include "gsm/sequence_model.hpp"

namespace gsm {

/// Acceptance margin for every Monte Carlo check, in standard errors.
inline constexpr double kPassStandardErrors = 4.0;

enum class EstimatorKind { Ure, ExponentialWeights, Both };

inline std::string_view to_string(EstimatorKind kind) {
    switch (kind) {
        case EstimatorKind::Ure: return "ure";
        case EstimatorKind::ExponentialWeights: return "ew";
        case EstimatorKind::Both: return "both";
    }
    return "both";
}

inline EstimatorKind parse_estimator_kind(std::string_view text) {
    if (text == "ure" || text == "URE") return EstimatorKind::Ure;
    if (text == "ew" || text == "EW") return EstimatorKind::ExponentialWeights;
    if (text == "both" || text == "BOTH") return EstimatorKind::Both;
    throw std::invalid_argument("unknown estimator '" + std::string(text) + "'");
}

struct ScenarioConfig {
    std::string id = "scenario";
    std::string mu_spec = "zero";
    NoiseLevel sigma{1.0};
    ModelIndexSet models = ModelIndexSet::range(1, 1);
    std::size_t replicates = 1;
    std::uint64_t base_seed = 1;
    EstimatorKind estimator = EstimatorKind::Both;

    /// Parsed mean vector; families without an explicit n= use N = max(M).
    MeanVector mean_vector() const {
        MeanVector mu = parse_mean_vector(mu_spec, models.max());
        models.require_within(mu.size());
        return mu;
    }

    std::uint64_t stream_id() const noexcept { return fnv1a64(id); }

    void validate() const {
        if (replicates < 1) {
            throw std::invalid_argument("scenario '" + id + "': replicates must be >= 1");
        }
        (void)mean_vector();
    }
};

/// Monte Carlo mean with its standard error.
struct RiskEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::size_t replicates = 0;

    /// Sequential two-pass summary; std_error uses the n-1 sample deviation.
    static RiskEstimate from_samples(std::span<const double> samples) {
        RiskEstimate out;
        out.replicates = samples.size();
        if (samples.empty()) return out;
        long double sum = 0.0L;
        for (const double x : samples) sum += x;
        const long double mean = sum / static_cast<long double>(samples.size());
        out.mean = static_cast<double>(mean);
        if (samples.size() > 1) {
            long double ss = 0.0L;
            for (const double x : samples) ss += (x - mean) * (x - mean);
            const long double var = ss / static_cast<long double>(samples.size() - 1);
            out.std_error =
                static_cast<double>(std::sqrt(var / static_cast<long double>(samples.size())));
        }
        return out;
    }
};

/// Number of workers used when the caller passes 0.
inline unsigned default_thread_count() {
    return std::max(1u, std::thread::hardware_concurrency());
}

/**
 * @brief Runs body(begin, end) over contiguous replicate blocks on worker threads.
 *
 * The body must only write to per-replicate slots; the partition affects
 * scheduling, never results.
 */
inline void parallel_blocks(std::size_t count, unsigned threads,
                            const std::function<void(std::size_t, std::size_t)>& body) {
    if (threads == 0) threads = default_thread_count();
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(count, 1)));
    if (threads <= 1) {
        body(0, count);
        return;
    }
    std::vector<std::thread> pool;
    std::exception_ptr failure;
    std::mutex failure_mutex;
    const std::size_t chunk = (count + threads - 1) / threads;
    for (unsigned t = 0; t < threads; ++t) {
        const std::size_t begin = std::min(count, t * chunk);
        const std::size_t end = std::min(count, begin + chunk);
        pool.emplace_back([&, begin, end] {
            try {
                body(begin, end);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
}

struct McRiskResult {
    std::optional<RiskEstimate> ure;
    std::optional<RiskEstimate> ew;
};

/// Per-replicate squared losses of both estimators on shared draws.
struct ReplicateLosses {
    std::vector<double> ure;
    std::vector<double> ew;
};

inline ReplicateLosses replicate_losses(const ScenarioConfig& config, unsigned threads = 0) {
    config.validate();
    const MeanVector mu = config.mean_vector();
    const bool want_ure = config.estimator != EstimatorKind::ExponentialWeights;
    const bool want_ew = config.estimator != EstimatorKind::Ure;
    ReplicateLosses out;
    if (want_ure) out.ure.resize(config.replicates);
    if (want_ew) out.ew.resize(config.replicates);

    parallel_blocks(config.replicates, threads, [&](std::size_t begin, std::size_t end) {
        Observation y{std::vector<double>(mu.size()), config.sigma, config.base_seed};
        for (std::size_t r = begin; r < end; ++r) {
            NormalStream stream({config.base_seed, config.stream_id(), r});
            fill_observation(mu, config.sigma, stream, y.values);
            const RiskProfile profile = risk_profile(y, config.models);
            if (want_ure) {
                out.ure[r] = squared_loss(aggregate(y, config.models, ure_weights(profile)), mu);
            }
            if (want_ew) {
                out.ew[r] = squared_loss(
                    aggregate(y, config.models, exponential_weights(profile, config.sigma)), mu);
            }
        }
    });
    return out;
}

/// Monte Carlo estimate of E||mu_bar(Y) - mu||^2 for the configured estimators.
inline McRiskResult mc_risk(const ScenarioConfig& config, unsigned threads = 0) {
    const ReplicateLosses losses = replicate_losses(config, threads);
    McRiskResult result;
    if (!losses.ure.empty()) result.ure = RiskEstimate::from_samples(losses.ure);
    if (!losses.ew.empty()) result.ew = RiskEstimate::from_samples(losses.ew);
    return result;
}

/// One scenario's oracle risk, Monte Carlo risks, budgets and verdicts.
struct ComparisonRow {
    std::string scenario_id;
    OracleReport oracle;
    RiskEstimate ure_risk;
    RiskEstimate ew_risk;
    /// (URE risk - oracle risk) / (sigma^2 sqrt(r^M / sigma^2))
    double empirical_k = 0.0;
    bool t2_pass = false;
    bool t3_pass = false;
    bool combined_pass = false;
};

inline ComparisonRow verify_oracle_inequalities(const ScenarioConfig& config, unsigned threads = 0) {
    if (config.estimator != EstimatorKind::Both) {
        throw std::invalid_argument("verify_oracle_inequalities: scenario '" + config.id +
                                    "' must run both estimators");
    }
    const MeanVector mu = config.mean_vector();
    const McRiskResult mc = mc_risk(config, threads);

    ComparisonRow row;
    row.scenario_id = config.id;
    row.oracle = theorem_bounds(oracle_risk(mu, config.sigma, config.models), config.sigma,
                                config.models);
    row.ure_risk = *mc.ure;
    row.ew_risk = *mc.ew;
    row.empirical_k = regret(row.ure_risk.mean, row.oracle) / *row.oracle.regret_budget_t1;

    const double slack = kPassStandardErrors * row.ew_risk.std_error;
    auto holds = [&](double budget) {
        return row.ew_risk.mean <= row.oracle.oracle_risk + budget + slack;
    };
    row.t2_pass = holds(*row.oracle.regret_budget_t2);
    row.t3_pass = holds(*row.oracle.regret_budget_t3);
    row.combined_pass = holds(*row.oracle.combined_budget);
    return row;
}

// ---------------------------------------------------------------------------
// Maximal inequalities

enum class MaximalStatistic { Chi2Upper, Linear, Chi2Lower };

inline std::string_view to_string(MaximalStatistic which) {
    switch (which) {
        case MaximalStatistic::Chi2Upper: return "chi2_upper";
        case MaximalStatistic::Linear: return "linear";
        case MaximalStatistic::Chi2Lower: return "chi2_lower";
    }
    return "chi2_upper";
}

inline MaximalStatistic parse_maximal_statistic(std::string_view text) {
    if (text == "chi2_upper") return MaximalStatistic::Chi2Upper;
    if (text == "linear") return MaximalStatistic::Linear;
    if (text == "chi2_lower") return MaximalStatistic::Chi2Lower;
    throw std::invalid_argument("unknown maximal statistic '" + std::string(text) + "'");
}

inline constexpr std::size_t kDefaultMaximalHorizon = 10000;

/**
 * @brief Monte Carlo mean of a drift-compensated running maximum.
 *
 *  - chi2_upper: max_{1<=k<=K} sum_{i<=k} (xi_i^2 - 1) - U(alpha) k
 *  - chi2_lower: max_{1<=k<=K} sum_{i<=k} (1 - xi_i^2) - U*(alpha) k
 *  - linear:     max_{1<=k<=N+1} sum_{i=k}^{N} mu_i xi_i - (alpha/2) mu_i^2
 *
 * Truncating the chi-square walks at K = horizon can only lower the maximum.
 * The expected value is bounded by 1/alpha in all three cases.
 */
inline RiskEstimate lemma2_empirical(double alpha, MaximalStatistic which,
                                     const std::optional<MeanVector>& mu, std::size_t horizon,
                                     std::size_t replicates, std::uint64_t seed,
                                     unsigned threads = 0) {
    if (replicates < 1) {
        throw std::invalid_argument("lemma2_empirical: replicates must be >= 1");
    }
    double drift = 0.0;
    switch (which) {
        case MaximalStatistic::Chi2Upper: drift = u_alpha(alpha); break;
        case MaximalStatistic::Chi2Lower: drift = u_star_alpha(alpha); break;
        case MaximalStatistic::Linear:
            if (!(alpha > 0.0) || !std::isfinite(alpha)) {
                throw std::invalid_argument("lemma2_empirical: alpha must be positive");
            }
            if (!mu) {
                throw std::invalid_argument("lemma2_empirical: linear statistic needs a mean vector");
            }
            break;
    }
    if (which != MaximalStatistic::Linear && horizon < 1) {
        throw std::invalid_argument("lemma2_empirical: horizon must be >= 1");
    }

    const std::uint64_t stream_id = fnv1a64(std::string("lemma2/") + std::string(to_string(which)));
    std::vector<double> samples(replicates);
    parallel_blocks(replicates, threads, [&](std::size_t begin, std::size_t end) {
        std::vector<double> xi;
        for (std::size_t r = begin; r < end; ++r) {
            NormalStream stream({seed, stream_id, r});
            if (which == MaximalStatistic::Linear) {
                const auto coeffs = mu->coefficients();
                xi.resize(coeffs.size());
                for (double& z : xi) z = stream();
                // backward sums; k = N+1 is the empty sum
                double walk = 0.0;
                double best = 0.0;
                for (std::size_t i = coeffs.size(); i-- > 0;) {
                    walk += coeffs[i] * xi[i] - 0.5 * alpha * coeffs[i] * coeffs[i];
                    best = std::max(best, walk);
                }
                samples[r] = best;
                continue;
            }
            const double sign = which == MaximalStatistic::Chi2Upper ? 1.0 : -1.0;
            double walk = 0.0;
            double best = -std::numeric_limits<double>::infinity();
            for (std::size_t k = 0; k < horizon; ++k) {
                const double z = stream();
                walk += sign * (z * z - 1.0) - drift;
                best = std::max(best, walk);
            }
            samples[r] = best;
        }
    });
    return RiskEstimate::from_samples(samples);
}

/// Pass rule for the maximal inequalities: mean <= 1/alpha + 4 SE.
inline bool lemma2_holds(const RiskEstimate& estimate, double alpha) {
    return estimate.mean <= 1.0 / alpha + kPassStandardErrors * estimate.std_error;
}

// ---------------------------------------------------------------------------
// M_epsilon diagnostic

struct MEpsilonStudy {
    /// E[M_eps] with the empirical-minimum centring.
    RiskEstimate empirical_centering;
    /// E[M_eps] with the oracle-risk centring, over replicates where it is defined.
    RiskEstimate oracle_centering;
    std::size_t oracle_centering_empty = 0;
    /// r^M/sigma^2 + 7 eps r^M / ((1 - 6 eps) sigma^2) + 15 / ((1 - 6 eps) eps)
    double analytic_budget = 0.0;
};

inline double m_epsilon_budget(double oracle_risk, const NoiseLevel& sigma, double epsilon) {
    const double ratio = oracle_risk / sigma.variance();
    return ratio + 7.0 * epsilon * ratio / (1.0 - 6.0 * epsilon) +
           15.0 / ((1.0 - 6.0 * epsilon) * epsilon);
}

inline MEpsilonStudy m_epsilon_study(const ScenarioConfig& config, double epsilon,
                                     unsigned threads = 0) {
    if (!(epsilon > 0.0 && epsilon <= 1.0 / 7.0)) {
        throw std::invalid_argument("m_epsilon_study: epsilon must lie in (0, 1/7]");
    }
    config.validate();
    const MeanVector mu = config.mean_vector();
    const OracleReport oracle = oracle_risk(mu, config.sigma, config.models);

    std::vector<double> centred(config.replicates);
    std::vector<std::optional<std::size_t>> oracle_centred(config.replicates);
    parallel_blocks(config.replicates, threads, [&](std::size_t begin, std::size_t end) {
        Observation y{std::vector<double>(mu.size()), config.sigma, config.base_seed};
        for (std::size_t r = begin; r < end; ++r) {
            NormalStream stream({config.base_seed, config.stream_id(), r});
            fill_observation(mu, config.sigma, stream, y.values);
            const RiskProfile profile = risk_profile(y, config.models);
            centred[r] = static_cast<double>(m_epsilon(profile, config.sigma, epsilon));
            oracle_centred[r] = m_epsilon_oracle_centered(profile, config.sigma, epsilon,
                                                          oracle.oracle_risk, mu.squared_norm());
        }
    });

    MEpsilonStudy study;
    study.empirical_centering = RiskEstimate::from_samples(centred);
    std::vector<double> defined;
    for (const auto& v : oracle_centred) {
        if (v) {
            defined.push_back(static_cast<double>(*v));
        } else {
            ++study.oracle_centering_empty;
        }
    }
    study.oracle_centering = RiskEstimate::from_samples(defined);
    study.analytic_budget = m_epsilon_budget(oracle.oracle_risk, config.sigma, epsilon);
    return study;
}

}  // namespace gsm
