/**
 * @file risk.hpp
 * @brief Oracle risk of a projection family and regret against it.
 */
#pragma once

#include <cstddef>
#include <optional>

#include "gsm/sequence_model.hpp"

namespace gsm {

/// Oracle risk r^M(mu) and, once bounds are evaluated, the regret budgets.
struct OracleReport {
    double oracle_risk = 0.0;
    std::size_t oracle_index = 0;
    /// sigma^2 sqrt(r / sigma^2): URE regret shape with unit constant.
    std::optional<double> regret_budget_t1;
    /// 4 sigma^2 log(#M)
    std::optional<double> regret_budget_t2;
    /// 4 sigma^2 log{(r / sigma^2)(1 + Psi(sigma^2 / r))}
    std::optional<double> regret_budget_t3;
    /// min(t2, t3)
    std::optional<double> combined_budget;
};

/// Full scan of true_projection_risk over M; ties go to the smallest m.
inline OracleReport oracle_risk(const MeanVector& mu, const NoiseLevel& sigma,
                                const ModelIndexSet& models) {
    models.require_within(mu.size());
    OracleReport report;
    report.oracle_index = models[0];
    report.oracle_risk = true_projection_risk(mu, sigma, models[0]);
    for (const std::size_t m : models.indices()) {
        const double r = true_projection_risk(mu, sigma, m);
        if (r < report.oracle_risk) {
            report.oracle_risk = r;
            report.oracle_index = m;
        }
    }
    return report;
}

inline double regret(double mc_risk, const OracleReport& oracle) {
    return mc_risk - oracle.oracle_risk;
}

}  // namespace gsm
