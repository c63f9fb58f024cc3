/**
 * @file estimators.hpp
 * @brief Projection estimators, unbiased risk estimates, URE selection and
 *        exponentially weighted aggregation.
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "gsm/sequence_model.hpp"

namespace gsm {

/// Tolerance on |sum(w) - 1| accepted by WeightVector.
inline constexpr double kSimplexTolerance = 1e-12;

/// Point on the probability simplex, aligned with a ModelIndexSet.
class WeightVector {
public:
    explicit WeightVector(std::vector<double> weights) : weights_(std::move(weights)) {
        if (weights_.empty()) {
            throw std::invalid_argument("WeightVector: must be non-empty");
        }
        long double total = 0.0L;
        for (const double w : weights_) {
            if (!(w >= 0.0) || !std::isfinite(w)) {
                throw std::invalid_argument("WeightVector: weights must be finite and nonnegative");
            }
            total += w;
        }
        if (std::fabs(static_cast<double>(total - 1.0L)) > kSimplexTolerance) {
            throw std::invalid_argument("WeightVector: weights must sum to 1");
        }
    }

    std::span<const double> weights() const noexcept { return weights_; }
    std::size_t size() const noexcept { return weights_.size(); }
    double operator[](std::size_t k) const noexcept { return weights_[k]; }

    /// Position of the largest weight (first one on ties).
    std::size_t argmax() const noexcept {
        return static_cast<std::size_t>(std::max_element(weights_.begin(), weights_.end()) -
                                        weights_.begin());
    }

private:
    std::vector<double> weights_;
};

/**
 * @brief Unbiased risk estimates r(Y, m) over a model family.
 *
 * `selected_position` is the first position attaining the minimum, so ties
 * resolve toward the smallest m.
 */
class RiskProfile {
public:
    RiskProfile(ModelIndexSet models, std::vector<double> values)
        : models_(std::move(models)), values_(std::move(values)) {
        if (values_.size() != models_.count()) {
            throw std::invalid_argument("RiskProfile: values must align with the model set");
        }
        position_ = static_cast<std::size_t>(std::min_element(values_.begin(), values_.end()) -
                                             values_.begin());
    }

    const ModelIndexSet& models() const noexcept { return models_; }
    std::span<const double> values() const noexcept { return values_; }
    std::size_t size() const noexcept { return values_.size(); }
    double min_value() const noexcept { return values_[position_]; }
    std::size_t selected_position() const noexcept { return position_; }
    /// m-hat(Y)
    std::size_t selected_model() const noexcept { return models_[position_]; }

private:
    ModelIndexSet models_;
    std::vector<double> values_;
    std::size_t position_ = 0;
};

/// Keeps Y_i for i <= m, zero otherwise; length N.
inline std::vector<double> projection_estimate(const Observation& y, std::size_t m) {
    if (m < 1) {
        throw std::invalid_argument("projection_estimate: m must be >= 1");
    }
    std::vector<double> out(y.size(), 0.0);
    const auto keep = std::min(m, y.size());
    std::copy_n(y.values.begin(), keep, out.begin());
    return out;
}

/// -sum_{i<=m} Y_i^2 + 2 sigma^2 m; the additive constant ||mu||^2 is omitted.
inline double unbiased_risk(const Observation& y, std::size_t m) {
    if (m < 1 || m > y.size()) {
        throw std::invalid_argument("unbiased_risk: need 1 <= m <= N");
    }
    double energy = 0.0;
    for (std::size_t i = 0; i < m; ++i) energy += y.values[i] * y.values[i];
    return -energy + 2.0 * y.noise.variance() * static_cast<double>(m);
}

/// Evaluates unbiased_risk for every m in the family with one pass over Y.
inline RiskProfile risk_profile(const Observation& y, const ModelIndexSet& models) {
    models.require_within(y.size());
    const double two_var = 2.0 * y.noise.variance();
    std::vector<double> values(models.count());
    double energy = 0.0;
    std::size_t i = 0;
    for (std::size_t k = 0; k < models.count(); ++k) {
        const std::size_t m = models[k];
        for (; i < m; ++i) energy += y.values[i] * y.values[i];
        values[k] = -energy + two_var * static_cast<double>(m);
    }
    return RiskProfile(models, std::move(values));
}

/// Point mass on m-hat(Y).
inline WeightVector ure_weights(const RiskProfile& profile) {
    std::vector<double> w(profile.size(), 0.0);
    w[profile.selected_position()] = 1.0;
    return WeightVector(std::move(w));
}

/**
 * @brief Exponential weights w_m proportional to exp(-r(Y, m) / (4 sigma^2)).
 *
 * The profile minimum is subtracted before exponentiation, so the largest
 * exponent is exactly 0 and no term can overflow; very distant models
 * underflow to 0. The normalizing sum is accumulated in long double.
 */
inline WeightVector exponential_weights(const RiskProfile& profile, const NoiseLevel& sigma) {
    const double temperature = 4.0 * sigma.variance();
    const double shift = profile.min_value();
    const auto values = profile.values();
    std::vector<long double> raw(values.size());
    long double total = 0.0L;
    for (std::size_t k = 0; k < values.size(); ++k) {
        raw[k] = std::exp(-static_cast<long double>(values[k] - shift) / temperature);
        total += raw[k];
    }
    std::vector<double> w(values.size());
    for (std::size_t k = 0; k < values.size(); ++k) {
        w[k] = static_cast<double>(raw[k] / total);
    }
    return WeightVector(std::move(w));
}

/**
 * @brief Convex combination sum_m w_m * projection_estimate(Y, m).
 *
 * Coordinate i equals Y_i * sum_{m >= i} w_m; the suffix sums are built in a
 * single sweep from the largest model down.
 */
inline std::vector<double> aggregate(const Observation& y, const ModelIndexSet& models,
                                     const WeightVector& w) {
    if (w.size() != models.count()) {
        throw std::invalid_argument("aggregate: weights must align with the model set");
    }
    models.require_within(y.size());
    std::vector<double> out(y.size(), 0.0);
    double suffix = 0.0;
    std::size_t k = models.count();
    for (std::size_t i = models.max(); i-- > 0;) {
        // add every model with m >= i + 1
        while (k > 0 && models[k - 1] >= i + 1) {
            suffix += w[--k];
        }
        out[i] = y.values[i] * suffix;
    }
    return out;
}

/**
 * @brief Largest m whose risk estimate stays within a linear envelope of the minimum.
 *
 * Returns max{m in M : r(Y,m) - r_min(Y) <= 4 eps sigma^2 (m - m_hat) + 4 sigma^2}.
 * The set always contains m_hat.
 */
inline std::size_t m_epsilon(const RiskProfile& profile, const NoiseLevel& sigma, double epsilon) {
    if (!(epsilon > 0.0 && epsilon < 1.0)) {
        throw std::invalid_argument("m_epsilon: epsilon must lie in (0, 1)");
    }
    const double var = sigma.variance();
    const auto m_hat = static_cast<double>(profile.selected_model());
    const auto values = profile.values();
    for (std::size_t k = values.size(); k-- > 0;) {
        const auto m = static_cast<double>(profile.models()[k]);
        if (values[k] - profile.min_value() <= 4.0 * epsilon * var * (m - m_hat) + 4.0 * var) {
            return profile.models()[k];
        }
    }
    return profile.selected_model();  // unreachable: m_hat always qualifies
}

/**
 * @brief Variant of m_epsilon centred on the deterministic oracle risk.
 *
 * Compares r(Y,m) + ||mu||^2 - r^M(mu) (both on the risk scale) against the
 * same envelope. The set can be empty, in which case nullopt is returned.
 */
inline std::optional<std::size_t> m_epsilon_oracle_centered(const RiskProfile& profile,
                                                            const NoiseLevel& sigma, double epsilon,
                                                            double oracle_risk,
                                                            double mu_squared_norm) {
    if (!(epsilon > 0.0 && epsilon < 1.0)) {
        throw std::invalid_argument("m_epsilon_oracle_centered: epsilon must lie in (0, 1)");
    }
    const double var = sigma.variance();
    const auto m_hat = static_cast<double>(profile.selected_model());
    const auto values = profile.values();
    for (std::size_t k = values.size(); k-- > 0;) {
        const auto m = static_cast<double>(profile.models()[k]);
        if (values[k] + mu_squared_norm - oracle_risk <=
            4.0 * epsilon * var * (m - m_hat) + 4.0 * var) {
            return profile.models()[k];
        }
    }
    return std::nullopt;
}

}  // namespace gsm
