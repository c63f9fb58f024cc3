/**
 * @file bounds.hpp
 * @brief Special functions and oracle-inequality budgets.
 *
 * Drift functions of the chi-square maximal inequalities
 *   U(a)  = -(a + log(1 - 2a)/2) / a,   0 < a < 1/2,
 *   U*(a) =  (a - log(1 + 2a)/2) / a,   a > 0,
 * their inverses, the entropy bound log(K - 1 + e^{R(rho)}), and the
 * remainder function Psi(r) = min_{eps in (0, 1/7]} 49 eps + r (105/eps + exp(2/(e eps))).
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <limits>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

#include "gsm/estimators.hpp"
#include "gsm/risk.hpp"
#include "gsm/sequence_model.hpp"

namespace gsm {

namespace detail {

// Below this argument U and U* switch to their Taylor series.
inline constexpr double kSeriesThreshold = 1e-4;

/// Bisection until the bracket cannot shrink further in T.
template <std::floating_point T, typename F>
T bisect_increasing(F&& f, T target, T lo, T hi) {
    for (int iter = 0; iter < 4096; ++iter) {
        const T mid = lo + (hi - lo) / 2;
        if (mid <= lo || mid >= hi) break;
        if (f(mid) < target) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return lo + (hi - lo) / 2;
}

}  // namespace detail

/// U(alpha); strictly increasing from 0 to infinity on (0, 1/2).
template <std::floating_point T>
T u_alpha(T alpha) {
    if (!(alpha > T(0) && alpha < T(0.5))) {
        throw std::invalid_argument("u_alpha: alpha must lie in (0, 1/2)");
    }
    if (alpha < T(detail::kSeriesThreshold)) {
        // sum_{n>=2} (2a)^{n-1} / n
        const T x = 2 * alpha;
        return x / 2 + x * x / 3 + x * x * x / 4 + x * x * x * x / 5;
    }
    return -(alpha + std::log1p(-2 * alpha) / 2) / alpha;
}

/// U*(alpha); strictly increasing from 0 toward 1 on (0, inf).
template <std::floating_point T>
T u_star_alpha(T alpha) {
    if (!(alpha > T(0)) || !std::isfinite(alpha)) {
        throw std::invalid_argument("u_star_alpha: alpha must be positive and finite");
    }
    if (alpha < T(detail::kSeriesThreshold)) {
        const T x = 2 * alpha;
        return x / 2 - x * x / 3 + x * x * x / 4 - x * x * x * x / 5;
    }
    return (alpha - std::log1p(2 * alpha) / 2) / alpha;
}

/// Solves U(alpha) = y by bisection on (0, 1/2) to full working precision.
template <std::floating_point T>
T u_inverse(T y) {
    if (!(y > T(0)) || !std::isfinite(y)) {
        throw std::invalid_argument("u_inverse: y must be positive and finite");
    }
    const T top = std::nextafter(T(0.5), T(0));
    if (u_alpha(top) < y) {
        throw std::invalid_argument("u_inverse: y beyond the representable range of U");
    }
    return detail::bisect_increasing([](T a) { return u_alpha(a); }, y, T(0), top);
}

/// Solves U*(alpha) = y for y in (0, 1), growing the bracket geometrically.
template <std::floating_point T>
T u_star_inverse(T y) {
    if (!(y > T(0) && y < T(1))) {
        throw std::invalid_argument("u_star_inverse: y must lie in (0, 1)");
    }
    T hi = T(1);
    while (u_star_alpha(hi) < y) {
        hi *= 2;
        if (!std::isfinite(hi) || hi > std::numeric_limits<T>::max() / 4) {
            throw std::invalid_argument("u_star_inverse: y beyond the representable range of U*");
        }
    }
    return detail::bisect_increasing([](T a) { return u_star_alpha(a); }, y, T(0), hi);
}

/// Shannon entropy in nats; zero weights contribute nothing.
inline double entropy(std::span<const double> weights) {
    double h = 0.0;
    for (const double w : weights) {
        if (w > 0.0) h -= w * std::log(w);
    }
    return h;
}

inline double entropy(const WeightVector& w) { return entropy(w.weights()); }

/// R(rho) = 2/(e rho) if e rho < 1, else (1 + 1/(rho e)) exp((1 - rho e)/(1 + rho e)).
template <std::floating_point T>
T r_rho(T rho) {
    if (!(rho > T(0))) {
        throw std::invalid_argument("r_rho: rho must be positive");
    }
    const T er = std::numbers::e_v<T> * rho;
    if (er < T(1)) {
        return T(2) / er;
    }
    return (T(1) + T(1) / er) * std::exp((T(1) - er) / (T(1) + er));
}

/// log(K - 1 + exp(R(rho))), evaluated as a log-sum-exp.
template <std::floating_point T>
T lemma4_bound(std::size_t k, T rho) {
    if (k < 1) {
        throw std::invalid_argument("lemma4_bound: K must be >= 1");
    }
    const T r = r_rho(rho);
    if (k == 1) return r;
    const T a = std::log(static_cast<T>(k - 1));
    const T hi = std::max(a, r);
    const T lo = std::min(a, r);
    return hi + std::log1p(std::exp(lo - hi));
}

// ---------------------------------------------------------------------------
// Psi

/// Smallest epsilon searched; below it r exp(2/(e eps)) overflows for every representable r.
inline constexpr double kPsiEpsilonFloor = 1e-6;
inline constexpr double kPsiEpsilonCeiling = 1.0 / 7.0;
inline constexpr std::size_t kPsiGridPoints = 20000;

struct PsiEvaluation {
    double r = 0.0;
    double psi = 0.0;
    double epsilon_star = kPsiEpsilonFloor;
    double objective_at_star = 0.0;
};

/// 49 eps + r (105/eps + exp(2/(e eps))); +inf once the exponential overflows.
inline double psi_objective(double epsilon, double r) {
    const double growth = std::exp(2.0 / (std::numbers::e * epsilon));
    if (r == 0.0) return 49.0 * epsilon;
    return 49.0 * epsilon + r * (105.0 / epsilon + growth);
}

/**
 * @brief Psi(r) by dense log-grid search followed by golden-section refinement.
 *
 * No unimodality is assumed for the global search; refinement only runs on
 * the two grid cells around the grid minimiser. Psi(0) = 0 with eps* at the
 * grid floor (the infimum is approached as eps -> 0).
 */
inline PsiEvaluation psi(double r) {
    if (!(r >= 0.0 && r <= 1.0)) {
        throw std::invalid_argument("psi: r must lie in [0, 1]");
    }
    if (r == 0.0) {
        return PsiEvaluation{0.0, 0.0, kPsiEpsilonFloor, 0.0};
    }
    const double log_lo = std::log(kPsiEpsilonFloor);
    const double log_hi = std::log(kPsiEpsilonCeiling);
    const double step = (log_hi - log_lo) / static_cast<double>(kPsiGridPoints - 1);
    auto grid = [&](std::size_t j) {
        if (j == 0) return kPsiEpsilonFloor;
        if (j == kPsiGridPoints - 1) return kPsiEpsilonCeiling;
        return std::exp(log_lo + step * static_cast<double>(j));
    };

    std::size_t best = 0;
    double best_value = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < kPsiGridPoints; ++j) {
        const double v = psi_objective(grid(j), r);
        if (v < best_value) {
            best_value = v;
            best = j;
        }
    }
    double eps_star = grid(best);

    double a = grid(best == 0 ? 0 : best - 1);
    double b = grid(std::min(best + 1, kPsiGridPoints - 1));
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = psi_objective(c, r);
    double fd = psi_objective(d, r);
    for (int iter = 0; iter < 200 && b - a > 1e-16 * b; ++iter) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = psi_objective(c, r);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = psi_objective(d, r);
        }
    }
    for (const double candidate : {c, d}) {
        const double v = psi_objective(candidate, r);
        if (v < best_value) {
            best_value = v;
            eps_star = candidate;
        }
    }
    return PsiEvaluation{r, best_value, eps_star, best_value};
}

/// Leading-order small-r behaviour 98 / (e log(49/r)).
inline double psi_asymptotic(double r) {
    if (!(r > 0.0 && r < 49.0)) {
        throw std::invalid_argument("psi_asymptotic: r must lie in (0, 49)");
    }
    return 98.0 / (std::numbers::e * std::log(49.0 / r));
}

// ---------------------------------------------------------------------------
// Oracle-inequality budgets

/// 4 sigma^2 log(#M)
inline double budget_weight_count(const NoiseLevel& sigma, std::size_t model_count) {
    return 4.0 * sigma.variance() * std::log(static_cast<double>(model_count));
}

/// 4 sigma^2 log{(r / sigma^2)(1 + Psi(sigma^2 / r))}, requires r >= sigma^2.
inline double budget_effective_dimension(const NoiseLevel& sigma, double oracle_risk) {
    const double ratio = oracle_risk / sigma.variance();
    if (!(ratio >= 1.0) || !std::isfinite(ratio)) {
        throw std::invalid_argument("budget_effective_dimension: need r^M / sigma^2 >= 1");
    }
    return 4.0 * sigma.variance() * std::log(ratio * (1.0 + psi(1.0 / ratio).psi));
}

/// sigma^2 sqrt(r / sigma^2)
inline double budget_selection_shape(const NoiseLevel& sigma, double oracle_risk) {
    return sigma.variance() * std::sqrt(oracle_risk / sigma.variance());
}

/// Copy of the report with t1, t2, t3 and min(t2, t3) filled in.
inline OracleReport theorem_bounds(OracleReport oracle, const NoiseLevel& sigma,
                                   const ModelIndexSet& models) {
    oracle.regret_budget_t1 = budget_selection_shape(sigma, oracle.oracle_risk);
    oracle.regret_budget_t2 = budget_weight_count(sigma, models.count());
    oracle.regret_budget_t3 = budget_effective_dimension(sigma, oracle.oracle_risk);
    oracle.combined_budget = std::min(*oracle.regret_budget_t2, *oracle.regret_budget_t3);
    return oracle;
}

}  // namespace gsm
