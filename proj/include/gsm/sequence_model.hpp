/**
 * @file sequence_model.hpp
 * @brief Gaussian sequence model Y_i = mu_i + sigma * xi_i on a finite support.
 *
 * A mean vector is stored up to its declared length N; every coordinate past
 * N is exactly zero, so tail sums and risks are computed without truncation
 * error.
 */
#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "gsm/rng.hpp"

namespace gsm {

/// Finite-support mean vector (mu_1, ..., mu_N) with an exact zero tail.
class MeanVector {
public:
    explicit MeanVector(std::vector<double> coefficients) : coefficients_(std::move(coefficients)) {
        if (coefficients_.empty()) {
            throw std::invalid_argument("MeanVector: declared length must be positive");
        }
        for (const double c : coefficients_) {
            if (!std::isfinite(c)) {
                throw std::invalid_argument("MeanVector: coefficients must be finite");
            }
        }
        // tail_[m] = sum_{i > m} mu_i^2, accumulated from the far end
        tail_.assign(coefficients_.size() + 1, 0.0);
        for (std::size_t i = coefficients_.size(); i-- > 0;) {
            tail_[i] = tail_[i + 1] + coefficients_[i] * coefficients_[i];
        }
        if (!std::isfinite(tail_[0])) {
            throw std::invalid_argument("MeanVector: squared norm overflows");
        }
    }

    static MeanVector zero(std::size_t n) { return MeanVector(std::vector<double>(n, 0.0)); }

    std::size_t size() const noexcept { return coefficients_.size(); }
    std::span<const double> coefficients() const noexcept { return coefficients_; }
    double operator[](std::size_t i) const noexcept { return coefficients_[i]; }
    double squared_norm() const noexcept { return tail_[0]; }

    /// sum_{i > m} mu_i^2 with 1-based m; zero once m >= N.
    double tail_energy(std::size_t m) const noexcept {
        return m >= coefficients_.size() ? 0.0 : tail_[m];
    }

    /// Same vector multiplied by a scalar.
    MeanVector scaled(double factor) const {
        std::vector<double> out(coefficients_);
        for (double& c : out) c *= factor;
        return MeanVector(std::move(out));
    }

private:
    std::vector<double> coefficients_;
    std::vector<double> tail_;
};

/// Known noise standard deviation, strictly positive.
class NoiseLevel {
public:
    explicit NoiseLevel(double sigma) : sigma_(sigma) {
        if (!(sigma > 0.0) || !std::isfinite(sigma)) {
            throw std::invalid_argument("NoiseLevel: sigma must be a finite positive number");
        }
    }
    double sigma() const noexcept { return sigma_; }
    double variance() const noexcept { return sigma_ * sigma_; }

private:
    double sigma_;
};

/// One draw Y of the sequence model.
struct Observation {
    std::vector<double> values;
    NoiseLevel noise;
    std::uint64_t seed_record = 0;

    std::size_t size() const noexcept { return values.size(); }
};

/// Strictly increasing, non-empty set of projection dimensions (all >= 1).
class ModelIndexSet {
public:
    explicit ModelIndexSet(std::vector<std::size_t> indices) : indices_(std::move(indices)) {
        if (indices_.empty()) {
            throw std::invalid_argument("ModelIndexSet: must be non-empty");
        }
        if (indices_.front() < 1) {
            throw std::invalid_argument("ModelIndexSet: indices must be >= 1");
        }
        if (std::adjacent_find(indices_.begin(), indices_.end(), std::greater_equal<>{}) !=
            indices_.end()) {
            throw std::invalid_argument("ModelIndexSet: indices must be strictly increasing");
        }
    }

    /// {first, first+1, ..., last}
    static ModelIndexSet range(std::size_t first, std::size_t last) {
        if (first < 1 || last < first) {
            throw std::invalid_argument("ModelIndexSet::range: need 1 <= first <= last");
        }
        std::vector<std::size_t> v(last - first + 1);
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = first + i;
        return ModelIndexSet(std::move(v));
    }

    std::span<const std::size_t> indices() const noexcept { return indices_; }
    std::size_t count() const noexcept { return indices_.size(); }
    std::size_t min() const noexcept { return indices_.front(); }
    std::size_t max() const noexcept { return indices_.back(); }
    std::size_t operator[](std::size_t k) const noexcept { return indices_[k]; }

    /// Throws unless every index fits inside a support of length n.
    void require_within(std::size_t n) const {
        if (max() > n) {
            throw std::invalid_argument("ModelIndexSet: max(M) = " + std::to_string(max()) +
                                        " exceeds support length " + std::to_string(n));
        }
    }

    friend bool operator==(const ModelIndexSet&, const ModelIndexSet&) = default;

private:
    std::vector<std::size_t> indices_;
};

/// Writes mu_i + sigma * z_i into out, drawing z from the stream in coordinate order.
inline void fill_observation(const MeanVector& mu, const NoiseLevel& sigma, NormalStream& stream,
                             std::span<double> out) {
    const double s = sigma.sigma();
    const auto coeffs = mu.coefficients();
    for (std::size_t i = 0; i < coeffs.size(); ++i) {
        out[i] = coeffs[i] + s * stream();
    }
}

inline Observation generate_observation(const MeanVector& mu, const NoiseLevel& sigma,
                                        const StreamAddress& address) {
    Observation y{std::vector<double>(mu.size()), sigma, address.base_seed};
    NormalStream stream(address);
    fill_observation(mu, sigma, stream, y.values);
    return y;
}

/// Pure function of (mu, sigma, seed).
inline Observation generate_observation(const MeanVector& mu, const NoiseLevel& sigma,
                                        std::uint64_t seed) {
    return generate_observation(mu, sigma, StreamAddress{seed, 0, 0});
}

/// sum_{i > m} mu_i^2 + sigma^2 m
inline double true_projection_risk(const MeanVector& mu, const NoiseLevel& sigma, std::size_t m) {
    if (m < 1) {
        throw std::invalid_argument("true_projection_risk: m must be >= 1");
    }
    return mu.tail_energy(m) + sigma.variance() * static_cast<double>(m);
}

/// ||estimate - mu||^2 with both tails treated as zero.
inline double squared_loss(std::span<const double> estimate, const MeanVector& mu) {
    const std::size_t n = std::max(estimate.size(), mu.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double e = i < estimate.size() ? estimate[i] : 0.0;
        const double m = i < mu.size() ? mu[i] : 0.0;
        sum += (e - m) * (e - m);
    }
    return sum;
}

namespace detail {

inline std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        parts.push_back(trim(s.substr(start, pos == std::string_view::npos ? pos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return parts;
}

inline double parse_real(std::string_view text, std::string_view what) {
    const std::string buf(trim(text));
    std::size_t used = 0;
    double value = 0.0;
    try {
        value = std::stod(buf, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (buf.empty() || used != buf.size()) {
        throw std::invalid_argument(std::string(what) + ": cannot parse real from '" + buf + "'");
    }
    return value;
}

inline std::uint64_t parse_unsigned(std::string_view text, std::string_view what) {
    const auto t = trim(text);
    std::uint64_t value = 0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
    if (t.empty() || ec != std::errc{} || ptr != t.data() + t.size()) {
        throw std::invalid_argument(std::string(what) + ": cannot parse integer from '" +
                                    std::string(t) + "'");
    }
    return value;
}

}  // namespace detail

/**
 * @brief Builds a mean vector from a textual family description.
 *
 * Accepted forms (whitespace-insensitive):
 *   - `zero`
 *   - `poly:beta=<b>,scale=<c>`   mu_i = c * i^{-b}
 *   - `sparse:k=<k>,amp=<a>`      first k coordinates equal a
 *   - `explicit:<v1>,<v2>,...`
 *
 * The first three accept an optional `n=<N>` key; otherwise N = default_length.
 */
inline MeanVector parse_mean_vector(std::string_view spec, std::size_t default_length) {
    spec = detail::trim(spec);
    const auto colon = spec.find(':');
    const auto family = detail::trim(spec.substr(0, colon));
    const auto body = colon == std::string_view::npos ? std::string_view{} : spec.substr(colon + 1);

    if (family == "explicit") {
        std::vector<double> values;
        for (const auto item : detail::split(body, ',')) {
            values.push_back(detail::parse_real(item, "explicit mean vector"));
        }
        return MeanVector(std::move(values));
    }

    std::map<std::string, std::string, std::less<>> keys;
    if (!detail::trim(body).empty()) {
        for (const auto item : detail::split(body, ',')) {
            const auto eq = item.find('=');
            if (eq == std::string_view::npos) {
                throw std::invalid_argument("mean vector spec: expected key=value, got '" +
                                            std::string(item) + "'");
            }
            keys.emplace(std::string(detail::trim(item.substr(0, eq))),
                         std::string(detail::trim(item.substr(eq + 1))));
        }
    }
    auto take = [&](std::string_view key) -> std::optional<std::string> {
        const auto it = keys.find(key);
        if (it == keys.end()) return std::nullopt;
        std::string v = it->second;
        keys.erase(it);
        return v;
    };
    auto require = [&](std::string_view key) {
        auto v = take(key);
        if (!v) {
            throw std::invalid_argument("mean vector spec '" + std::string(family) +
                                        "': missing key '" + std::string(key) + "'");
        }
        return *v;
    };

    std::size_t n = default_length;
    if (auto v = take("n")) n = detail::parse_unsigned(*v, "mean vector length");
    if (n == 0) {
        throw std::invalid_argument("mean vector spec: length must be positive");
    }

    std::vector<double> values(n, 0.0);
    if (family == "zero") {
        // all zero
    } else if (family == "poly") {
        const double beta = detail::parse_real(require("beta"), "poly beta");
        const double scale = detail::parse_real(require("scale"), "poly scale");
        for (std::size_t i = 0; i < n; ++i) {
            values[i] = scale * std::pow(static_cast<double>(i + 1), -beta);
        }
    } else if (family == "sparse") {
        const auto k = detail::parse_unsigned(require("k"), "sparse k");
        const double amp = detail::parse_real(require("amp"), "sparse amp");
        if (k > n) {
            throw std::invalid_argument("sparse mean vector: k exceeds length");
        }
        std::fill_n(values.begin(), k, amp);
    } else {
        throw std::invalid_argument("unknown mean vector family '" + std::string(family) + "'");
    }
    if (!keys.empty()) {
        throw std::invalid_argument("mean vector spec: unknown key '" + keys.begin()->first + "'");
    }
    return MeanVector(std::move(values));
}

/// Parses "1..100", "1,2,5" or a mix such as "1..10,20,40".
inline ModelIndexSet parse_model_index_set(std::string_view text) {
    std::vector<std::size_t> out;
    for (const auto item : detail::split(detail::trim(text), ',')) {
        const auto dots = item.find("..");
        if (dots == std::string_view::npos) {
            out.push_back(detail::parse_unsigned(item, "model index"));
            continue;
        }
        const auto lo = detail::parse_unsigned(item.substr(0, dots), "model range start");
        const auto hi = detail::parse_unsigned(item.substr(dots + 2), "model range end");
        if (hi < lo) {
            throw std::invalid_argument("model range end precedes start");
        }
        for (auto m = lo; m <= hi; ++m) out.push_back(m);
    }
    return ModelIndexSet(std::move(out));
}

}  // namespace gsm
