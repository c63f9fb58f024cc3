/**
 * @file config.hpp
 * @brief Flat key-value experiment files.
 *
 * @code
 * # defaults apply to every scenario below
 * base_seed = 20240601
 * replicates = 100000
 * models = 1..100
 *
 * [scenario zero_s1]
 * mu = zero
 * sigma = 1
 * @endcode
 *
 * Scenario keys: mu, sigma, models, replicates, seed, estimator. Top-level
 * keys provide defaults for the same names (base_seed is an alias of seed)
 * plus `threads`.
 */
#pragma once

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "gsm/montecarlo.hpp"
#include "gsm/rng.hpp"
#include "gsm/sequence_model.hpp"

namespace gsm {

/// Environment variable consulted for the default seed.
inline constexpr const char* kSeedEnvVar = "GSM_SEED";
inline constexpr std::uint64_t kBuiltinSeed = 1;

/// Thrown for malformed experiment files; carries the line number when known.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// GSM_SEED if set and valid, else the built-in default.
inline std::uint64_t default_seed() {
    if (const char* env = std::getenv(kSeedEnvVar); env != nullptr && *env != '\0') {
        try {
            return detail::parse_unsigned(env, kSeedEnvVar);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }
    }
    return kBuiltinSeed;
}

struct ExperimentConfig {
    std::vector<ScenarioConfig> scenarios;
    unsigned threads = 0;
    std::uint64_t default_seed = kBuiltinSeed;
    /// Sections in file order, keys sorted, values trimmed.
    std::string canonical_text;

    std::string digest() const {
        char buf[17];
        std::snprintf(buf, sizeof buf, "%016llx",
                      static_cast<unsigned long long>(fnv1a64(canonical_text)));
        return buf;
    }
};

inline ExperimentConfig parse_experiment_config(std::string_view text) {
    using KeyValues = std::map<std::string, std::string, std::less<>>;
    static const std::set<std::string, std::less<>> kScenarioKeys{
        "mu", "sigma", "models", "replicates", "seed", "estimator"};

    KeyValues globals;
    std::vector<std::pair<std::string, KeyValues>> sections;
    std::set<std::string, std::less<>> seen_ids;

    std::istringstream in{std::string(text)};
    std::string raw;
    std::size_t line_no = 0;
    auto fail = [&](const std::string& what) {
        throw ConfigError("line " + std::to_string(line_no) + ": " + what);
    };
    while (std::getline(in, raw)) {
        ++line_no;
        std::string_view line = raw;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        line = detail::trim(line);
        if (line.empty()) continue;

        if (line.front() == '[') {
            if (line.back() != ']') fail("unterminated section header");
            const auto header = detail::trim(line.substr(1, line.size() - 2));
            constexpr std::string_view kPrefix = "scenario";
            if (header.substr(0, kPrefix.size()) != kPrefix) {
                fail("section must be [scenario <id>]");
            }
            const auto id = std::string(detail::trim(header.substr(kPrefix.size())));
            if (id.empty()) fail("scenario id is empty");
            if (id.find_first_of(",\"\n") != std::string::npos) {
                fail("scenario id may not contain commas or quotes");
            }
            if (!seen_ids.insert(id).second) fail("duplicate scenario id '" + id + "'");
            sections.emplace_back(id, KeyValues{});
            continue;
        }

        const auto eq = line.find('=');
        if (eq == std::string_view::npos) fail("expected key = value");
        auto key = std::string(detail::trim(line.substr(0, eq)));
        const auto value = std::string(detail::trim(line.substr(eq + 1)));
        if (key.empty() || value.empty()) fail("empty key or value");

        KeyValues& target = sections.empty() ? globals : sections.back().second;
        if (sections.empty()) {
            if (key == "base_seed") key = "seed";
            if (!kScenarioKeys.contains(key) && key != "threads") fail("unknown key '" + key + "'");
        } else if (!kScenarioKeys.contains(key)) {
            fail("unknown scenario key '" + key + "'");
        }
        if (!target.emplace(key, value).second) fail("duplicate key '" + key + "'");
    }

    ExperimentConfig config;
    if (sections.empty()) {
        throw ConfigError("no scenarios defined");
    }

    std::ostringstream canon;
    for (const auto& [k, v] : globals) canon << k << '=' << v << '\n';
    for (const auto& [id, keys] : sections) {
        canon << "[scenario " << id << "]\n";
        for (const auto& [k, v] : keys) canon << k << '=' << v << '\n';
    }
    config.canonical_text = canon.str();

    try {
        config.default_seed = default_seed();
        if (auto it = globals.find("threads"); it != globals.end()) {
            config.threads = static_cast<unsigned>(detail::parse_unsigned(it->second, "threads"));
        }
        for (const auto& [id, keys] : sections) {
            auto lookup = [&](std::string_view key) -> std::optional<std::string> {
                if (auto it = keys.find(key); it != keys.end()) return it->second;
                if (auto it = globals.find(key); it != globals.end()) return it->second;
                return std::nullopt;
            };
            auto require = [&](std::string_view key) {
                auto v = lookup(key);
                if (!v) {
                    throw ConfigError("scenario '" + id + "': missing key '" + std::string(key) + "'");
                }
                return *v;
            };
            ScenarioConfig s;
            s.id = id;
            s.mu_spec = require("mu");
            s.sigma = NoiseLevel(detail::parse_real(require("sigma"), "sigma"));
            s.models = parse_model_index_set(require("models"));
            s.replicates = detail::parse_unsigned(require("replicates"), "replicates");
            s.base_seed = lookup("seed") ? detail::parse_unsigned(*lookup("seed"), "seed")
                                         : config.default_seed;
            if (auto e = lookup("estimator")) s.estimator = parse_estimator_kind(*e);
            s.validate();
            config.scenarios.push_back(std::move(s));
        }
    } catch (const ConfigError&) {
        throw;
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    return config;
}

inline ExperimentConfig load_experiment_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError("cannot open config file '" + path + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_experiment_config(buf.str());
}

}  // namespace gsm
