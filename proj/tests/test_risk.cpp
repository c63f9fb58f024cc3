#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

#include "gsm/bounds.hpp"
#include "gsm/montecarlo.hpp"
#include "gsm/risk.hpp"
#include "oracles.hpp"

using namespace gsm;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("oracle_risk examples", "[risk]") {
    const NoiseLevel unit(1.0);
    SECTION("zero mean") {
        const auto r = oracle_risk(MeanVector::zero(10), unit, ModelIndexSet::range(1, 10));
        CHECK(r.oracle_risk == 1.0);
        CHECK(r.oracle_index == 1);
        CHECK_FALSE(r.regret_budget_t2.has_value());
    }
    SECTION("scan over 5, 2, 3") {
        const auto r = oracle_risk(MeanVector({2, 2, 0}), unit, ModelIndexSet({1, 2, 3}));
        CHECK(r.oracle_risk == 2.0);
        CHECK(r.oracle_index == 2);
    }
    SECTION("polynomial decay, frozen from a 40-digit brute-force scan") {
        const auto mu = parse_mean_vector("poly:beta=1,scale=1", 100);
        const auto r = oracle_risk(mu, NoiseLevel(0.1), ModelIndexSet::range(1, 100));
        CHECK_THAT(r.oracle_risk, WithinRel(0.18521616901835217473, 1e-14));
        CHECK(r.oracle_index == 9);

        std::vector<std::size_t> all(100);
        for (std::size_t m = 1; m <= 100; ++m) all[m - 1] = m;
        const auto scan = oracle::brute_force_oracle(
            {mu.coefficients().begin(), mu.coefficients().end()}, 0.1, all);
        CHECK_THAT(r.oracle_risk, WithinRel(scan.value, 1e-14));
        CHECK(r.oracle_index == scan.index);
    }
    CHECK_THROWS_AS(oracle_risk(MeanVector::zero(3), unit, ModelIndexSet({1, 4})),
                    std::invalid_argument);
}

TEST_CASE("oracle_risk properties", "[risk][property]") {
    std::mt19937_64 gen(23);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    std::uniform_real_distribution<double> pick(0.0, 1.0);
    for (int trial = 0; trial < 500; ++trial) {
        const std::size_t n = 1 + trial % 30;
        std::vector<double> c(n);
        for (auto& x : c) x = u(gen);
        const MeanVector mu(c);
        const NoiseLevel sigma(0.1 + pick(gen));
        std::vector<std::size_t> sub;
        for (std::size_t m = 1; m <= n; ++m) {
            if (pick(gen) < 0.5) sub.push_back(m);
        }
        if (sub.empty()) sub.push_back(n);
        const ModelIndexSet models(sub);
        const ModelIndexSet all = ModelIndexSet::range(1, n);

        const auto report = oracle_risk(mu, sigma, models);
        REQUIRE(report.oracle_risk >= sigma.variance() * static_cast<double>(models.min()));
        REQUIRE(report.oracle_risk / sigma.variance() >= 1.0);
        for (const auto m : models.indices()) {
            REQUIRE(report.oracle_risk <= true_projection_risk(mu, sigma, m));
        }
        REQUIRE(oracle_risk(mu, sigma, all).oracle_risk <= report.oracle_risk);

        double previous = 0.0;
        for (const double scale : {0.0, 0.5, 1.0, 2.0, 4.0}) {
            const double r = oracle_risk(mu.scaled(scale), sigma, models).oracle_risk;
            REQUIRE(r >= previous);
            REQUIRE(oracle_risk(mu.scaled(-scale), sigma, models).oracle_risk == r);
            previous = r;
        }
    }
}

TEST_CASE("regret", "[risk]") {
    OracleReport report;
    report.oracle_risk = 1.25;
    CHECK(regret(1.25, report) == 0.0);
    CHECK(regret(1.25 + 4.0 * std::log(100.0), report) == 4.0 * std::log(100.0) + 1.25 - 1.25);
    CHECK(regret(1.0, report) == -0.25);
}

TEST_CASE("EW regret for the zero signal stays within the budgets", "[risk][mc]") {
    ScenarioConfig s;
    s.id = "zero_100";
    s.mu_spec = "zero";
    s.models = ModelIndexSet::range(1, 100);
    s.replicates = 20000;
    s.base_seed = 3;
    const auto row = verify_oracle_inequalities(s);
    const double reg = regret(row.ew_risk.mean, row.oracle);
    CHECK(reg <= *row.oracle.regret_budget_t2 + 4 * row.ew_risk.std_error);
    CHECK(reg <= *row.oracle.regret_budget_t3 + 4 * row.ew_risk.std_error);
    CHECK(reg > 0.0);
}
