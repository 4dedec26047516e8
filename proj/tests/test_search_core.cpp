#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <vector>

#include "oracles.hpp"
#include "searchbias/oracle.hpp"
#include "searchbias/search_core.hpp"

using namespace searchbias;

namespace {

StrategyDistribution strat(std::vector<double> mass) {
    const int n = static_cast<int>(mass.size());
    return StrategyDistribution::validated(n, mass);
}

InformationResource fitness_resource(std::string id, std::vector<double> fitness, int queries) {
    return InformationResource{std::move(id), FitnessTask{std::move(fitness), queries}};
}

}  // namespace

TEST_CASE("uniform strategy") {
    CHECK(uniform_strategy(SearchSpace(4)).mass()[0] == 0.25);
    CHECK(uniform_strategy(SearchSpace(1)).mass()[0] == 1.0);
    CHECK(uniform_strategy(SearchSpace(2)).mass()[1] == 0.5);
    for (int n : {1, 2, 3, 7, 64}) {
        const auto u = StrategyDistribution::uniform(n);
        for (int i = 0; i < n; ++i) CHECK(u[i] == 1.0 / n);
    }
    CHECK_THROWS_AS(SearchSpace(0), InvalidParameter);
}

TEST_CASE("validate_strategy accepts, renormalizes, rejects") {
    const std::vector<double> ok{0.5, 0.5, 0.0, 0.0};
    CHECK(validate_strategy(4, ok).mass()[0] == 0.5);

    // Slightly off-sum input comes back renormalized to exactly one.
    const std::vector<double> off{0.5, 0.5000005, 0.0, 0.0};
    const auto fixed = validate_strategy(4, off);
    double total = 0.0;
    for (double x : fixed.mass()) total += x;
    CHECK(total == 1.0);

    CHECK_THROWS_AS(validate_strategy(4, std::vector<double>{0.7, 0.7, 0.0, 0.0}),
                    NotNormalized);
    CHECK_THROWS_AS(validate_strategy(3, ok), DimensionMismatch);
    CHECK_THROWS_AS(validate_strategy(4, std::vector<double>{1.0, 0.0, 0.0, -1e-9}),
                    NegativeMass);

    // Tiny negatives are rounding noise and clamp to zero.
    const auto clamped = validate_strategy(2, std::vector<double>{1.0, -1e-13});
    CHECK(clamped[1] == 0.0);
}

TEST_CASE("target function validation") {
    const TargetFunction t(4, {0, 2});
    CHECK(t.k() == 2);
    CHECK(t.uniform_success() == 0.5);
    CHECK(t.contains(2));
    CHECK(!t.contains(1));
    CHECK_THROWS_AS(TargetFunction(4, {}), InvalidParameter);
    CHECK_THROWS_AS(TargetFunction(4, {2, 1}), InvalidParameter);
    CHECK_THROWS_AS(TargetFunction(4, {0, 4}), InvalidParameter);
    CHECK_THROWS_AS(TargetFunction(4, {1, 1}), InvalidParameter);
}

TEST_CASE("per_query_success") {
    CHECK(per_query_success(TargetFunction(4, {0, 1}), strat({0.5, 0.3, 0.2, 0.0})) ==
          doctest::Approx(0.8).epsilon(1e-15));
    CHECK(per_query_success(TargetFunction(4, {0}), StrategyDistribution::uniform(4)) == 0.25);
    CHECK(per_query_success(TargetFunction(4, {0, 1, 2, 3}), strat({0.1, 0.2, 0.3, 0.4})) ==
          doctest::Approx(1.0).epsilon(1e-15));
    CHECK_THROWS_AS(per_query_success(TargetFunction(3, {0}), StrategyDistribution::uniform(4)),
                    DimensionMismatch);
}

TEST_CASE("uniform success equals k/n for every target, n <= 12") {
    // Compensated summation keeps the gap at one ulp even where the naive sum
    // of k copies of 1/n drifts.
    for (int n = 1; n <= 12; ++n) {
        const auto u = StrategyDistribution::uniform(n);
        for (int k = 1; k <= n; ++k) {
            for (TargetEnumerator e(n, k); !e.done(); e.advance()) {
                const double q = per_query_success(e.current(), u);
                CHECK(std::abs(q - static_cast<double>(k) / n) <= 1e-15);
            }
        }
    }
}

TEST_CASE("target enumeration is lexicographic and complete") {
    TargetEnumerator e(4, 2);
    CHECK(e.total() == 6);
    std::vector<std::vector<int>> seen;
    while (auto t = e.next()) {
        seen.emplace_back(t->indices().begin(), t->indices().end());
    }
    CHECK(seen.size() == 6);
    CHECK(seen.front() == std::vector<int>{0, 1});
    CHECK(seen.back() == std::vector<int>{2, 3});
    for (std::size_t i = 1; i < seen.size(); ++i) CHECK(seen[i - 1] < seen[i]);

    TargetEnumerator single(3, 3);
    CHECK(single.total() == 1);
    CHECK(single.next()->indices()[2] == 2);
    CHECK(!single.next());

    std::uint64_t count = 0;
    for_each_target(12, 6, kDefaultEnumerationCap, [&](std::span<const int>) { ++count; });
    CHECK(count == 924);
    CHECK(count == oracles::binomial(12, 6));

    CHECK_THROWS_AS(TargetEnumerator(40, 20, 1000), TooLarge);
    CHECK_THROWS_AS(TargetEnumerator(4, 0), InvalidParameter);
    CHECK(binomial_checked(30, 29) == 30);  // symmetric side stays under the cap
}

TEST_CASE("explicit resources pass through induced_strategy") {
    const auto stored = strat({0.5, 0.0, 0.0, 0.5});
    const InformationResource res{"r", ExplicitStrategy{stored}};
    const auto out = induced_strategy(res, AlgorithmSpec::uniform_sampler(), 3, 99);
    CHECK(out == stored);
    CHECK_THROWS_AS(induced_strategy(res, AlgorithmSpec::uniform_sampler(), 0, 1),
                    InvalidParameter);
}

TEST_CASE("uniform sampler induces the uniform strategy for any task") {
    Rng rng(7);
    for (int n : {2, 5, 9}) {
        std::vector<double> fitness;
        for (int i = 0; i < n; ++i) fitness.push_back(rng.uniform01());
        const auto res = fitness_resource("t", fitness, 6);
        const auto induced = induced_strategy(res, AlgorithmSpec::uniform_sampler(), 40, 11);
        for (int i = 0; i < n; ++i) {
            CHECK(induced[i] == doctest::Approx(1.0 / n).epsilon(1e-12));
        }
    }
}

TEST_CASE("run_search traces") {
    const std::vector<double> fitness{0.3, 0.9, 0.1};
    const auto res = fitness_resource("t", fitness, 5);

    const SearchTrace trace = run_search(res, AlgorithmSpec::uniform_sampler(), 42);
    CHECK(trace.steps.size() == 5);
    CHECK(trace.per_step_strategies.size() == 5);
    for (const auto& s : trace.per_step_strategies) {
        CHECK(s == StrategyDistribution::uniform(3));
    }
    for (const auto& step : trace.steps) {
        CHECK(step.evaluation == fitness[static_cast<std::size_t>(step.queried_index)]);
    }

    // Zero greed behaves exactly like the uniform sampler.
    const SearchTrace lazy = run_search(res, AlgorithmSpec::epsilon_greedy(0.0), 42);
    for (const auto& s : lazy.per_step_strategies) {
        CHECK(s == StrategyDistribution::uniform(3));
    }

    // Same seed, same bytes.
    const SearchTrace a = run_search(res, AlgorithmSpec::epsilon_greedy(0.7), 123);
    const SearchTrace b = run_search(res, AlgorithmSpec::epsilon_greedy(0.7), 123);
    REQUIRE(a.steps.size() == b.steps.size());
    for (std::size_t i = 0; i < a.steps.size(); ++i) {
        CHECK(a.steps[i].queried_index == b.steps[i].queried_index);
        CHECK(a.steps[i].evaluation == b.steps[i].evaluation);
        CHECK(a.per_step_strategies[i] == b.per_step_strategies[i]);
    }

    CHECK_THROWS_AS(
        run_search(InformationResource{"e", ExplicitStrategy{StrategyDistribution::uniform(3)}},
                   AlgorithmSpec::uniform_sampler(), 1),
        InvalidAlgorithmSpec);
    CHECK_THROWS_AS(AlgorithmSpec::epsilon_greedy(1.5), InvalidAlgorithmSpec);
    CHECK_THROWS_AS(AlgorithmSpec::parse("annealing"), InvalidAlgorithmSpec);
    CHECK(AlgorithmSpec::parse("greedy:0.25").greed == 0.25);
    CHECK(AlgorithmSpec::parse("uniform").kind == AlgorithmSpec::Kind::UniformSampler);
}

TEST_CASE("greedy step mass concentrates on the observed argmax set") {
    // Fitness with a tie: indices 0 and 2 share the best value. Half the mass
    // stays uniform so the run keeps exploring and finds both optima.
    const auto res = fitness_resource("t", {0.9, 0.1, 0.9, 0.4}, 64);
    const SearchTrace trace = run_search(res, AlgorithmSpec::epsilon_greedy(0.5), 5);
    bool saw_both = false;
    std::vector<bool> queried(4, false);
    for (std::size_t i = 0; i + 1 < trace.steps.size(); ++i) {
        queried[static_cast<std::size_t>(trace.steps[i].queried_index)] = true;
        if (queried[0] && queried[2]) {
            // Both tied optima observed: each gets base + half the greedy mass.
            const auto& next = trace.per_step_strategies[i + 1];
            CHECK(next[0] == doctest::Approx(0.375).epsilon(1e-12));
            CHECK(next[2] == doctest::Approx(0.375).epsilon(1e-12));
            CHECK(next[1] == doctest::Approx(0.125).epsilon(1e-12));
            saw_both = true;
            break;
        }
    }
    CHECK(saw_both);
}

TEST_CASE("two-query greedy induction matches the exact tree expansion") {
    const std::vector<double> fitness{1.0, 0.0};
    const auto res = fitness_resource("t", fitness, 2);
    const int runs = 200000;
    const auto induced = induced_strategy(res, AlgorithmSpec::epsilon_greedy(1.0), runs, 2024);

    const std::vector<double> expected = oracles::greedy_two_query_average(fitness, 1.0);
    CHECK(expected[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(expected[1] == doctest::Approx(0.5).epsilon(1e-12));

    // Per-run first coordinate is 0.25 or 0.75, so sigma = 0.25.
    const double se = 0.25 / std::sqrt(static_cast<double>(runs));
    CHECK(std::abs(induced[0] - expected[0]) < 4.0 * se);

    // And for an asymmetric fitness/greed pair.
    const std::vector<double> fit2{0.2, 0.9, 0.4};
    const auto res2 = fitness_resource("t2", fit2, 2);
    const auto induced2 = induced_strategy(res2, AlgorithmSpec::epsilon_greedy(0.6), runs, 77);
    const auto expected2 = oracles::greedy_two_query_average(fit2, 0.6);
    for (int i = 0; i < 3; ++i) {
        CHECK(std::abs(induced2[i] - expected2[static_cast<std::size_t>(i)]) < 4.0 * se);
    }
}

TEST_CASE("induced_strategy is identical across worker counts") {
    const auto res = fitness_resource("t", {0.1, 0.8, 0.3, 0.8, 0.2}, 7);
    const auto alg = AlgorithmSpec::epsilon_greedy(0.5);
    const auto serial = induced_strategy(res, alg, 500, 31, 1);
    const auto threaded = induced_strategy(res, alg, 500, 31, 4);
    const auto threaded8 = induced_strategy(res, alg, 500, 31, 8);
    CHECK(serial == threaded);
    CHECK(serial == threaded8);
}

TEST_CASE("mix_strategies") {
    std::vector<InformationResource> rs;
    rs.push_back(InformationResource{"a", ExplicitStrategy{strat({1, 0, 0, 0})}});
    rs.push_back(InformationResource{"b", ExplicitStrategy{strat({0, 0, 0, 1})}});
    ResourceSet set(4, rs);
    StrategyMap strategies{{"a", strat({1, 0, 0, 0})}, {"b", strat({0, 0, 0, 1})}};

    const auto mixed = mix_strategies(ResourceDistribution(set, std::vector<double>{0.5, 0.5}),
                                      strategies);
    CHECK(mixed[0] == 0.5);
    CHECK(mixed[3] == 0.5);
    CHECK(mixed[1] == 0.0);

    const auto first_only =
        mix_strategies(ResourceDistribution(set, std::vector<double>{1.0, 0.0}), strategies);
    CHECK(first_only == strat({1, 0, 0, 0}));

    std::vector<InformationResource> one;
    one.push_back(InformationResource{"a", ExplicitStrategy{strat({0.25, 0.25, 0.25, 0.25})}});
    const auto identity = mix_strategies(ResourceDistribution::uniform(ResourceSet(4, one)),
                                         StrategyMap{{"a", strat({0.25, 0.25, 0.25, 0.25})}});
    CHECK(identity == strat({0.25, 0.25, 0.25, 0.25}));

    StrategyMap missing{{"a", strat({1, 0, 0, 0})}};
    CHECK_THROWS_AS(mix_strategies(ResourceDistribution::uniform(set), missing),
                    MissingStrategy);
}

TEST_CASE("per_query_success is linear in mixtures") {
    Rng rng(5);
    for (int rep = 0; rep < 200; ++rep) {
        const int n = 3 + static_cast<int>(rng.next_u64() % 6);
        const int m = 2 + static_cast<int>(rng.next_u64() % 4);
        std::vector<InformationResource> rs;
        StrategyMap strategies;
        for (int j = 0; j < m; ++j) {
            auto s = StrategyDistribution::from_mass(sample_simplex(n, rng));
            const std::string id = "r" + std::to_string(j);
            rs.push_back(InformationResource{id, ExplicitStrategy{s}});
            strategies.emplace(id, std::move(s));
        }
        ResourceSet set(n, std::move(rs));
        const std::vector<double> w = sample_simplex(m, rng);
        ResourceDistribution d(set, w);

        const int k = 1 + static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(n));
        std::vector<int> idx;
        for (int i = 0; i < n; ++i) idx.push_back(i);
        std::vector<int> chosen(idx.begin(), idx.begin() + k);
        const TargetFunction t(n, chosen);

        const double mixed_q = per_query_success(t, mix_strategies(d, strategies));
        double weighted = 0.0;
        for (int j = 0; j < m; ++j) {
            weighted += d.weights[static_cast<std::size_t>(j)] *
                        per_query_success(t, strategies.at("r" + std::to_string(j)));
        }
        CHECK(std::abs(mixed_q - weighted) <= 1e-12);
    }
}

TEST_CASE("resource set validation") {
    std::vector<InformationResource> dup;
    dup.push_back(InformationResource{"x", ExplicitStrategy{StrategyDistribution::uniform(3)}});
    dup.push_back(InformationResource{"x", ExplicitStrategy{StrategyDistribution::uniform(3)}});
    CHECK_THROWS_AS(ResourceSet(3, dup), InvalidParameter);

    std::vector<InformationResource> wrong;
    wrong.push_back(InformationResource{"x", ExplicitStrategy{StrategyDistribution::uniform(4)}});
    CHECK_THROWS_AS(ResourceSet(3, wrong), DimensionMismatch);

    CHECK_THROWS_AS(ResourceSet(3, {}), InvalidParameter);

    std::vector<InformationResource> ok;
    ok.push_back(InformationResource{"x", ExplicitStrategy{StrategyDistribution::uniform(3)}});
    ResourceSet set(3, ok);
    CHECK_THROWS_AS(ResourceDistribution(set, std::vector<double>{0.5, 0.5}),
                    DimensionMismatch);
    CHECK_THROWS_AS(ResourceDistribution(set, std::vector<double>{0.4}), NotNormalized);
}

TEST_CASE("strategy sampling respects zero-mass entries") {
    Rng rng(99);
    const auto s = strat({0.0, 0.6, 0.0, 0.4});
    for (int i = 0; i < 2000; ++i) {
        const int idx = s.sample_index(rng);
        CHECK((idx == 1 || idx == 3));
    }
}

TEST_CASE("strategy sampling follows the stored mass") {
    Rng rng(1234);
    const std::vector<double> mass{0.2, 0.5, 0.0, 0.3};
    const auto s = strat(mass);
    const long draws = 100000;
    std::vector<long> hits(4, 0);
    for (long i = 0; i < draws; ++i) ++hits[static_cast<std::size_t>(s.sample_index(rng))];
    for (int i = 0; i < 4; ++i) {
        const double freq = static_cast<double>(hits[static_cast<std::size_t>(i)]) / draws;
        const double se = std::sqrt(mass[static_cast<std::size_t>(i)] *
                                    (1.0 - mass[static_cast<std::size_t>(i)]) / draws);
        CHECK(std::abs(freq - mass[static_cast<std::size_t>(i)]) <= 4.0 * se + 1e-12);
    }
}
