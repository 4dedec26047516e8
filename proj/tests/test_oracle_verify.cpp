#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "oracles.hpp"
#include "searchbias/numeric.hpp"
#include "searchbias/oracle.hpp"
#include "searchbias/search_core.hpp"
#include "searchbias/verify.hpp"

using namespace searchbias;

namespace {

StrategyDistribution strat(std::vector<double> mass) {
    return StrategyDistribution::validated(static_cast<int>(mass.size()), mass);
}

}  // namespace

TEST_CASE("min_mass_subset picks the k smallest entries") {
    {
        const std::vector<double> m{0.1, 0.2, 0.3, 0.4};
        const auto sub = min_mass_subset(m, 2);
        CHECK(sub == std::vector<int>{0, 1});
        CHECK(m[0] + m[1] <= 0.5);
    }
    {
        const std::vector<double> m{0.9, 0.05, 0.05, 0.0};
        CHECK(min_mass_subset(m, 1) == std::vector<int>{3});
    }
    {
        // Uniform masses: any k indices qualify; ties resolve to the lowest.
        const std::vector<double> m{0.25, 0.25, 0.25, 0.25};
        CHECK(min_mass_subset(m, 2) == std::vector<int>{0, 1});
    }
    CHECK_THROWS_AS(min_mass_subset(std::vector<double>{0.5, 0.5}, 2), InvalidParameter);
    CHECK_THROWS_AS(min_mass_subset(std::vector<double>{0.5, 0.5}, 0), InvalidParameter);
    CHECK_THROWS_AS(min_mass_subset(std::vector<double>{0.5, -0.5, 1.0}, 1), InvalidParameter);
}

TEST_CASE("min_mass_subset is the exhaustive minimizer, n <= 10") {
    Rng rng(13);
    for (int n = 2; n <= 10; ++n) {
        for (int rep = 0; rep < 30; ++rep) {
            std::vector<double> masses = sample_simplex(n, rng);
            const double scale = 0.25 + rng.uniform01();  // sub- or super-unit totals
            for (double& m : masses) m *= scale;
            const double total = compensated_total(masses);
            for (int k = 1; k < n; ++k) {
                const auto picked = min_mass_subset(masses, k);
                CHECK(static_cast<int>(picked.size()) == k);
                KahanSum sum;
                for (int i : picked) sum.add(masses[static_cast<std::size_t>(i)]);
                CHECK(sum.value() <= static_cast<double>(k) / n * total + 1e-12);
                const auto [lo, hi] = oracles::subset_mass_extrema(masses, k);
                CHECK(sum.value() <= lo + 1e-12);
            }
        }
    }
}

TEST_CASE("max_target_mass: ceiling and tight cases") {
    {
        const auto [sup, bound] = max_target_mass(strat({0.7, 0.1, 0.1, 0.1}), 1);
        CHECK(sup == doctest::Approx(0.7).epsilon(1e-14));
        CHECK(bound == doctest::Approx(0.7).epsilon(1e-14));
        CHECK(sup <= bound + 1e-12);
    }
    {
        const auto [sup, bound] = max_target_mass(strat({0.5, 0.5, 0.0, 0.0}), 2);
        CHECK(sup == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(bound == doctest::Approx(1.0).epsilon(1e-14));
    }
    for (int n : {2, 4, 6, 9}) {
        for (int k = 1; k < n; ++k) {
            const auto [sup, bound] = max_target_mass(StrategyDistribution::uniform(n), k);
            const double p = static_cast<double>(k) / n;
            CHECK(sup == doctest::Approx(p).epsilon(1e-13));
            CHECK(bound == doctest::Approx(p).epsilon(1e-13));
        }
    }
    CHECK_THROWS_AS(max_target_mass(StrategyDistribution::uniform(4), 4), InvalidParameter);
}

TEST_CASE("max_target_mass ceiling over random strategies, 2k <= n") {
    Rng rng(19);
    int checked = 0;
    while (checked < 100000) {
        const int n = 2 + static_cast<int>(rng.next_u64() % 15);
        const StrategyDistribution pbar = StrategyDistribution::from_mass(sample_simplex(n, rng));
        for (int k = 1; 2 * k <= n; ++k) {
            const auto [sup, bound] = max_target_mass(pbar, k);
            CHECK(sup <= bound + 1e-12);
            ++checked;
        }
    }
}

TEST_CASE("max_target_mass ceiling needs 2k <= n") {
    // For k beyond half the space the complement cannot hold a k-subset and
    // the ceiling genuinely fails.
    const auto [sup, bound] = max_target_mass(strat({0.4, 0.3, 0.2, 0.1}), 3);
    CHECK(sup == doctest::Approx(0.9).epsilon(1e-14));
    CHECK(bound == doctest::Approx(0.8).epsilon(1e-14));
    CHECK(sup > bound + 1e-3);
}

TEST_CASE("sample_simplex basics") {
    CHECK(sample_simplex(1, 42) == std::vector<double>{1.0});
    CHECK(sample_simplex(3, 7) == sample_simplex(3, 7));
    CHECK(sample_simplex(3, 7) != sample_simplex(3, 8));
    for (int dim : {2, 5, 17}) {
        const auto x = sample_simplex(dim, 11);
        CHECK(static_cast<int>(x.size()) == dim);
        double total = 0.0;
        for (double xi : x) {
            CHECK(xi >= 0.0);
            total += xi;
        }
        CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    }
    CHECK_THROWS_AS(sample_simplex(0, 1), InvalidParameter);
}

TEST_CASE("sample_simplex coordinates are exchangeable") {
    const int dim = 3;
    const long draws = 100000;
    Rng rng(101);
    std::vector<double> mean(dim, 0.0);
    std::vector<double> m2(dim, 0.0);
    for (long s = 0; s < draws; ++s) {
        const auto x = sample_simplex(dim, rng);
        for (int i = 0; i < dim; ++i) {
            const double delta = x[static_cast<std::size_t>(i)] - mean[static_cast<std::size_t>(i)];
            mean[static_cast<std::size_t>(i)] += delta / static_cast<double>(s + 1);
            m2[static_cast<std::size_t>(i)] +=
                delta * (x[static_cast<std::size_t>(i)] - mean[static_cast<std::size_t>(i)]);
        }
    }
    // Uniform-simplex coordinates: mean 1/3, variance 1/18.
    const double se_mean = std::sqrt((1.0 / 18.0) / static_cast<double>(draws));
    for (int i = 0; i < dim; ++i) {
        CHECK(std::abs(mean[static_cast<std::size_t>(i)] - 1.0 / 3.0) <= 3.0 * se_mean);
        const double var = m2[static_cast<std::size_t>(i)] / static_cast<double>(draws - 1);
        CHECK(std::abs(var - 1.0 / 18.0) <= 4.0 * 0.01 * (1.0 / 18.0));
    }
    for (int i = 1; i < dim; ++i) {
        CHECK(std::abs(mean[static_cast<std::size_t>(i)] - mean[0]) <= 4.0 * se_mean);
    }
}

TEST_CASE("verify_all runs green on a small config") {
    VerifyConfig cfg;
    cfg.seed = 7;
    cfg.enum_n = 6;
    cfg.mc_samples = 2000;
    cfg.trials = 2000;
    cfg.random_reps = 100;
    cfg.ensembles = 40;
    const VerificationReport report = verify_all(cfg);
    CHECK(report.all_passed());
    CHECK(report.checks.size() == all_check_names().size());
    CHECK(std::is_sorted(report.checks.begin(), report.checks.end(),
                         [](const CheckResult& a, const CheckResult& b) {
                             return a.name < b.name;
                         }));
    // Unique names.
    std::set<std::string> names;
    for (const auto& c : report.checks) names.insert(c.name);
    CHECK(names.size() == report.checks.size());
    for (const auto& c : report.checks) {
        INFO(c.name, ": observed ", c.observed, " vs ", c.bound_or_expected);
        CHECK(c.passed);
    }
}

TEST_CASE("verify_all is deterministic per seed and worker count") {
    VerifyConfig cfg;
    cfg.seed = 1234;
    cfg.enum_n = 5;
    cfg.mc_samples = 500;
    cfg.trials = 500;
    cfg.random_reps = 30;
    cfg.ensembles = 10;

    cfg.workers = 1;
    const VerificationReport serial = verify_all(cfg);
    cfg.workers = 6;
    const VerificationReport threaded = verify_all(cfg);
    REQUIRE(serial.checks.size() == threaded.checks.size());
    for (std::size_t i = 0; i < serial.checks.size(); ++i) {
        CHECK(serial.checks[i].name == threaded.checks[i].name);
        CHECK(serial.checks[i].observed == threaded.checks[i].observed);
        CHECK(serial.checks[i].passed == threaded.checks[i].passed);
    }

    // JSON output is byte-identical apart from elapsed time.
    VerificationReport a = serial;
    VerificationReport b = threaded;
    a.elapsed_ms = 0;
    b.elapsed_ms = 0;
    CHECK(report_to_json(a) == report_to_json(b));

    // Different seed, different observations somewhere.
    cfg.seed = 99;
    const VerificationReport other = verify_all(cfg);
    bool any_diff = false;
    for (std::size_t i = 0; i < serial.checks.size(); ++i) {
        any_diff = any_diff || (other.checks[i].observed != serial.checks[i].observed);
    }
    CHECK(any_diff);
}

TEST_CASE("verify_all --only filter") {
    VerifyConfig cfg;
    cfg.enum_n = 5;
    cfg.mc_samples = 500;
    cfg.trials = 200;
    cfg.random_reps = 20;
    cfg.ensembles = 10;
    cfg.only = {"conservation"};
    const VerificationReport report = verify_all(cfg);
    CHECK(report.checks.size() == 2);
    CHECK(report.checks[0].name == "conservation-of-bias");
    CHECK(report.checks[1].name == "conservation-over-distributions");

    cfg.only = {"famine-of-*-resources"};
    const VerificationReport globbed = verify_all(cfg);
    CHECK(globbed.checks.size() == 1);
    CHECK(globbed.checks[0].name == "famine-of-favorable-resources");

    cfg.only = {"no-such-check"};
    CHECK(verify_all(cfg).checks.empty());
}

TEST_CASE("verify_all covers the full catalog of claims") {
    const auto names = all_check_names();
    const std::vector<std::string> required{
        "bias-estimate-concentration",     "bias-expressivity-tradeoff",
        "bias-over-distributions",         "bias-upper-bound",
        "conservation-of-bias",            "conservation-over-distributions",
        "expected-expressivity-bound",     "expressivity-bounds",
        "expressivity-table",              "famine-of-applicable-targets",
        "famine-of-favorable-distributions", "famine-of-favorable-resources",
        "futility-of-bias-free-search",    "geometric-divergence",
        "improbability-of-favorable-resources", "max-target-mass",
        "min-mass-subset",                 "proportion-under-bias-free-search",
        "success-under-bias-free-search"};
    for (const auto& want : required) {
        CHECK(std::find(names.begin(), names.end(), want) != names.end());
    }
    CHECK(names.size() >= 14);
}

TEST_CASE("config validation") {
    VerifyConfig cfg;
    cfg.enum_n = 3;
    CHECK_THROWS_AS(verify_all(cfg), ConfigError);
    cfg.enum_n = 13;
    CHECK_THROWS_AS(verify_all(cfg), ConfigError);
    cfg = VerifyConfig{};
    cfg.mc_samples = 10;
    CHECK_THROWS_AS(verify_all(cfg), ConfigError);
    cfg = VerifyConfig{};
    cfg.workers = -1;
    CHECK_THROWS_AS(verify_all(cfg), ConfigError);
}

TEST_CASE("report serialization") {
    VerificationReport report;
    report.seed = 5;
    report.elapsed_ms = 17;
    report.checks.push_back(
        CheckResult{"alpha", true, 0.25, 1.0, 1e-12, "detail, with comma and \"quote\""});
    const std::string json_text = report_to_json(report);
    CHECK(json_text.find("\"alpha\"") != std::string::npos);
    CHECK(json_text.find("\"all_passed\": true") != std::string::npos);
    const std::string csv_text = report_to_csv(report);
    CHECK(csv_text.rfind("name,passed,observed,bound_or_expected,tolerance,detail\n", 0) == 0);
    CHECK(csv_text.find("alpha,true,0.25,1,1e-12") != std::string::npos);
}
