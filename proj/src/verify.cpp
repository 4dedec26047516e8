#include "searchbias/verify.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <numeric>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "searchbias/bias_metrics.hpp"
#include "searchbias/expressivity.hpp"
#include "searchbias/numeric.hpp"
#include "searchbias/oracle.hpp"
#include "searchbias/search_core.hpp"

namespace searchbias {

namespace {

constexpr double kSlack = 1e-12;  // float slack on analytically exact bounds

StrategyDistribution random_strategy(int n, Rng& rng) {
    return StrategyDistribution::from_mass(sample_simplex(n, rng));
}

TargetFunction random_target(int n, int k, Rng& rng) {
    std::vector<int> pool(static_cast<std::size_t>(n));
    std::iota(pool.begin(), pool.end(), 0);
    for (int i = 0; i < k; ++i) {
        const int j = i + static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(n - i));
        std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(j)]);
    }
    pool.resize(static_cast<std::size_t>(k));
    std::sort(pool.begin(), pool.end());
    return TargetFunction(n, std::move(pool));
}

struct Ensemble {
    ResourceSet set;
    StrategyMap strategies;
    std::vector<double> weights;

    ResourceDistribution distribution() const { return ResourceDistribution(set, weights); }
};

Ensemble random_ensemble(int n, int m, bool random_weights, Rng& rng) {
    std::vector<InformationResource> resources;
    StrategyMap strategies;
    resources.reserve(static_cast<std::size_t>(m));
    for (int j = 0; j < m; ++j) {
        const std::string id = "r" + std::to_string(j);
        StrategyDistribution s = random_strategy(n, rng);
        resources.push_back(InformationResource{id, ExplicitStrategy{s}});
        strategies.emplace(id, std::move(s));
    }
    std::vector<double> weights =
        random_weights ? sample_simplex(m, rng)
                       : std::vector<double>(static_cast<std::size_t>(m), 1.0 / m);
    return Ensemble{ResourceSet(n, std::move(resources)), std::move(strategies),
                    std::move(weights)};
}

// All cyclic shifts of one random strategy under uniform weights: the mixture
// is uniform, so the ensemble has zero bias on every target (up to rounding).
Ensemble zero_bias_ensemble(int n, Rng& rng) {
    const StrategyDistribution base = random_strategy(n, rng);
    std::vector<InformationResource> resources;
    StrategyMap strategies;
    for (int s = 0; s < n; ++s) {
        std::vector<double> mass(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
            mass[static_cast<std::size_t>(i)] = base[(i + s) % n];
        }
        const std::string id = "r" + std::to_string(s);
        StrategyDistribution shifted = StrategyDistribution::from_mass(std::move(mass));
        resources.push_back(InformationResource{id, ExplicitStrategy{shifted}});
        strategies.emplace(id, std::move(shifted));
    }
    return Ensemble{ResourceSet(n, std::move(resources)), std::move(strategies),
                    std::vector<double>(static_cast<std::size_t>(n), 1.0 / n)};
}

// Random distribution with target mass exactly p+eps: independent simplex
// draws inside and outside the target, scaled to the two block masses.
StrategyDistribution conditioned_strategy(const TargetFunction& t, double p_plus_eps, Rng& rng) {
    const int n = t.space_size();
    const int k = t.k();
    std::vector<double> mass(static_cast<std::size_t>(n), 0.0);
    if (p_plus_eps > 0.0) {
        const std::vector<double> inside = sample_simplex(k, rng);
        for (int i = 0; i < k; ++i) {
            mass[static_cast<std::size_t>(t.indices()[static_cast<std::size_t>(i)])] =
                p_plus_eps * inside[static_cast<std::size_t>(i)];
        }
    }
    if (p_plus_eps < 1.0 && k < n) {
        const std::vector<double> outside = sample_simplex(n - k, rng);
        int at = 0;
        for (int i = 0; i < n; ++i) {
            if (!t.contains(i)) {
                mass[static_cast<std::size_t>(i)] =
                    (1.0 - p_plus_eps) * outside[static_cast<std::size_t>(at++)];
            }
        }
    }
    return StrategyDistribution::from_mass(std::move(mass));
}

double q_min_draw(Rng& rng) { return 0.05 + 0.95 * rng.uniform01(); }

struct CheckContext {
    const VerifyConfig& cfg;
    std::uint64_t seed = 0;  // derived from (cfg.seed, name)
};

using CheckFn = CheckResult (*)(const CheckContext&);

CheckResult make_result(std::string name, double observed, double limit, double tolerance,
                        std::string detail) {
    const bool passed = observed <= limit + tolerance;
    return CheckResult{std::move(name), passed, observed, limit, tolerance, std::move(detail)};
}

// --- individual checks -----------------------------------------------------

CheckResult check_conservation(const CheckContext& ctx) {
    Rng rng(ctx.seed);
    double worst = 0.0;
    const int reps = std::max(5, ctx.cfg.random_reps / 40);
    for (int n = 2; n <= ctx.cfg.enum_n; ++n) {
        for (int k = 1; k <= n; ++k) {
            const double allowance =
                1e-9 * static_cast<double>(binomial_checked(n, k));
            for (int rep = 0; rep < reps; ++rep) {
                const StrategyDistribution pbar = random_strategy(n, rng);
                worst = std::max(worst, std::abs(conservation_sum(pbar, k)) / allowance);
            }
        }
    }
    return make_result("conservation-of-bias", worst, 1.0, 0.0,
                       "max |sum over k-hot targets of bias| / (1e-9 C(n,k)); n=2.." +
                           std::to_string(ctx.cfg.enum_n) + ", all k");
}

CheckResult check_bias_upper_bound(const CheckContext& ctx) {
    Rng rng(ctx.seed);
    double worst = -1.0;
    for (int n = 2; n <= 16; ++n) {
        for (int k = 1; 2 * k <= n; ++k) {
            for (int rep = 0; rep < ctx.cfg.random_reps; ++rep) {
                const BiasExtrema ex = bias_extrema(random_strategy(n, rng), k);
                worst = std::max(worst, ex.sup_bias - ex.sup_bound);
            }
        }
    }
    return make_result("bias-upper-bound", worst, 0.0, kSlack,
                       "sup bias minus ((p-1)/p) inf bias over random strategies; "
                       "n=2..16, 2k <= n (outside that domain the inequality fails)");
}

CheckResult check_max_target_mass(const CheckContext& ctx) {
    Rng rng(ctx.seed);
    double worst = -1.0;
    for (int n = 2; n <= 16; ++n) {
        for (int k = 1; 2 * k <= n && k < n; ++k) {
            for (int rep = 0; rep < ctx.cfg.random_reps; ++rep) {
                const MassBound mb = max_target_mass(random_strategy(n, rng), k);
                worst = std::max(worst, mb.sup_mass - mb.bound);
            }
        }
    }
    return make_result("max-target-mass", worst, 0.0, kSlack,
                       "k-largest mass minus 1-((1-p)/p)(k-smallest mass); n=2..16, 2k <= n");
}

CheckResult check_min_mass_subset(const CheckContext& ctx) {
    Rng rng(ctx.seed);
    double worst = -1.0;
    const int n_max = std::min(ctx.cfg.enum_n, 10);
    for (int n = 2; n <= n_max; ++n) {
        for (int rep = 0; rep < std::max(2, ctx.cfg.random_reps / 100); ++rep) {
            std::vector<double> masses = sample_simplex(n, rng);
            const double scale = rng.uniform_pos();  // arbitrary total mass
            for (double& m : masses) m *= scale;
            const double total = compensated_total(masses);
            for (int k = 1; k < n; ++k) {
                const std::vector<int> picked = min_mass_subset(masses, k);
                KahanSum mass;
                for (int i : picked) mass.add(masses[static_cast<std::size_t>(i)]);
                worst = std::max(worst,
                                 mass.value() - static_cast<double>(k) / n * total);
                // Also the global minimizer, by enumeration.
                double best = total;
                for_each_target(n, k, kDefaultEnumerationCap, [&](std::span<const int> sub) {
                    KahanSum s;
                    for (int i : sub) s.add(masses[static_cast<std::size_t>(i)]);
                    best = std::min(best, s.value());
                });
                worst = std::max(worst, mass.value() - best);
            }
        }
    }
    return make_result("min-mass-subset", worst, 0.0, kSlack,
                       "k-smallest mass vs (k/n) of total and vs exhaustive minimum; n <= " +
                           std::to_string(n_max));
}

Ensemble concentration_demo() {
    const std::vector<double> a{1.0, 0.0, 0.0, 0.0};
    const std::vector<double> b{0.0, 0.0, 0.0, 1.0};
    std::vector<InformationResource> resources{
        InformationResource{"hit", ExplicitStrategy{StrategyDistribution::validated(4, a)}},
        InformationResource{"miss", ExplicitStrategy{StrategyDistribution::validated(4, b)}}};
    StrategyMap strategies;
    strategies.emplace("hit", StrategyDistribution::validated(4, a));
    strategies.emplace("miss", StrategyDistribution::validated(4, b));
    return Ensemble{ResourceSet(4, std::move(resources)), std::move(strategies),
                    std::vector<double>{0.5, 0.5}};
}

CheckResult check_concentration(const CheckContext& ctx) {
    const Ensemble demo = concentration_demo();
    const TargetFunction t(4, {0});
    double worst = -1.0;
    struct Point {
        int n;
        double eps;
    };
    for (const Point pt : {Point{100, 0.2}, Point{200, 0.1}, Point{50, 0.3}}) {
        const HoeffdingResult res =
            hoeffding_experiment(demo.distribution(), demo.strategies, t, pt.n, pt.eps,
                                 ctx.cfg.trials, derive_seed(ctx.seed, fnv1a64("pt") + pt.n));
        // The theorem bounds the true exceedance probability; the observed
        // frequency gets the one-sided sampling slack of that null.
        const double se =
            std::sqrt(res.bound * (1.0 - res.bound) / static_cast<double>(res.trials));
        worst = std::max(worst, res.exceedance_frequency - (res.bound + 3.0 * se));
    }
    return make_result("bias-estimate-concentration", worst, 0.0, 0.0,
                       "empirical exceedance frequency minus (2 exp(-2 n eps^2) + 3 SE); "
                       "two point-mass resources, trials=" + std::to_string(ctx.cfg.trials));
}

CheckResult check_futility(const CheckContext& ctx) {
    Rng rng(ctx.seed);
    double worst = 0.0;
    for (int rep = 0; rep < ctx.cfg.ensembles; ++rep) {
        const int n = 3 + static_cast<int>(rng.next_u64() % 8);
        const Ensemble e = zero_bias_ensemble(n, rng);
        const StrategyDistribution mix = mix_strategies(e.distribution(), e.strategies);
        const int k = 1 + static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(n));
        const TargetFunction t = random_target(n, k, rng);
        // Marginal success of a zero-bias ensemble is exactly the uniform baseline.
        worst = std::max(worst, std::abs(per_query_success(t, mix) - t.uniform_success()));
    }
    return make_result("futility-of-bias-free-search", worst, 0.0, kSlack,
                       "|marginal success - p| on shift-ensembles whose mixture is uniform");
}

CheckResult check_improbability(const CheckContext& ctx) {
    Rng rng(ctx.seed);
    double worst = -1.0;
    const long draws = std::max<long>(200, ctx.cfg.mc_samples / 10);
    for (int rep = 0; rep < ctx.cfg.ensembles; ++rep) {
        const int n = 3 + static_cast<int>(rng.next_u64() % 8);
        const int m = 2 + static_cast<int>(rng.next_u64() % 5);
        const Ensemble e = random_ensemble(n, m, true, rng);
        const int k = 1 + static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(n - 1));
        const TargetFunction t = random_target(n, k, rng);
        const double q_min = q_min_draw(rng);
        const ResourceDistribution d = e.distribution();
        const double limit =
            improbability_bound(t.uniform_success(), bias(d, e.strategies, t), q_min);

        // Exact probability of drawing a favorable resource.
        std::vector<double> q;
        q.reserve(e.set.resources.size());
        for (const auto& r : e.set.resources) {
            q.push_back(per_query_success(t, e.strategies.at(r.id)));
        }
        KahanSum exact;
        for (std::size_t j = 0; j < q.size(); ++j) {
            if (q[j] >= q_min) exact.add(d.weights[j]);
        }
        worst = std::max(worst, exact.value() - limit);

        // Monte Carlo resource sampling against the same ceiling.
        long hits = 0;
        for (long s = 0; s < draws; ++s) {
            const double u = rng.uniform01();
            double cum = 0.0;
            std::size_t pick = q.size() - 1;
            for (std::size_t j = 0; j < q.size(); ++j) {
                cum += d.weights[j];
                if (u < cum) {
                    pick = j;
                    break;
                }
            }
            if (q[pick] >= q_min) ++hits;
        }
        const double freq = static_cast<double>(hits) / static_cast<double>(draws);
        const double se = std::sqrt(freq * (1.0 - freq) / static_cast<double>(draws));
        worst = std::max(worst, freq - (limit + 3.0 * se));
    }
    return make_result("improbability-of-favorable-resources", worst, 0.0, kSlack,
                       "Pr(q >= q_min) minus (p + bias)/q_min, exact and resource-sampled");
}

CheckResult check_success_bias_free(const CheckContext& ctx) {
    Rng rng(ctx.seed);
    double worst = -1.0;
    for (int rep = 0; rep < ctx.cfg.ensembles; ++rep) {
        const int n = 3 + static_cast<int>(rng.next_u64() % 8);
        const Ensemble e = zero_bias_ensemble(n, rng);
        const int k = 1 + static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(n - 1));
        const TargetFunction t = random_target(n, k, rng);
        const double q_min = q_min_draw(rng);
        KahanSum exact;
        for (std::size_t j = 0; j < e.set.resources.size(); ++j) {
            if (per_query_success(t, e.strategies.at(e.set.resources[j].id)) >= q_min) {
                exact.add(e.weights[j]);
            }
        }
        worst = std::max(worst, exact.value() - t.uniform_success() / q_min);
    }
    return make_result("success-under-bias-free-search", worst, 0.0, kSlack,
                       "Pr(q >= q_min) minus p/q_min on zero-bias ensembles");
}

CheckResult check_famine_resources(const CheckContext& ctx) {
    Rng rng(ctx.seed);
    double worst = -1.0;
    for (int rep = 0; rep < ctx.cfg.ensembles; ++rep) {
        const int n = 3 + static_cast<int>(rng.next_u64() % 8);
        const int m = 2 + static_cast<int>(rng.next_u64() % 6);
        const Ensemble e = random_ensemble(n, m, false, rng);
        const int k = 1 + static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(n - 1));
        const TargetFunction t = random_target(n, k, rng);
        const FamineReport rep_out =
            famine_proportion(e.set, e.strategies, t, q_min_draw(rng));
        worst = std::max(worst, rep_out.proportion - rep_out.bound);
    }
    return make_result("famine-of-favorable-resources", worst, 0.0, kSlack,
                       "favorable-resource proportion minus (p + bias)/q_min");
}

CheckResult check_proportion_bias_free(const CheckContext& ctx) {
    Rng rng(ctx.seed);
    double worst = -1.0;
    for (int rep = 0; rep < ctx.cfg.ensembles; ++rep) {
        const int n = 3 + static_cast<int>(rng.next_u64() % 8);
        const Ensemble e = zero_bias_ensemble(n, rng);
        const int k = 1 + static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(n - 1));
        const TargetFunction t = random_target(n, k, rng);
        const double q_min = q_min_draw(rng);
        const FamineReport rep_out = famine_proportion(e.set, e.strategies, t, q_min);
        worst = std::max(worst, rep_out.proportion - t.uniform_success() / q_min);
    }
    return make_result("proportion-under-bias-free-search", worst, 0.0, kSlack,
                       "favorable proportion minus p/q_min on zero-bias ensembles");
}

CheckResult check_famine_targets(const CheckContext& ctx) {
    Rng rng(ctx.seed);
    double worst = -1.0;
    for (int rep = 0; rep < ctx.cfg.ensembles; ++rep) {
        const int n = 3 + static_cast<int>(rng.next_u64() %
                                           static_cast<std::uint64_t>(ctx.cfg.enum_n - 2));
        const StrategyDistribution pbar = random_strategy(n, rng);
        const int k = 1 + static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(n));
        const FamineReport rep_out = applicable_targets_proportion(pbar, k, q_min_draw(rng));
        worst = std::max(worst, rep_out.proportion - rep_out.bound);
    }
    return make_result("famine-of-applicable-targets", worst, 0.0, kSlack,
                       "proportion of k-hot targets with bias >= q_min minus p/(p + q_min)");
}

CheckResult check_famine_distributions(const CheckContext& ctx) {
    Rng rng(ctx.seed);
    double worst = -1.0;
    const long samples = std::max<long>(500, ctx.cfg.mc_samples / 10);
    for (int rep = 0; rep < std::max(10, ctx.cfg.ensembles / 4); ++rep) {
        const int n = 3 + static_cast<int>(rng.next_u64() % 8);
        const int m = 2 + static_cast<int>(rng.next_u64() % 4);
        const Ensemble e = random_ensemble(n, m, false, rng);
        const int k = 1 + static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(n - 1));
        const TargetFunction t = random_target(n, k, rng);
        const auto [estimate, limit] = favorable_distributions_estimate(
            e.set, e.strategies, t, q_min_draw(rng), samples, rng.next_u64());
        worst = std::max(worst, estimate.estimate - (limit + 3.0 * estimate.std_error));
    }
    return make_result("famine-of-favorable-distributions", worst, 0.0, kSlack,
                       "simplex-sampled favorable fraction minus ((p + bias)/q_min + 3 SE)");
}

CheckResult check_bias_over_distributions(const CheckContext& ctx) {
    Rng rng(ctx.seed);
    const long samples = std::max<long>(500, ctx.cfg.mc_samples / 10);
    const int reps = std::max(10, ctx.cfg.ensembles / 4);
    // The |estimate - truth| <= 3 SE event is a boundary t-statistic, so a
    // ~0.27% exceedance rate is the correct behavior, not a failure. Bound the
    // exceedance count by its own binomial envelope instead of demanding zero.
    int exceed = 0;
    for (int rep = 0; rep < reps; ++rep) {
        const int n = 3 + static_cast<int>(rng.next_u64() % 8);
        const int m = 2 + static_cast<int>(rng.next_u64() % 4);
        const Ensemble e = random_ensemble(n, m, false, rng);
        const int k = 1 + static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(n - 1));
        const TargetFunction t = random_target(n, k, rng);
        const MCEstimate est =
            mean_bias_over_distributions(e.set, e.strategies, t, samples, rng.next_u64());
        const double set_bias = bias(ResourceDistribution::uniform(e.set), e.strategies, t);
        if (std::abs(est.estimate - set_bias) > 3.0 * est.std_error + kSlack) ++exceed;
    }
    const double rate = 0.0027;  // two-sided 3-sigma
    const double allowed = std::max(
        2.0, std::ceil(reps * rate + 4.0 * std::sqrt(reps * rate * (1.0 - rate))));
    return make_result("bias-over-distributions", static_cast<double>(exceed), allowed, 0.0,
                       "count of ensembles where |mean bias over distributions - uniform-set "
                       "bias| > 3 SE; ceiling is the binomial envelope of the nominal 0.27% rate");
}

CheckResult check_conservation_over_distributions(const CheckContext& ctx) {
    Rng rng(ctx.seed);
    const int n = 5;
    const int k = 2;
    const Ensemble e = random_ensemble(n, 3, false, rng);
    const long samples = std::max<long>(500, ctx.cfg.mc_samples / 10);
    KahanSum total;
    double var_sum = 0.0;
    for (TargetEnumerator it(n, k); !it.done(); it.advance()) {
        const MCEstimate est = mean_bias_over_distributions(e.set, e.strategies, it.current(),
                                                            samples, rng.next_u64());
        total.add(est.estimate);
        var_sum += est.std_error * est.std_error;
    }
    const double se = std::sqrt(var_sum);
    return make_result("conservation-over-distributions", std::abs(total.value()), 4.0 * se,
                       kSlack,
                       "|sum over all k-hot targets of mean bias over distributions|, n=5, k=2");
}

CheckResult check_geometric(const CheckContext& ctx) {
    Rng rng(ctx.seed);
    double worst = -1.0;
    for (int rep = 0; rep < ctx.cfg.ensembles; ++rep) {
        const int n = 3 + static_cast<int>(rng.next_u64() % 8);
        const int m = 2 + static_cast<int>(rng.next_u64() % 5);
        const Ensemble e = random_ensemble(n, m, true, rng);
        const int k = 1 + static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(n - 1));
        const TargetFunction t = random_target(n, k, rng);
        const double q_min = q_min_draw(rng);
        const ResourceDistribution d = e.distribution();
        const StrategyDistribution mix = mix_strategies(d, e.strategies);
        const GeometricReport geo = geometric_bound(t, mix, q_min);

        // Expected success never exceeds the aligned mass sqrt(k) cos(theta).
        worst = std::max(worst, per_query_success(t, mix) -
                                    std::sqrt(static_cast<double>(t.k())) * geo.cos_theta);

        KahanSum exact;
        for (std::size_t j = 0; j < e.set.resources.size(); ++j) {
            if (per_query_success(t, e.strategies.at(e.set.resources[j].id)) >= q_min) {
                exact.add(d.weights[j]);
            }
        }
        worst = std::max(worst, exact.value() - geo.bound);
    }
    return make_result("geometric-divergence", worst, 0.0, kSlack,
                       "Pr(q >= q_min) minus sqrt(k) cos(theta) / q_min, plus the alignment "
                       "identity");
}

CheckResult check_tradeoff(const CheckContext& ctx) {
    Rng rng(ctx.seed);
    double worst = -1.0;
    for (const int n : {2, 4, 8, 16}) {
        for (long s = 0; s < ctx.cfg.mc_samples; ++s) {
            const StrategyDistribution pbar = random_strategy(n, rng);
            const double entropy = entropy_bits(pbar);
            const double bias_cap = tradeoff_bias_upper(pbar);
            for (const int k : {1, n / 2}) {
                if (k < 1 || k >= n) continue;
                const BiasExtrema ex = bias_extrema(pbar, k);
                const double max_abs = std::max(ex.sup_bias, -ex.inf_bias);
                worst = std::max(worst, max_abs - bias_cap);
                worst = std::max(worst, entropy - tradeoff_expressivity_upper(n, max_abs));
            }
        }
    }
    return make_result("bias-expressivity-tradeoff", worst, 0.0, kSlack,
                       "max |bias| minus sqrt(KL/2) and H minus (log2 n - 2 bias^2); "
                       "n in {2,4,8,16}, k in {1, n/2}");
}

CheckResult check_expected_expressivity(const CheckContext& ctx) {
    Rng rng(ctx.seed);
    double worst = -1.0;
    for (int rep = 0; rep < 10 * ctx.cfg.ensembles; ++rep) {
        const int n = 3 + static_cast<int>(rng.next_u64() % 8);
        const int m = 2 + static_cast<int>(rng.next_u64() % 4);
        const Ensemble e = random_ensemble(n, m, true, rng);
        const ResourceDistribution d = e.distribution();
        KahanSum expected;
        for (std::size_t j = 0; j < e.set.resources.size(); ++j) {
            expected.add(d.weights[j] *
                         entropy_bits(e.strategies.at(e.set.resources[j].id)));
        }
        const double mix_entropy = entropy_bits(mix_strategies(d, e.strategies));
        worst = std::max(worst, expected.value() - mix_entropy);
        worst = std::max(worst, tradeoff_bias_upper(mix_strategies(d, e.strategies)) -
                                    expected_expressivity_bias_upper(d, e.strategies));
    }
    return make_result("expected-expressivity-bound", worst, 0.0, kSlack,
                       "E[H] minus mixture H, and mixture bias ceiling minus expected-entropy "
                       "ceiling (both must be <= 0)");
}

CheckResult check_expressivity_bounds(const CheckContext& ctx) {
    Rng rng(ctx.seed);
    double worst = -1.0;
    const double entropy_tol = 1e-9;
    for (const int n : {2, 4, 8, 16}) {
        for (int k = 1; k < n; ++k) {
            const double p = static_cast<double>(k) / n;
            const TargetFunction t = random_target(n, k, rng);
            for (int step = 0; step <= 10; ++step) {
                const double eps = static_cast<double>(step) / 10.0 - p;
                const ExpressivityRange range = expressivity_range(n, k, eps);

                const StrategyDistribution lo = min_entropy_construction(t, eps);
                worst = std::max(worst, std::abs(bias_of_strategy(lo, t) - eps) - kSlack);
                worst = std::max(worst,
                                 std::abs(entropy_bits(lo) - range.lower) - entropy_tol);

                const StrategyDistribution hi = max_entropy_construction(t, eps);
                worst = std::max(worst, std::abs(bias_of_strategy(hi, t) - eps) - kSlack);
                worst = std::max(worst,
                                 std::abs(entropy_bits(hi) - range.upper) - entropy_tol);

                // Containment for arbitrary strategies at this bias level.
                for (int rep = 0; rep < std::max(2, ctx.cfg.random_reps / 200); ++rep) {
                    const StrategyDistribution s =
                        conditioned_strategy(t, range.p_plus_eps, rng);
                    const double h = entropy_bits(s);
                    worst = std::max(worst, range.lower - h - entropy_tol);
                    worst = std::max(worst, h - range.upper - entropy_tol);
                }
            }
        }
    }
    return make_result("expressivity-bounds", worst, 0.0, 0.0,
                       "construction bias/entropy errors beyond tolerance and sandwich "
                       "violations; n in {2,4,8,16}, all k, 11 bias levels");
}

CheckResult check_expressivity_table(const CheckContext&) {
    double worst = 0.0;
    const auto row_gap = [&](const ExpressivityRange& row, double lower, double upper) {
        worst = std::max(worst, std::abs(row.lower - lower));
        worst = std::max(worst, std::abs(row.upper - upper));
    };
    {
        const auto rows = table_of_ranges(4, 2);
        row_gap(rows[0], 0.0, 1.0);
        row_gap(rows[1], 1.0, 2.0);
        row_gap(rows[2], 0.0, 1.0);
    }
    {
        const auto rows = table_of_ranges(2, 1);
        row_gap(rows[0], 0.0, 0.0);
        row_gap(rows[1], 1.0, 1.0);
        row_gap(rows[2], 0.0, 0.0);
    }
    {
        const auto rows = table_of_ranges(8, 2);
        const double h_quarter = -(0.25 * std::log2(0.25) + 0.75 * std::log2(0.75));
        row_gap(rows[1], h_quarter, 3.0);
        row_gap(rows[0], 0.0, std::log2(6.0));
        row_gap(rows[2], 0.0, 1.0);
    }
    return make_result("expressivity-table", worst, 0.0, 1e-9,
                       "range rows at bias in {-p, 0, 1-p} against their closed forms");
}

CheckResult check_simplex_sampler(const CheckContext& ctx) {
    Rng rng(ctx.seed);
    const int dim = 3;
    const long draws = std::max<long>(2000, ctx.cfg.mc_samples);
    std::vector<double> mean(dim, 0.0);
    std::vector<double> m2(dim, 0.0);
    for (long s = 0; s < draws; ++s) {
        const std::vector<double> x = sample_simplex(dim, rng);
        for (int i = 0; i < dim; ++i) {
            const double delta = x[static_cast<std::size_t>(i)] - mean[static_cast<std::size_t>(i)];
            mean[static_cast<std::size_t>(i)] += delta / static_cast<double>(s + 1);
            m2[static_cast<std::size_t>(i)] +=
                delta * (x[static_cast<std::size_t>(i)] - mean[static_cast<std::size_t>(i)]);
        }
    }
    // Coordinates of a uniform simplex point have mean 1/3, variance 1/18.
    const double expect_mean = 1.0 / 3.0;
    const double expect_var = 1.0 / 18.0;
    const double se_mean = std::sqrt(expect_var / static_cast<double>(draws));
    double worst = 0.0;
    for (int i = 0; i < dim; ++i) {
        worst = std::max(worst, std::abs(mean[static_cast<std::size_t>(i)] - expect_mean) /
                                    (4.0 * se_mean));
        const double var = m2[static_cast<std::size_t>(i)] / static_cast<double>(draws - 1);
        worst = std::max(worst, std::abs(var - expect_var) / (4.0 * 0.05 * expect_var));
    }
    return make_result("simplex-sampler-uniformity", worst, 1.0, 0.0,
                       "coordinate means/variances vs 1/3 and 1/18, standardized; dim=3");
}

struct NamedCheck {
    const char* name;
    CheckFn fn;
};

constexpr NamedCheck kChecks[] = {
    {"bias-estimate-concentration", check_concentration},
    {"bias-expressivity-tradeoff", check_tradeoff},
    {"bias-over-distributions", check_bias_over_distributions},
    {"bias-upper-bound", check_bias_upper_bound},
    {"conservation-of-bias", check_conservation},
    {"conservation-over-distributions", check_conservation_over_distributions},
    {"expected-expressivity-bound", check_expected_expressivity},
    {"expressivity-bounds", check_expressivity_bounds},
    {"expressivity-table", check_expressivity_table},
    {"famine-of-applicable-targets", check_famine_targets},
    {"famine-of-favorable-distributions", check_famine_distributions},
    {"famine-of-favorable-resources", check_famine_resources},
    {"futility-of-bias-free-search", check_futility},
    {"geometric-divergence", check_geometric},
    {"improbability-of-favorable-resources", check_improbability},
    {"max-target-mass", check_max_target_mass},
    {"min-mass-subset", check_min_mass_subset},
    {"proportion-under-bias-free-search", check_proportion_bias_free},
    {"simplex-sampler-uniformity", check_simplex_sampler},
    {"success-under-bias-free-search", check_success_bias_free},
};

bool glob_match(std::string_view pattern, std::string_view text) {
    // Iterative '*'/'?' matcher.
    std::size_t p = 0, t = 0, star = std::string_view::npos, mark = 0;
    while (t < text.size()) {
        if (p < pattern.size() && (pattern[p] == '?' || pattern[p] == text[t])) {
            ++p;
            ++t;
        } else if (p < pattern.size() && pattern[p] == '*') {
            star = p++;
            mark = t;
        } else if (star != std::string_view::npos) {
            p = star + 1;
            t = ++mark;
        } else {
            return false;
        }
    }
    while (p < pattern.size() && pattern[p] == '*') ++p;
    return p == pattern.size();
}

bool name_selected(std::string_view name, const std::vector<std::string>& only) {
    if (only.empty()) return true;
    for (const auto& pat : only) {
        if (pat.find('*') != std::string::npos || pat.find('?') != std::string::npos) {
            if (glob_match(pat, name)) return true;
        } else if (name.find(pat) != std::string_view::npos) {
            return true;
        }
    }
    return false;
}

}  // namespace

void VerifyConfig::validate() const {
    if (enum_n < 4 || enum_n > 12) {
        throw ConfigError("enum_n must lie in [4, 12], got " + std::to_string(enum_n));
    }
    if (mc_samples < 100) {
        throw ConfigError("mc_samples must be >= 100");
    }
    if (trials < 1) {
        throw ConfigError("trials must be >= 1");
    }
    if (random_reps < 1 || ensembles < 1) {
        throw ConfigError("random_reps and ensembles must be >= 1");
    }
    if (workers < 0) {
        throw ConfigError("workers must be >= 0");
    }
}

bool VerificationReport::all_passed() const {
    return std::all_of(checks.begin(), checks.end(),
                       [](const CheckResult& c) { return c.passed; });
}

std::vector<std::string> all_check_names() {
    std::vector<std::string> names;
    names.reserve(std::size(kChecks));
    for (const auto& c : kChecks) names.emplace_back(c.name);
    return names;
}

VerificationReport verify_all(const VerifyConfig& config) {
    config.validate();
    const auto start = std::chrono::steady_clock::now();

    std::vector<const NamedCheck*> selected;
    for (const auto& check : kChecks) {
        if (name_selected(check.name, config.only)) selected.push_back(&check);
    }

    VerificationReport report;
    report.seed = config.seed;
    report.checks.resize(selected.size());

    auto run_one = [&](std::size_t i) {
        const NamedCheck& check = *selected[i];
        const CheckContext ctx{config, derive_seed(config.seed, fnv1a64(check.name))};
        report.checks[i] = check.fn(ctx);
    };

    int workers = config.workers;
    if (workers == 0) {
        workers = static_cast<int>(std::thread::hardware_concurrency());
        if (workers < 1) workers = 1;
    }
    if (workers <= 1 || selected.size() <= 1) {
        for (std::size_t i = 0; i < selected.size(); ++i) run_one(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        const std::size_t use = std::min<std::size_t>(static_cast<std::size_t>(workers),
                                                      selected.size());
        pool.reserve(use);
        for (std::size_t w = 0; w < use; ++w) {
            pool.emplace_back([&] {
                for (std::size_t i = next.fetch_add(1); i < selected.size();
                     i = next.fetch_add(1)) {
                    run_one(i);
                }
            });
        }
        for (auto& th : pool) th.join();
    }

    std::sort(report.checks.begin(), report.checks.end(),
              [](const CheckResult& a, const CheckResult& b) { return a.name < b.name; });
    report.elapsed_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                            std::chrono::steady_clock::now() - start)
                            .count();
    return report;
}

std::string report_to_json(const VerificationReport& report) {
    nlohmann::json doc;
    doc["seed"] = report.seed;
    doc["elapsed_ms"] = report.elapsed_ms;
    doc["all_passed"] = report.all_passed();
    doc["checks"] = nlohmann::json::array();
    for (const auto& c : report.checks) {
        doc["checks"].push_back({{"name", c.name},
                                 {"passed", c.passed},
                                 {"observed", c.observed},
                                 {"bound_or_expected", c.bound_or_expected},
                                 {"tolerance", c.tolerance},
                                 {"detail", c.detail}});
    }
    return doc.dump(2) + "\n";
}

std::string report_to_csv(const VerificationReport& report) {
    std::ostringstream out;
    out << "name,passed,observed,bound_or_expected,tolerance,detail\n";
    for (const auto& c : report.checks) {
        std::string detail = c.detail;
        for (char& ch : detail) {
            if (ch == '"') ch = '\'';
        }
        out << c.name << ',' << (c.passed ? "true" : "false") << ',' << format_double(c.observed)
            << ',' << format_double(c.bound_or_expected) << ',' << format_double(c.tolerance)
            << ",\"" << detail << "\"\n";
    }
    return out.str();
}

}  // namespace searchbias
