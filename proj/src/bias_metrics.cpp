#include "searchbias/bias_metrics.hpp"

#include <algorithm>
#include <cmath>

#include "searchbias/numeric.hpp"
#include "searchbias/oracle.hpp"

namespace searchbias {

namespace {

void check_q_min(double q_min) {
    if (!(q_min > 0.0 && q_min <= 1.0)) {
        throw InvalidParameter("q_min must lie in (0, 1], got " + format_double(q_min));
    }
}

// Per-query success of each resource in set order.
std::vector<double> per_resource_success(const ResourceSet& b, const StrategyMap& strategies,
                                         const TargetFunction& t) {
    std::vector<double> q;
    q.reserve(b.resources.size());
    for (const auto& resource : b.resources) {
        const auto it = strategies.find(resource.id);
        if (it == strategies.end()) {
            throw MissingStrategy("no strategy supplied for resource '" + resource.id + "'");
        }
        q.push_back(per_query_success(t, it->second));
    }
    return q;
}

}  // namespace

double bias_of_strategy(const StrategyDistribution& pbar, const TargetFunction& t) {
    return per_query_success(t, pbar) - t.uniform_success();
}

double bias(const ResourceDistribution& d, const StrategyMap& strategies,
            const TargetFunction& t) {
    return bias_of_strategy(mix_strategies(d, strategies), t);
}

double empirical_bias(std::span<const StrategyDistribution> sample, const TargetFunction& t) {
    if (sample.empty()) {
        throw EmptySample("empirical_bias: sample is empty");
    }
    KahanSum acc;
    for (const auto& pbar : sample) acc.add(per_query_success(t, pbar));
    return acc.value() / static_cast<double>(sample.size()) - t.uniform_success();
}

double hoeffding_bound(int n, double epsilon) {
    if (n < 1) {
        throw InvalidParameter("hoeffding_bound: n must be >= 1");
    }
    if (!(epsilon > 0.0)) {
        throw InvalidParameter("hoeffding_bound: epsilon must be > 0");
    }
    return 2.0 * std::exp(-2.0 * n * epsilon * epsilon);
}

HoeffdingResult hoeffding_experiment(const ResourceDistribution& d, const StrategyMap& strategies,
                                     const TargetFunction& t, int n, double epsilon, int trials,
                                     std::uint64_t seed) {
    if (trials < 1) {
        throw InvalidParameter("hoeffding_experiment: trials must be >= 1");
    }
    const double bound = hoeffding_bound(n, epsilon);
    const double actual = bias(d, strategies, t);
    const std::vector<double> q = per_resource_success(d.set, strategies, t);
    const double p = t.uniform_success();

    long exceed = 0;
    for (int trial = 0; trial < trials; ++trial) {
        Rng rng(derive_seed(seed, static_cast<std::uint64_t>(trial)));
        KahanSum acc;
        for (int i = 0; i < n; ++i) {
            // Resource-level sampling: each draw contributes its exact
            // per-query success value.
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
            acc.add(q[pick]);
        }
        const double emp = acc.value() / n - p;
        if (std::abs(emp - actual) >= epsilon) ++exceed;
    }
    return HoeffdingResult{n, epsilon, bound,
                           static_cast<double>(exceed) / static_cast<double>(trials), trials};
}

BiasExtrema bias_extrema(const StrategyDistribution& pbar, int k) {
    const int n = pbar.space_size();
    if (k < 1 || k > n) {
        throw InvalidParameter("bias_extrema: need 1 <= k <= n, got k = " + std::to_string(k));
    }
    if (k == n) {
        // Single target with full mass; everything degenerates to zero.
        return BiasExtrema{0.0, 0.0, 0.0, 1.0};
    }
    std::vector<double> sorted(pbar.mass().begin(), pbar.mass().end());
    std::sort(sorted.begin(), sorted.end());

    const double p = static_cast<double>(k) / n;
    KahanSum lo, hi;
    for (int i = 0; i < k; ++i) {
        lo.add(sorted[static_cast<std::size_t>(i)]);
        hi.add(sorted[static_cast<std::size_t>(n - 1 - i)]);
    }
    const double inf_bias = lo.value() - p;
    const double sup_bias = hi.value() - p;
    return BiasExtrema{inf_bias, sup_bias, (p - 1.0) / p * inf_bias, p};
}

double conservation_sum(const StrategyDistribution& pbar, int k, std::uint64_t cap) {
    KahanSum acc;
    for (TargetEnumerator e(pbar.space_size(), k, cap); !e.done(); e.advance()) {
        KahanSum mass;
        for (int i : e.indices()) mass.add(pbar[i]);
        acc.add(mass.value() - static_cast<double>(k) / pbar.space_size());
    }
    return acc.value();
}

double improbability_bound(double p, double bias_value, double q_min) {
    if (!(p > 0.0 && p <= 1.0)) {
        throw InvalidParameter("improbability_bound: p must lie in (0, 1]");
    }
    check_q_min(q_min);
    if (bias_value < -p - kClampTolerance || bias_value > 1.0 - p + kClampTolerance) {
        throw InvalidParameter("improbability_bound: bias must lie in [-p, 1-p], got " +
                               format_double(bias_value));
    }
    return (p + bias_value) / q_min;
}

FamineReport famine_proportion(const ResourceSet& b, const StrategyMap& strategies,
                               const TargetFunction& t, double q_min) {
    check_q_min(q_min);
    const std::vector<double> q = per_resource_success(b, strategies, t);
    long favorable = 0;
    for (double qi : q) {
        if (qi >= q_min) ++favorable;
    }
    const double p = t.uniform_success();
    const double set_bias = bias(ResourceDistribution::uniform(b), strategies, t);
    return FamineReport{static_cast<double>(favorable) / static_cast<double>(q.size()),
                        (p + set_bias) / q_min, q_min};
}

FamineReport applicable_targets_proportion(const StrategyDistribution& pbar, int k, double q_min,
                                           std::uint64_t cap) {
    check_q_min(q_min);
    const int n = pbar.space_size();
    if (k < 1 || k > n) {
        throw InvalidParameter("applicable_targets_proportion: need 1 <= k <= n");
    }
    const double p = static_cast<double>(k) / n;
    std::uint64_t biased = 0;
    std::uint64_t total = 0;
    for (TargetEnumerator e(n, k, cap); !e.done(); e.advance()) {
        KahanSum mass;
        for (int i : e.indices()) mass.add(pbar[i]);
        if (mass.value() - p >= q_min) ++biased;
        ++total;
    }
    return FamineReport{static_cast<double>(biased) / static_cast<double>(total),
                        p / (p + q_min), q_min};
}

std::pair<MCEstimate, double> favorable_distributions_estimate(const ResourceSet& b,
                                                               const StrategyMap& strategies,
                                                               const TargetFunction& t,
                                                               double q_min, long samples,
                                                               std::uint64_t seed) {
    check_q_min(q_min);
    if (samples < 1) {
        throw InvalidParameter("favorable_distributions_estimate: samples must be >= 1");
    }
    const std::vector<double> q = per_resource_success(b, strategies, t);
    const double p = t.uniform_success();
    const int dim = b.size();

    long hits = 0;
    for (long s = 0; s < samples; ++s) {
        Rng rng(derive_seed(seed, static_cast<std::uint64_t>(s)));
        const std::vector<double> weights = sample_simplex(dim, rng);
        KahanSum mixed;
        for (int j = 0; j < dim; ++j) {
            mixed.add(weights[static_cast<std::size_t>(j)] * q[static_cast<std::size_t>(j)]);
        }
        if (mixed.value() - p >= q_min) ++hits;
    }
    const double est = static_cast<double>(hits) / static_cast<double>(samples);
    const double se = std::sqrt(est * (1.0 - est) / static_cast<double>(samples));
    const double set_bias = bias(ResourceDistribution::uniform(b), strategies, t);
    return {MCEstimate{est, se, samples}, (p + set_bias) / q_min};
}

MCEstimate mean_bias_over_distributions(const ResourceSet& b, const StrategyMap& strategies,
                                        const TargetFunction& t, long samples,
                                        std::uint64_t seed) {
    if (samples < 1) {
        throw InvalidParameter("mean_bias_over_distributions: samples must be >= 1");
    }
    const std::vector<double> q = per_resource_success(b, strategies, t);
    const double p = t.uniform_success();
    const int dim = b.size();

    // Welford running mean/variance over the sampled bias values.
    double mean = 0.0;
    double m2 = 0.0;
    for (long s = 0; s < samples; ++s) {
        Rng rng(derive_seed(seed, static_cast<std::uint64_t>(s)));
        const std::vector<double> weights = sample_simplex(dim, rng);
        KahanSum mixed;
        for (int j = 0; j < dim; ++j) {
            mixed.add(weights[static_cast<std::size_t>(j)] * q[static_cast<std::size_t>(j)]);
        }
        const double value = mixed.value() - p;
        const double delta = value - mean;
        mean += delta / static_cast<double>(s + 1);
        m2 += delta * (value - mean);
    }
    const double variance = samples > 1 ? m2 / static_cast<double>(samples - 1) : 0.0;
    return MCEstimate{mean, std::sqrt(std::max(variance, 0.0) / static_cast<double>(samples)),
                      samples};
}

GeometricReport geometric_bound(const TargetFunction& t, const StrategyDistribution& pbar,
                                double q_min) {
    check_q_min(q_min);
    if (t.space_size() != pbar.space_size()) {
        throw DimensionMismatch("geometric_bound: dimensions disagree");
    }
    double norm_sq = 0.0;
    for (double x : pbar.mass()) norm_sq += x * x;
    const double norm = std::sqrt(norm_sq);
    if (!(norm > 0.0)) {
        throw InvalidParameter("geometric_bound: strategy has zero Euclidean norm");
    }
    const double sqrt_k = std::sqrt(static_cast<double>(t.k()));
    const double cos_theta = per_query_success(t, pbar) / (sqrt_k * norm);
    return GeometricReport{cos_theta, sqrt_k * cos_theta / q_min};
}

}  // namespace searchbias
