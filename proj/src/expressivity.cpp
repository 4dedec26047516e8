#include "searchbias/expressivity.hpp"

#include <algorithm>
#include <cmath>

#include "searchbias/numeric.hpp"

namespace searchbias {

namespace {

// a * log2(b), taken as 0 when a vanishes.
double xlog2(double a, double b) {
    if (a <= 0.0) return 0.0;
    return a * std::log2(b);
}

// p + eps clamped into [0, 1]; rejects eps outside [-p, 1-p] (small slack for
// grid endpoints computed in floating point).
double target_mass_at(double p, double eps) {
    if (eps < -p - kClampTolerance || eps > 1.0 - p + kClampTolerance) {
        throw InvalidParameter("bias level must lie in [-p, 1-p], got " + format_double(eps));
    }
    return std::clamp(p + eps, 0.0, 1.0);
}

}  // namespace

double entropy_bits(std::span<const double> mass) {
    KahanSum acc;
    for (double x : mass) {
        if (x > 0.0) acc.add(-x * std::log2(x));
    }
    return acc.value();
}

double entropy_bits(const StrategyDistribution& p_dist) { return entropy_bits(p_dist.mass()); }

double binary_entropy_bits(double x) {
    return xlog2(x, 1.0 / x) + xlog2(1.0 - x, 1.0 / (1.0 - x));
}

double kl_to_uniform(const StrategyDistribution& p_dist) {
    const double n = static_cast<double>(p_dist.space_size());
    return std::max(0.0, std::log2(n) - entropy_bits(p_dist));
}

double entropic_expressivity(const ResourceDistribution& d, const StrategyMap& strategies) {
    return entropy_bits(mix_strategies(d, strategies));
}

ExpressivityRange expressivity_range(int n, int k, double eps) {
    if (n < 2 || k < 1 || k >= n) {
        throw InvalidParameter("expressivity_range: need 1 <= k < n");
    }
    const double p = static_cast<double>(k) / n;
    const double pe = target_mass_at(p, eps);
    const double lower = binary_entropy_bits(pe);
    const double upper = xlog2(pe, k / pe) + xlog2(1.0 - pe, (n - k) / (1.0 - pe));
    return ExpressivityRange{lower, upper, pe};
}

StrategyDistribution min_entropy_construction(const TargetFunction& t, double eps) {
    const int n = t.space_size();
    const int k = t.k();
    const double pe = target_mass_at(t.uniform_success(), eps);
    std::vector<double> mass(static_cast<std::size_t>(n), 0.0);
    mass[static_cast<std::size_t>(t.indices().front())] = pe;
    if (k < n) {
        int lowest_out = 0;
        while (t.contains(lowest_out)) ++lowest_out;
        mass[static_cast<std::size_t>(lowest_out)] += 1.0 - pe;
    } else if (pe != 1.0) {
        throw InvalidParameter("min_entropy_construction: k = n admits only zero bias");
    }
    return StrategyDistribution::from_mass(std::move(mass));
}

StrategyDistribution max_entropy_construction(const TargetFunction& t, double eps) {
    const int n = t.space_size();
    const int k = t.k();
    if (k >= n) {
        throw InvalidParameter("max_entropy_construction: need k < n");
    }
    const double pe = target_mass_at(t.uniform_success(), eps);
    std::vector<double> mass(static_cast<std::size_t>(n), (1.0 - pe) / (n - k));
    const double inside = pe / k;
    for (int i : t.indices()) mass[static_cast<std::size_t>(i)] = inside;
    return StrategyDistribution::from_mass(std::move(mass));
}

double tradeoff_expressivity_upper(int n, double bias_value) {
    if (n < 1) {
        throw InvalidParameter("tradeoff_expressivity_upper: n must be >= 1");
    }
    if (std::abs(bias_value) > 1.0 + kClampTolerance) {
        throw InvalidParameter("tradeoff_expressivity_upper: |bias| must be <= 1");
    }
    return std::log2(static_cast<double>(n)) - 2.0 * bias_value * bias_value;
}

double tradeoff_bias_upper(const StrategyDistribution& pbar_d) {
    return std::sqrt(0.5 * kl_to_uniform(pbar_d));
}

double expected_expressivity_bias_upper(const ResourceDistribution& d,
                                        const StrategyMap& strategies) {
    KahanSum expected_entropy;
    for (std::size_t j = 0; j < d.set.resources.size(); ++j) {
        const auto it = strategies.find(d.set.resources[j].id);
        if (it == strategies.end()) {
            throw MissingStrategy("no strategy supplied for resource '" +
                                  d.set.resources[j].id + "'");
        }
        expected_entropy.add(d.weights[j] * entropy_bits(it->second));
    }
    const double n = static_cast<double>(d.set.space_size);
    return std::sqrt(std::max(0.0, 0.5 * (std::log2(n) - expected_entropy.value())));
}

std::array<ExpressivityRange, 3> table_of_ranges(int n, int k) {
    if (n < 2 || k < 1 || k >= n) {
        throw InvalidParameter("table_of_ranges: need 1 <= k < n");
    }
    const double p = static_cast<double>(k) / n;
    return {expressivity_range(n, k, -p), expressivity_range(n, k, 0.0),
            expressivity_range(n, k, 1.0 - p)};
}

}  // namespace searchbias
