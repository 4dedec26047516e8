#pragma once

#include <array>

#include "searchbias/search_core.hpp"

namespace searchbias {

/// Achievable band of mixture entropies at a fixed bias level.
struct ExpressivityRange {
    double lower = 0.0;       // bits
    double upper = 0.0;       // bits
    double p_plus_eps = 0.0;  // expected mass on the target set
};

/// The two directions of the entropy/bias trade-off.
struct TradeoffBounds {
    double expressivity_upper = 0.0;  // bits
    double bias_upper = 0.0;
};

/// Shannon entropy in bits, with 0 * log 0 = 0.
double entropy_bits(const StrategyDistribution& p_dist);
double entropy_bits(std::span<const double> mass);

/// Binary entropy H(x) in bits.
double binary_entropy_bits(double x);

/// KL divergence to the uniform distribution in bits: log2 n - H(P), >= 0.
double kl_to_uniform(const StrategyDistribution& p_dist);

/// Entropy of the mixture strategy (not the average of entropies).
double entropic_expressivity(const ResourceDistribution& d, const StrategyMap& strategies);

/// Entropy band achievable at bias eps on a k-of-n target:
/// [H(p+eps), (p+eps) log2(k/(p+eps)) + (1-(p+eps)) log2((n-k)/(1-(p+eps)))].
ExpressivityRange expressivity_range(int n, int k, double eps);

/// Entropy minimizer at bias eps: all target mass on the first target element,
/// the rest on the first non-target element.
StrategyDistribution min_entropy_construction(const TargetFunction& t, double eps);

/// Entropy maximizer at bias eps: mass spread evenly inside each block.
StrategyDistribution max_entropy_construction(const TargetFunction& t, double eps);

/// log2 n - 2 bias^2, the entropy ceiling implied by a bias level.
double tradeoff_expressivity_upper(int n, double bias_value);

/// sqrt(KL(P || U)/2) in bits; dominates |bias| on every target.
double tradeoff_bias_upper(const StrategyDistribution& pbar_d);

/// sqrt((log2 n - E[H(P_f)])/2): the bias ceiling from expected entropy.
/// At least tradeoff_bias_upper of the mixture, by concavity of entropy.
double expected_expressivity_bias_upper(const ResourceDistribution& d,
                                        const StrategyMap& strategies);

/// Rows for eps in {-p, 0, 1-p}: [0, log2(n-k)], [H(p), log2 n], [0, log2 k].
std::array<ExpressivityRange, 3> table_of_ranges(int n, int k);

}  // namespace searchbias
