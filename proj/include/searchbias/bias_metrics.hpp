#pragma once

#include <cstdint>
#include <utility>

#include "searchbias/search_core.hpp"

namespace searchbias {

/// Extremes of the bias over all k-element targets, plus the scaled bound
/// ((p-1)/p) * inf_bias. The bound dominates sup_bias whenever 2k <= |space|
/// (the scaled-complement argument needs a k-subset of the complement and
/// fails for larger k, where sup_bias can exceed it).
struct BiasExtrema {
    double inf_bias = 0.0;
    double sup_bias = 0.0;
    double sup_bound = 0.0;
    double p = 0.0;
};

/// Concentration experiment outcome for the empirical-vs-actual bias gap.
struct HoeffdingResult {
    int sample_size = 0;
    double epsilon = 0.0;
    double bound = 0.0;
    double exceedance_frequency = 0.0;
    int trials = 0;
};

/// A measured proportion against its analytic ceiling.
struct FamineReport {
    double proportion = 0.0;
    double bound = 0.0;
    double q_min = 0.0;
};

/// Monte Carlo estimate with its standard error.
struct MCEstimate {
    double estimate = 0.0;
    double std_error = 0.0;
    long samples = 0;
};

/// Alignment between a target vector and a strategy, and the success-probability
/// ceiling sqrt(k) * cos(theta) / q_min it implies.
struct GeometricReport {
    double cos_theta = 0.0;
    double bound = 0.0;
};

/// Target mass minus the uniform baseline: t'pbar - k/|space|, in [-p, 1-p].
double bias_of_strategy(const StrategyDistribution& pbar, const TargetFunction& t);

/// Bias of the weighted resource mixture on t.
double bias(const ResourceDistribution& d, const StrategyMap& strategies,
            const TargetFunction& t);

/// Plug-in estimate from a finite sample of strategies: mean target mass minus p.
double empirical_bias(std::span<const StrategyDistribution> sample, const TargetFunction& t);

/// 2 exp(-2 n eps^2), the two-sided concentration ceiling for a length-n mean.
double hoeffding_bound(int n, double epsilon);

/// Draws `trials` samples of n resources each from d, measures how often the
/// empirical bias misses the true bias by at least epsilon, and reports that
/// frequency next to the analytic bound.
HoeffdingResult hoeffding_experiment(const ResourceDistribution& d, const StrategyMap& strategies,
                                     const TargetFunction& t, int n, double epsilon, int trials,
                                     std::uint64_t seed);

/// Largest/smallest achievable bias over all k-element targets via sorted
/// partial sums (enumeration-free and exact).
BiasExtrema bias_extrema(const StrategyDistribution& pbar, int k);

/// Sum of the bias over every k-element target; zero up to rounding.
double conservation_sum(const StrategyDistribution& pbar, int k,
                        std::uint64_t cap = kDefaultEnumerationCap);

/// (p + bias) / q_min, the ceiling on Pr(per-query success >= q_min).
double improbability_bound(double p, double bias_value, double q_min);

/// Fraction of resources in b whose per-query success reaches q_min, with its
/// (p + bias)/q_min ceiling.
FamineReport famine_proportion(const ResourceSet& b, const StrategyMap& strategies,
                               const TargetFunction& t, double q_min);

/// Fraction of k-element targets on which pbar has bias at least q_min, with
/// its p/(p + q_min) ceiling.
FamineReport applicable_targets_proportion(const StrategyDistribution& pbar, int k, double q_min,
                                           std::uint64_t cap = kDefaultEnumerationCap);

/// Uniform-simplex Monte Carlo estimate of the fraction of resource
/// distributions whose bias on t reaches q_min; returns it with the
/// (p + bias(b,t))/q_min ceiling.
std::pair<MCEstimate, double> favorable_distributions_estimate(const ResourceSet& b,
                                                               const StrategyMap& strategies,
                                                               const TargetFunction& t,
                                                               double q_min, long samples,
                                                               std::uint64_t seed);

/// Monte Carlo mean of the bias over uniform-simplex resource distributions;
/// converges to the uniform-weights bias by linearity.
MCEstimate mean_bias_over_distributions(const ResourceSet& b, const StrategyMap& strategies,
                                        const TargetFunction& t, long samples,
                                        std::uint64_t seed);

/// cos(theta) between the k-hot target vector and the strategy, with the
/// sqrt(k) cos(theta) / q_min success ceiling.
GeometricReport geometric_bound(const TargetFunction& t, const StrategyDistribution& pbar,
                                double q_min);

}  // namespace searchbias
