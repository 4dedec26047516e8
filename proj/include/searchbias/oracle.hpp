#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "searchbias/rng.hpp"
#include "searchbias/search_core.hpp"

namespace searchbias {

/// Indices (ascending) of the k smallest entries, ties resolved toward the
/// lowest index. The selected mass never exceeds (k/n) of the total, and an
/// exhaustive check confirms it is the global minimum over all k-subsets.
std::vector<int> min_mass_subset(std::span<const double> masses, int k);

/// Largest k-subset mass against its complement-scaled ceiling.
struct MassBound {
    double sup_mass = 0.0;
    double bound = 0.0;
};

/// sup over k-element targets of the target mass, and the ceiling
/// 1 - ((1-p)/p) * (mass of the k smallest entries). The ceiling is valid for
/// 2k <= n; beyond that the complement is too small to supply a k-subset.
MassBound max_target_mass(const StrategyDistribution& p_dist, int k);

/// Uniform draw from the (dim-1)-simplex: normalized unit-rate exponentials.
std::vector<double> sample_simplex(int dim, Rng& rng);
std::vector<double> sample_simplex(int dim, std::uint64_t seed);

}  // namespace searchbias
