#include "searchbias/oracle.hpp"

#include <algorithm>
#include <numeric>

#include "searchbias/errors.hpp"
#include "searchbias/numeric.hpp"

namespace searchbias {

std::vector<int> min_mass_subset(std::span<const double> masses, int k) {
    const int n = static_cast<int>(masses.size());
    if (k < 1 || k >= n) {
        throw InvalidParameter("min_mass_subset: need 1 <= k < n, got k = " + std::to_string(k) +
                               ", n = " + std::to_string(n));
    }
    for (double m : masses) {
        if (m < 0.0) {
            throw InvalidParameter("min_mass_subset: masses must be non-negative");
        }
    }
    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return masses[static_cast<std::size_t>(a)] < masses[static_cast<std::size_t>(b)];
    });
    order.resize(static_cast<std::size_t>(k));
    std::sort(order.begin(), order.end());
    return order;
}

MassBound max_target_mass(const StrategyDistribution& p_dist, int k) {
    const int n = p_dist.space_size();
    if (k < 1 || k >= n) {
        throw InvalidParameter("max_target_mass: need 1 <= k < n, got k = " + std::to_string(k));
    }
    std::vector<double> sorted(p_dist.mass().begin(), p_dist.mass().end());
    std::sort(sorted.begin(), sorted.end());
    KahanSum lo, hi;
    for (int i = 0; i < k; ++i) {
        lo.add(sorted[static_cast<std::size_t>(i)]);
        hi.add(sorted[static_cast<std::size_t>(n - 1 - i)]);
    }
    const double p = static_cast<double>(k) / n;
    return MassBound{hi.value(), 1.0 - (1.0 - p) / p * lo.value()};
}

std::vector<double> sample_simplex(int dim, Rng& rng) {
    if (dim < 1) {
        throw InvalidParameter("sample_simplex: dim must be >= 1");
    }
    if (dim == 1) {
        return {1.0};
    }
    std::vector<double> x(static_cast<std::size_t>(dim));
    KahanSum total;
    for (double& xi : x) {
        xi = rng.exponential();
        total.add(xi);
    }
    const double sum = total.value();
    if (!(sum > 0.0)) {
        // All draws hit the u = 1 atom (probability ~ dim * 2^-53); any point
        // works, use the centroid.
        std::fill(x.begin(), x.end(), 1.0 / dim);
        return x;
    }
    for (double& xi : x) xi /= sum;
    return x;
}

std::vector<double> sample_simplex(int dim, std::uint64_t seed) {
    Rng rng(seed);
    return sample_simplex(dim, rng);
}

}  // namespace searchbias
