#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "searchbias/errors.hpp"
#include "searchbias/rng.hpp"

namespace searchbias {

/// Mass vectors loaded from text are accepted when they sum to 1 within this.
inline constexpr double kInputSumTolerance = 1e-6;
/// Internally produced distributions must sum to 1 within this.
inline constexpr double kInternalSumTolerance = 1e-9;
/// Entries in [-kClampTolerance, 0) are treated as rounding noise and clamped.
inline constexpr double kClampTolerance = 1e-12;
/// Default ceiling on how many k-subsets an enumeration may visit.
inline constexpr std::uint64_t kDefaultEnumerationCap = 1'000'000;

/// Finite search space; only its cardinality matters.
struct SearchSpace {
    explicit SearchSpace(int size_in);
    int size;
};

/// A k-element subset of the search space, stored as strictly increasing indices.
class TargetFunction {
public:
    TargetFunction(int space_size, std::vector<int> indices);

    int space_size() const noexcept { return space_size_; }
    int k() const noexcept { return static_cast<int>(indices_.size()); }
    std::span<const int> indices() const noexcept { return indices_; }

    /// Per-query success probability of uniform random sampling, k/|space|.
    double uniform_success() const noexcept {
        return static_cast<double>(k()) / static_cast<double>(space_size_);
    }

    bool contains(int index) const noexcept;

private:
    int space_size_;
    std::vector<int> indices_;
};

/// Probability vector over the search space.
class StrategyDistribution {
public:
    static StrategyDistribution uniform(int space_size);

    /// Accepts caller-supplied mass: entries in [-1e-12, 0) are clamped to
    /// zero, a sum within 1e-6 of one is renormalized, anything worse throws.
    static StrategyDistribution validated(int space_size, std::span<const double> raw);

    /// For internally computed vectors; enforces the 1e-9 invariant unchanged.
    static StrategyDistribution from_mass(std::vector<double> mass);

    int space_size() const noexcept { return static_cast<int>(mass_.size()); }
    double operator[](int i) const noexcept { return mass_[static_cast<std::size_t>(i)]; }
    std::span<const double> mass() const noexcept { return mass_; }

    /// Inverse-CDF draw over the stored entry order.
    int sample_index(Rng& rng) const;

    bool operator==(const StrategyDistribution& other) const noexcept {
        return mass_ == other.mass_;
    }

private:
    explicit StrategyDistribution(std::vector<double> mass) : mass_(std::move(mass)) {}
    std::vector<double> mass_;
};

/// A resource that fully determines its induced strategy.
struct ExplicitStrategy {
    StrategyDistribution strategy;
};

/// A resource to be consumed by a search algorithm: per-element evaluations
/// plus the number of queries a run may spend.
struct FitnessTask {
    std::vector<double> fitness;
    int queries = 1;
};

/// External input that guides a search; everything downstream depends on it
/// only through the averaged strategy it induces.
struct InformationResource {
    std::string id;
    std::variant<ExplicitStrategy, FitnessTask> payload;

    int space_size() const noexcept;
    bool is_explicit() const noexcept { return std::holds_alternative<ExplicitStrategy>(payload); }
};

/// Non-empty collection of resources over one search space, unique ids.
struct ResourceSet {
    ResourceSet(int space_size_in, std::vector<InformationResource> resources_in);

    int space_size;
    std::vector<InformationResource> resources;

    int size() const noexcept { return static_cast<int>(resources.size()); }
};

/// Probability weights over a resource set.
struct ResourceDistribution {
    ResourceDistribution(ResourceSet set_in, std::span<const double> weights_in);

    static ResourceDistribution uniform(ResourceSet set_in);

    ResourceSet set;
    std::vector<double> weights;
};

struct SearchStep {
    int queried_index = 0;
    double evaluation = 0.0;
};

/// Record of one run: the point/evaluation history and the sampling
/// distribution in force at each step.
struct SearchTrace {
    std::vector<SearchStep> steps;
    std::vector<StrategyDistribution> per_step_strategies;
};

/// Built-in search algorithms. The greedy sampler starts uniform and then puts
/// `greed` mass uniformly on the argmax set of evaluations seen so far (ties
/// all included) with the remaining mass uniform over the whole space.
struct AlgorithmSpec {
    enum class Kind { UniformSampler, EpsilonGreedy };

    Kind kind = Kind::UniformSampler;
    double greed = 0.0;

    static AlgorithmSpec uniform_sampler();
    static AlgorithmSpec epsilon_greedy(double greed);
    /// "uniform" | "uniform-sampler" | "greedy:<g>" | "epsilon-greedy:<g>"
    static AlgorithmSpec parse(std::string_view text);

    std::string name() const;
};

using StrategyMap = std::map<std::string, StrategyDistribution>;

StrategyDistribution uniform_strategy(const SearchSpace& space);

StrategyDistribution validate_strategy(int space_size, std::span<const double> raw);

/// Mass the strategy puts on the target set (Neumaier-summed).
double per_query_success(const TargetFunction& t, const StrategyDistribution& pbar);

/// C(n, k) if it is <= cap, otherwise nullopt. Exact integer arithmetic.
std::optional<std::uint64_t> binomial_within(int n, int k, std::uint64_t cap);

/// C(n, k), throwing TooLarge beyond the cap.
std::uint64_t binomial_checked(int n, int k, std::uint64_t cap = kDefaultEnumerationCap);

/// Lazy lexicographic enumeration of all k-subsets of {0..space_size-1}.
class TargetEnumerator {
public:
    TargetEnumerator(int space_size, int k, std::uint64_t cap = kDefaultEnumerationCap);

    std::uint64_t total() const noexcept { return total_; }
    bool done() const noexcept { return done_; }
    std::span<const int> indices() const noexcept { return indices_; }
    TargetFunction current() const;
    void advance();
    /// current() then advance(); nullopt once exhausted.
    std::optional<TargetFunction> next();

private:
    int space_size_;
    int k_;
    bool done_ = false;
    std::uint64_t total_;
    std::vector<int> indices_;
};

inline TargetEnumerator enumerate_targets(int space_size, int k,
                                          std::uint64_t cap = kDefaultEnumerationCap) {
    return TargetEnumerator(space_size, k, cap);
}

template <typename F>
void for_each_target(int space_size, int k, std::uint64_t cap, F&& fn) {
    for (TargetEnumerator e(space_size, k, cap); !e.done(); e.advance()) {
        fn(e.indices());
    }
}

/// One full run of `algorithm` against a fitness-task resource.
SearchTrace run_search(const InformationResource& resource, const AlgorithmSpec& algorithm,
                       std::uint64_t seed);

/// Averaged strategy the resource induces: per-run time average of the step
/// distributions, then the average of those across `runs` independent runs.
/// Explicit-strategy resources return their stored vector as-is. Run r draws
/// its generator from (seed, r), and runs are reduced in fixed blocks, so the
/// result does not depend on `workers`.
StrategyDistribution induced_strategy(const InformationResource& resource,
                                      const AlgorithmSpec& algorithm, int runs,
                                      std::uint64_t seed, int workers = 1);

/// induced_strategy for every resource in the set, keyed by id. Each resource
/// derives its substream from its id, so map contents are order-independent.
StrategyMap induced_strategies(const ResourceSet& set, const AlgorithmSpec& algorithm,
                               int runs, std::uint64_t seed, int workers = 1);

/// Weighted average of the per-resource strategies under d's weights.
StrategyDistribution mix_strategies(const ResourceDistribution& d, const StrategyMap& strategies);

}  // namespace searchbias
