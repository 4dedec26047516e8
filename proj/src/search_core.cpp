#include "searchbias/search_core.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <thread>

#include "searchbias/numeric.hpp"

namespace searchbias {

namespace {

std::string describe_len(std::string_view what, std::size_t got, int want) {
    std::string msg(what);
    msg += ": expected ";
    msg += std::to_string(want);
    msg += " entries, got ";
    msg += std::to_string(got);
    return msg;
}

}  // namespace

SearchSpace::SearchSpace(int size_in) : size(size_in) {
    if (size < 1) {
        throw InvalidParameter("search space size must be >= 1, got " + std::to_string(size));
    }
}

TargetFunction::TargetFunction(int space_size, std::vector<int> indices)
    : space_size_(space_size), indices_(std::move(indices)) {
    if (space_size_ < 1) {
        throw InvalidParameter("target: space size must be >= 1");
    }
    if (indices_.empty() || indices_.size() > static_cast<std::size_t>(space_size_)) {
        throw InvalidParameter("target: need 1 <= k <= " + std::to_string(space_size_) +
                               ", got k = " + std::to_string(indices_.size()));
    }
    int prev = -1;
    for (int i : indices_) {
        if (i <= prev || i >= space_size_) {
            throw InvalidParameter("target: indices must be strictly increasing and in [0, " +
                                   std::to_string(space_size_) + ")");
        }
        prev = i;
    }
}

bool TargetFunction::contains(int index) const noexcept {
    return std::binary_search(indices_.begin(), indices_.end(), index);
}

StrategyDistribution StrategyDistribution::uniform(int space_size) {
    if (space_size < 1) {
        throw InvalidParameter("uniform strategy: space size must be >= 1");
    }
    return StrategyDistribution(
        std::vector<double>(static_cast<std::size_t>(space_size), 1.0 / space_size));
}

StrategyDistribution StrategyDistribution::validated(int space_size,
                                                     std::span<const double> raw) {
    if (space_size < 1) {
        throw InvalidParameter("strategy: space size must be >= 1");
    }
    if (raw.size() != static_cast<std::size_t>(space_size)) {
        throw DimensionMismatch(describe_len("strategy", raw.size(), space_size));
    }
    std::vector<double> mass(raw.begin(), raw.end());
    for (std::size_t i = 0; i < mass.size(); ++i) {
        if (mass[i] < -kClampTolerance) {
            throw NegativeMass("strategy entry " + std::to_string(i) + " is negative: " +
                               format_double(mass[i]));
        }
        if (mass[i] < 0.0) mass[i] = 0.0;
    }
    const double sum = compensated_total(mass);
    if (std::abs(sum - 1.0) > kInputSumTolerance) {
        throw NotNormalized("strategy mass sums to " + format_double(sum) +
                            ", outside 1 +/- 1e-6");
    }
    for (double& x : mass) x /= sum;
    // Push the leftover rounding error onto the largest entry so the stored
    // vector sums to 1.0 bit-exactly.
    const double residual = 1.0 - compensated_total(mass);
    if (residual != 0.0) {
        auto it = std::max_element(mass.begin(), mass.end());
        *it += residual;
    }
    return StrategyDistribution(std::move(mass));
}

StrategyDistribution StrategyDistribution::from_mass(std::vector<double> mass) {
    if (mass.empty()) {
        throw InvalidParameter("strategy: space size must be >= 1");
    }
    for (std::size_t i = 0; i < mass.size(); ++i) {
        if (mass[i] < 0.0) {
            throw NegativeMass("computed strategy entry " + std::to_string(i) +
                               " is negative: " + format_double(mass[i]));
        }
    }
    const double sum = compensated_total(mass);
    if (std::abs(sum - 1.0) > kInternalSumTolerance) {
        throw NotNormalized("computed strategy mass sums to " + format_double(sum) +
                            ", outside 1 +/- 1e-9");
    }
    return StrategyDistribution(std::move(mass));
}

int StrategyDistribution::sample_index(Rng& rng) const {
    const double u = rng.uniform01();
    double cum = 0.0;
    int last_positive = -1;
    for (int i = 0; i < space_size(); ++i) {
        const double m = mass_[static_cast<std::size_t>(i)];
        if (m <= 0.0) continue;
        last_positive = i;
        cum += m;
        if (u < cum) return i;
    }
    // u landed past the accumulated total (rounding); take the last live entry.
    return last_positive >= 0 ? last_positive : space_size() - 1;
}

int InformationResource::space_size() const noexcept {
    if (const auto* e = std::get_if<ExplicitStrategy>(&payload)) {
        return e->strategy.space_size();
    }
    return static_cast<int>(std::get<FitnessTask>(payload).fitness.size());
}

ResourceSet::ResourceSet(int space_size_in, std::vector<InformationResource> resources_in)
    : space_size(space_size_in), resources(std::move(resources_in)) {
    if (space_size < 1) {
        throw InvalidParameter("resource set: space size must be >= 1");
    }
    if (resources.empty()) {
        throw InvalidParameter("resource set: needs at least one resource");
    }
    for (const auto& r : resources) {
        if (r.id.empty()) {
            throw InvalidParameter("resource set: empty resource id");
        }
        if (r.space_size() != space_size) {
            throw DimensionMismatch("resource '" + r.id + "': payload has " +
                                    std::to_string(r.space_size()) + " entries, space size is " +
                                    std::to_string(space_size));
        }
        if (const auto* task = std::get_if<FitnessTask>(&r.payload)) {
            if (task->queries < 1) {
                throw InvalidParameter("resource '" + r.id + "': queries must be >= 1");
            }
        }
    }
    std::vector<std::string> ids;
    ids.reserve(resources.size());
    for (const auto& r : resources) ids.push_back(r.id);
    std::sort(ids.begin(), ids.end());
    if (std::adjacent_find(ids.begin(), ids.end()) != ids.end()) {
        throw InvalidParameter("resource set: duplicate resource ids");
    }
}

ResourceDistribution::ResourceDistribution(ResourceSet set_in, std::span<const double> weights_in)
    : set(std::move(set_in)), weights(weights_in.begin(), weights_in.end()) {
    if (weights.size() != static_cast<std::size_t>(set.size())) {
        throw DimensionMismatch(describe_len("resource weights", weights.size(), set.size()));
    }
    for (std::size_t i = 0; i < weights.size(); ++i) {
        if (weights[i] < -kClampTolerance) {
            throw NegativeMass("resource weight " + std::to_string(i) + " is negative: " +
                               format_double(weights[i]));
        }
        if (weights[i] < 0.0) weights[i] = 0.0;
    }
    const double sum = compensated_total(weights);
    if (std::abs(sum - 1.0) > kInputSumTolerance) {
        throw NotNormalized("resource weights sum to " + format_double(sum) +
                            ", outside 1 +/- 1e-6");
    }
    for (double& w : weights) w /= sum;
    const double residual = 1.0 - compensated_total(weights);
    if (residual != 0.0) {
        auto it = std::max_element(weights.begin(), weights.end());
        *it += residual;
    }
}

ResourceDistribution ResourceDistribution::uniform(ResourceSet set_in) {
    const std::vector<double> w(static_cast<std::size_t>(set_in.size()),
                                1.0 / set_in.size());
    return ResourceDistribution(std::move(set_in), w);
}

AlgorithmSpec AlgorithmSpec::uniform_sampler() { return AlgorithmSpec{Kind::UniformSampler, 0.0}; }

AlgorithmSpec AlgorithmSpec::epsilon_greedy(double greed) {
    if (!(greed >= 0.0 && greed <= 1.0)) {
        throw InvalidAlgorithmSpec("greedy mass must lie in [0, 1], got " + format_double(greed));
    }
    return AlgorithmSpec{Kind::EpsilonGreedy, greed};
}

AlgorithmSpec AlgorithmSpec::parse(std::string_view text) {
    if (text == "uniform" || text == "uniform-sampler") {
        return uniform_sampler();
    }
    for (std::string_view prefix : {std::string_view("greedy:"), std::string_view("epsilon-greedy:")}) {
        if (text.starts_with(prefix)) {
            const std::string_view num = text.substr(prefix.size());
            double g = 0.0;
            const auto* end = num.data() + num.size();
            const auto res = std::from_chars(num.data(), end, g);
            if (res.ec != std::errc() || res.ptr != end) {
                throw InvalidAlgorithmSpec("cannot parse greedy mass in '" + std::string(text) +
                                           "'");
            }
            return epsilon_greedy(g);
        }
    }
    throw InvalidAlgorithmSpec("unknown algorithm '" + std::string(text) +
                               "'; expected uniform or greedy:<g>");
}

std::string AlgorithmSpec::name() const {
    if (kind == Kind::UniformSampler) return "uniform-sampler";
    return "epsilon-greedy:" + format_double(greed);
}

StrategyDistribution uniform_strategy(const SearchSpace& space) {
    return StrategyDistribution::uniform(space.size);
}

StrategyDistribution validate_strategy(int space_size, std::span<const double> raw) {
    return StrategyDistribution::validated(space_size, raw);
}

double per_query_success(const TargetFunction& t, const StrategyDistribution& pbar) {
    if (t.space_size() != pbar.space_size()) {
        throw DimensionMismatch("per_query_success: target over " +
                                std::to_string(t.space_size()) + " elements, strategy over " +
                                std::to_string(pbar.space_size()));
    }
    KahanSum acc;
    for (int i : t.indices()) acc.add(pbar[i]);
    return acc.value();
}

std::optional<std::uint64_t> binomial_within(int n, int k, std::uint64_t cap) {
    if (n < 0 || k < 0 || k > n) return 0;
    k = std::min(k, n - k);
    // With k <= n/2 the partial values C(n, i) grow monotonically, so the cap
    // can be enforced between steps without overflow risk.
    unsigned __int128 c = 1;
    for (int i = 1; i <= k; ++i) {
        c = c * static_cast<unsigned>(n - k + i) / static_cast<unsigned>(i);
        if (c > cap) return std::nullopt;
    }
    return static_cast<std::uint64_t>(c);
}

std::uint64_t binomial_checked(int n, int k, std::uint64_t cap) {
    const auto c = binomial_within(n, k, cap);
    if (!c) {
        throw TooLarge("C(" + std::to_string(n) + ", " + std::to_string(k) +
                       ") exceeds the enumeration cap " + std::to_string(cap));
    }
    return *c;
}

TargetEnumerator::TargetEnumerator(int space_size, int k, std::uint64_t cap)
    : space_size_(space_size), k_(k) {
    if (space_size < 1 || k < 1 || k > space_size) {
        throw InvalidParameter("target enumeration: need 1 <= k <= n, got k = " +
                               std::to_string(k) + ", n = " + std::to_string(space_size));
    }
    total_ = binomial_checked(space_size, k, cap);
    indices_.resize(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) indices_[static_cast<std::size_t>(i)] = i;
}

TargetFunction TargetEnumerator::current() const {
    return TargetFunction(space_size_, indices_);
}

void TargetEnumerator::advance() {
    if (done_) return;
    int i = k_ - 1;
    while (i >= 0 && indices_[static_cast<std::size_t>(i)] == space_size_ - k_ + i) --i;
    if (i < 0) {
        done_ = true;
        return;
    }
    ++indices_[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < k_; ++j) {
        indices_[static_cast<std::size_t>(j)] = indices_[static_cast<std::size_t>(j - 1)] + 1;
    }
}

std::optional<TargetFunction> TargetEnumerator::next() {
    if (done_) return std::nullopt;
    TargetFunction t = current();
    advance();
    return t;
}

namespace {

const FitnessTask& require_task(const InformationResource& resource, const char* op) {
    const auto* task = std::get_if<FitnessTask>(&resource.payload);
    if (!task) {
        throw InvalidAlgorithmSpec(std::string(op) + ": resource '" + resource.id +
                                   "' carries an explicit strategy, not a fitness task");
    }
    if (task->fitness.empty()) {
        throw InvalidParameter(std::string(op) + ": fitness vector is empty");
    }
    if (task->queries < 1) {
        throw InvalidParameter(std::string(op) + ": queries must be >= 1");
    }
    return *task;
}

void check_algorithm(const AlgorithmSpec& algorithm) {
    if (algorithm.kind == AlgorithmSpec::Kind::EpsilonGreedy &&
        !(algorithm.greed >= 0.0 && algorithm.greed <= 1.0)) {
        throw InvalidAlgorithmSpec("greedy mass must lie in [0, 1], got " +
                                   format_double(algorithm.greed));
    }
}

// Step distribution of the greedy sampler given the argmax set seen so far.
std::vector<double> greedy_step_mass(int n, double greed, const std::vector<int>& argmax) {
    const double base = (1.0 - greed) / n;
    std::vector<double> mass(static_cast<std::size_t>(n), base);
    const double bonus = greed / static_cast<double>(argmax.size());
    for (int i : argmax) mass[static_cast<std::size_t>(i)] += bonus;
    return mass;
}

}  // namespace

SearchTrace run_search(const InformationResource& resource, const AlgorithmSpec& algorithm,
                       std::uint64_t seed) {
    const FitnessTask& task = require_task(resource, "run_search");
    check_algorithm(algorithm);
    const int n = static_cast<int>(task.fitness.size());

    Rng rng(seed);
    SearchTrace trace;
    trace.steps.reserve(static_cast<std::size_t>(task.queries));
    trace.per_step_strategies.reserve(static_cast<std::size_t>(task.queries));

    double best = 0.0;
    std::vector<int> argmax;       // queried indices with the best evaluation, ascending
    std::vector<char> seen(static_cast<std::size_t>(n), 0);

    for (int step = 0; step < task.queries; ++step) {
        StrategyDistribution strategy =
            (algorithm.kind == AlgorithmSpec::Kind::UniformSampler || step == 0 || argmax.empty())
                ? StrategyDistribution::uniform(n)
                : StrategyDistribution::from_mass(greedy_step_mass(n, algorithm.greed, argmax));

        const int idx = strategy.sample_index(rng);
        const double eval = task.fitness[static_cast<std::size_t>(idx)];
        trace.steps.push_back(SearchStep{idx, eval});
        trace.per_step_strategies.push_back(std::move(strategy));

        if (algorithm.kind == AlgorithmSpec::Kind::EpsilonGreedy) {
            if (argmax.empty() || eval > best) {
                best = eval;
                argmax.assign(1, idx);
                std::fill(seen.begin(), seen.end(), 0);
                seen[static_cast<std::size_t>(idx)] = 1;
            } else if (eval == best && !seen[static_cast<std::size_t>(idx)]) {
                argmax.insert(std::lower_bound(argmax.begin(), argmax.end(), idx), idx);
                seen[static_cast<std::size_t>(idx)] = 1;
            }
        }
    }
    return trace;
}

namespace {

// Within-run time average of the step distributions for one seeded run.
std::vector<double> run_average(const InformationResource& resource,
                                const AlgorithmSpec& algorithm, std::uint64_t run_seed) {
    const SearchTrace trace = run_search(resource, algorithm, run_seed);
    const int n = resource.space_size();
    std::vector<double> avg(static_cast<std::size_t>(n), 0.0);
    for (const auto& strategy : trace.per_step_strategies) {
        for (int i = 0; i < n; ++i) avg[static_cast<std::size_t>(i)] += strategy[i];
    }
    const double steps = static_cast<double>(trace.per_step_strategies.size());
    for (double& x : avg) x /= steps;
    return avg;
}

}  // namespace

StrategyDistribution induced_strategy(const InformationResource& resource,
                                      const AlgorithmSpec& algorithm, int runs,
                                      std::uint64_t seed, int workers) {
    if (runs < 1) {
        throw InvalidParameter("induced_strategy: runs must be >= 1");
    }
    if (const auto* e = std::get_if<ExplicitStrategy>(&resource.payload)) {
        return e->strategy;
    }
    require_task(resource, "induced_strategy");
    check_algorithm(algorithm);

    const int n = resource.space_size();
    // Fixed-size blocks of runs, each summed serially in run order; blocks are
    // then reduced in block order. Worker count only changes who computes a
    // block, never the arithmetic, so results are bit-identical for any
    // `workers`.
    constexpr int kBlock = 64;
    const int blocks = (runs + kBlock - 1) / kBlock;
    std::vector<std::vector<double>> partial(
        static_cast<std::size_t>(blocks),
        std::vector<double>(static_cast<std::size_t>(2 * n), 0.0));

    auto do_block = [&](int b) {
        auto& acc = partial[static_cast<std::size_t>(b)];
        const int lo = b * kBlock;
        const int hi = std::min(runs, lo + kBlock);
        for (int r = lo; r < hi; ++r) {
            const std::vector<double> avg = run_average(resource, algorithm, derive_seed(seed, static_cast<std::uint64_t>(r)));
            for (int i = 0; i < n; ++i) {
                // Neumaier update with sum in acc[i], compensation in acc[n+i].
                const double x = avg[static_cast<std::size_t>(i)];
                double& sum = acc[static_cast<std::size_t>(i)];
                double& comp = acc[static_cast<std::size_t>(n + i)];
                const double s = sum + x;
                comp += (std::abs(sum) >= std::abs(x)) ? (sum - s) + x : (x - s) + sum;
                sum = s;
            }
        }
    };

    workers = std::max(1, workers);
    if (workers == 1 || blocks == 1) {
        for (int b = 0; b < blocks; ++b) do_block(b);
    } else {
        std::vector<std::thread> pool;
        const int use = std::min(workers, blocks);
        std::atomic<int> next{0};
        pool.reserve(static_cast<std::size_t>(use));
        for (int w = 0; w < use; ++w) {
            pool.emplace_back([&] {
                for (int b = next.fetch_add(1); b < blocks; b = next.fetch_add(1)) do_block(b);
            });
        }
        for (auto& th : pool) th.join();
    }

    std::vector<double> mass(static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i < n; ++i) {
        KahanSum acc;
        for (int b = 0; b < blocks; ++b) {
            const auto& block = partial[static_cast<std::size_t>(b)];
            acc.add(block[static_cast<std::size_t>(i)] + block[static_cast<std::size_t>(n + i)]);
        }
        mass[static_cast<std::size_t>(i)] = acc.value() / runs;
    }
    return StrategyDistribution::from_mass(std::move(mass));
}

StrategyMap induced_strategies(const ResourceSet& set, const AlgorithmSpec& algorithm, int runs,
                               std::uint64_t seed, int workers) {
    StrategyMap out;
    for (const auto& resource : set.resources) {
        out.emplace(resource.id, induced_strategy(resource, algorithm, runs,
                                                  derive_seed(seed, fnv1a64(resource.id)),
                                                  workers));
    }
    return out;
}

StrategyDistribution mix_strategies(const ResourceDistribution& d, const StrategyMap& strategies) {
    const int n = d.set.space_size;
    std::vector<const StrategyDistribution*> parts;
    parts.reserve(d.set.resources.size());
    for (const auto& resource : d.set.resources) {
        const auto it = strategies.find(resource.id);
        if (it == strategies.end()) {
            throw MissingStrategy("no strategy supplied for resource '" + resource.id + "'");
        }
        if (it->second.space_size() != n) {
            throw DimensionMismatch("strategy for resource '" + resource.id + "' has " +
                                    std::to_string(it->second.space_size()) +
                                    " entries, space size is " + std::to_string(n));
        }
        parts.push_back(&it->second);
    }
    std::vector<double> mass(static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i < n; ++i) {
        KahanSum acc;
        for (std::size_t j = 0; j < parts.size(); ++j) {
            acc.add(d.weights[j] * (*parts[j])[i]);
        }
        mass[static_cast<std::size_t>(i)] = acc.value();
    }
    return StrategyDistribution::from_mass(std::move(mass));
}

}  // namespace searchbias
