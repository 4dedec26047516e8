#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace searchbias {

/// splitmix64 finalizer; decorrelates nearby integers into well-mixed seeds.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Seed for a numbered substream (run index, trial index, ...) of a master seed.
/// Substreams are independent of scheduling, so parallel loops that derive one
/// seed per index reproduce the serial results bit for bit.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) noexcept {
    return mix64(master ^ mix64(stream + 0x517cc1b727220a95ULL));
}

/// FNV-1a hash, used to derive substreams from check or resource names.
constexpr std::uint64_t fnv1a64(std::string_view s) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

/// mt19937_64 with a fixed uniform-double construction. The standard library's
/// distribution objects are implementation-defined, so doubles are built here
/// from raw 64-bit draws to keep per-seed output stable across toolchains.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform on (0, 1]; safe as a log argument.
    double uniform_pos() { return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53; }

    /// Unit-rate exponential variate.
    double exponential() { return -std::log(uniform_pos()); }

private:
    std::mt19937_64 gen_;
};

}  // namespace searchbias
