#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace aftershock {

/// Identifier written into reports so a reader knows how draws were made.
inline constexpr const char* kRngAlgorithm = "mt19937_64+u53";

/// SplitMix64 finalizer; used to derive independent child seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Seed for the `stream`-th independent sub-generator of `seed`.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
    return splitmix64(seed ^ splitmix64(stream + 1));
}

/// Portable generator. std::mt19937_64's output sequence is fixed by the
/// standard; the std distributions are not, so conversions are done here.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() noexcept {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    /// Exponential with unit mean.
    double exponential() noexcept { return -std::log1p(-uniform()); }

    /// Uniform integer in [0, n); n > 0. Lemire-style rejection keeps it unbiased.
    std::uint64_t below(std::uint64_t n) noexcept {
        const std::uint64_t limit = (~std::uint64_t{0} / n) * n;
        std::uint64_t x = engine_();
        while (x >= limit) x = engine_();
        return x % n;
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace aftershock
