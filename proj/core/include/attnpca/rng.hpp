#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace attnpca {

/// One step of the SplitMix64 mixer.
std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Derives an independent child seed from a root seed and a path of integers.
///
/// derive_seed(root, {a, b}) == splitmix64(splitmix64(splitmix64(root) ^ a) ^ b),
/// so every (root, path) pair names one stream regardless of the order in which
/// cells are executed.
std::uint64_t derive_seed(std::uint64_t root, std::initializer_list<std::uint64_t> path) noexcept;

/// Portable random source; uniform, integer and normal draws are hand-rolled over mt19937_64.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    /// Uniform integer on [0, bound) by rejection; bound must be > 0.
    std::uint64_t below(std::uint64_t bound);

    /// Standard normal via Box-Muller (cached second variate).
    double normal();

    template <typename It>
    void shuffle(It first, It last) {
        const auto count = static_cast<std::uint64_t>(last - first);
        for (std::uint64_t i = count; i > 1; --i) {
            const auto j = below(i);
            using std::swap;
            swap(first[i - 1], first[j]);
        }
    }

private:
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

} // namespace attnpca
