#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace datamin {

// SplitMix64 finalizer. Used for hashing values and expanding seeds; every
// derived stream in the library goes through this so results do not depend
// on the standard library's engine or distribution implementations.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Derives a child seed from (seed, stream index). Not commutative.
constexpr std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
    return splitmix64(splitmix64(seed) ^ (0x9e3779b97f4a7c15ULL + stream));
}

// Canonical key for a feature subset given by its global column indices.
// Subsets are identified by this key when deriving per-subset seeds, so an
// evaluation of subset S is reproducible no matter which search produced S.
inline std::uint64_t subset_key(const std::vector<std::size_t>& indices) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (std::size_t idx : indices) {
        h = splitmix64(h ^ (static_cast<std::uint64_t>(idx) + 1));
    }
    return h;
}

// xoshiro256** (Blackman/Vigna), seeded via SplitMix64. Self-contained so
// draws are bit-identical across platforms and toolchains.
class Rng {
public:
    explicit Rng(std::uint64_t seed) noexcept {
        std::uint64_t x = seed;
        for (auto& word : state_) {
            x += 0x9e3779b97f4a7c15ULL;
            std::uint64_t z = x;
            z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
            z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
            word = z ^ (z >> 31);
        }
    }

    std::uint64_t next_u64() noexcept {
        const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // Uniform double in [0, 1).
    double next_double() noexcept {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Uniform integer in [0, bound). bound must be >= 1.
    std::uint64_t next_below(std::uint64_t bound) noexcept {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next_u64()) * bound) >> 64);
    }

    double uniform(double lo, double hi) noexcept {
        return lo + (hi - lo) * next_double();
    }

    bool bernoulli(double p) noexcept { return next_double() < p; }

    template <typename T>
    void shuffle(std::vector<T>& items) noexcept {
        for (std::size_t i = items.size(); i > 1; --i) {
            const std::size_t j = static_cast<std::size_t>(next_below(i));
            std::swap(items[i - 1], items[j]);
        }
    }

    // Moves a uniform k-subset of `items` to the front (partial Fisher-Yates).
    template <typename T>
    void sample_front(std::vector<T>& items, std::size_t k) noexcept {
        const std::size_t n = items.size();
        for (std::size_t i = 0; i < k && i + 1 < n; ++i) {
            const std::size_t j = i + static_cast<std::size_t>(next_below(n - i));
            std::swap(items[i], items[j]);
        }
    }

private:
    static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
        return (x << k) | (x >> (64 - k));
    }

    std::uint64_t state_[4]{};
};

}  // namespace datamin
