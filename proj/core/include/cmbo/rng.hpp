#pragma once

#include <cstdint>
#include <limits>
#include <random>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace cmbo {

// Deterministic random helpers. std::mt19937_64 has a standardized output
// sequence, but the std:: distributions do not, so the draws below are
// implemented by hand to make results reproducible across toolchains.

inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Derives a child seed from a parent seed and a stream salt.
inline std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t salt) {
    std::uint64_t s = parent ^ (0xd1b54a32d192ed03ULL * (salt + 1));
    return splitmix64(s);
}

/// FNV-1a, used to fold task identifiers into seed derivations.
inline std::uint64_t fnv1a(std::string_view text) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform draw in [0, 1) with 53 bits of precision.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Unbiased uniform integer in [0, n); n must be positive.
    std::int64_t uniform_int(std::int64_t n) {
        const auto un = static_cast<std::uint64_t>(n);
        const std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
        const std::uint64_t limit = max - max % un;
        std::uint64_t v = next_u64();
        while (v >= limit) v = next_u64();
        return static_cast<std::int64_t>(v % un);
    }

    /// Standard normal via Box-Muller; one fresh pair of uniforms per call.
    double normal() {
        const double u1 = 1.0 - uniform();  // (0, 1]
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

    /// k distinct indices from [0, n), in draw order (partial Fisher-Yates).
    std::vector<Eigen::Index> sample_without_replacement(Eigen::Index n, Eigen::Index k) {
        std::vector<Eigen::Index> pool(static_cast<std::size_t>(n));
        for (Eigen::Index i = 0; i < n; ++i) pool[static_cast<std::size_t>(i)] = i;
        if (k > n) k = n;
        std::vector<Eigen::Index> out;
        out.reserve(static_cast<std::size_t>(k));
        for (Eigen::Index i = 0; i < k; ++i) {
            const auto j = static_cast<std::size_t>(i + uniform_int(n - i));
            std::swap(pool[static_cast<std::size_t>(i)], pool[j]);
            out.push_back(pool[static_cast<std::size_t>(i)]);
        }
        return out;
    }

    template <typename T>
    void shuffle(std::vector<T>& values) {
        const auto n = static_cast<std::int64_t>(values.size());
        for (std::int64_t i = n - 1; i > 0; --i) {
            const auto j = static_cast<std::size_t>(uniform_int(i + 1));
            std::swap(values[static_cast<std::size_t>(i)], values[j]);
        }
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace cmbo
