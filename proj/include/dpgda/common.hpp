#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace dpgda {

/// Base error type for the library. All recoverable failures throw this
/// (or a subclass) with a human-readable message.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Raised when the GA cannot find a valid in-bounds sample for a query
/// after the configured number of restarts.
class InfeasibleAugmentation : public Error {
public:
    InfeasibleAugmentation(const std::string& msg, std::size_t query_index)
        : Error(msg), query_index(query_index) {}
    std::size_t query_index;
};

// splitmix64 finalizer; used to derive independent child seeds from a
// master seed plus integer tags so parallel and serial runs agree.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t seed) { return mix64(seed); }

template <typename... Tags>
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag, Tags... rest) {
    return derive_seed(mix64(seed ^ mix64(tag)), rest...);
}

/// Deterministic RNG wrapper. All randomness in the library goes through
/// this class; distributions are implemented by hand so results do not
/// depend on the standard library's <random> distribution internals.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform double in [0, 1).
    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + uniform() * (hi - lo); }

    /// Uniform integer in [0, n).
    std::size_t uniform_index(std::size_t n) {
        // modulo is fine here: n is tiny relative to 2^64
        return static_cast<std::size_t>(engine_() % n);
    }

    /// Standard normal via Box-Muller (one value per call, cached pair).
    double normal() {
        if (have_cached_) {
            have_cached_ = false;
            return cached_;
        }
        double u1 = uniform();
        double u2 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double theta = 6.283185307179586476925286766559 * u2;
        cached_ = r * std::sin(theta);
        have_cached_ = true;
        return r * std::cos(theta);
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::swap(v[i - 1], v[uniform_index(i)]);
        }
    }

private:
    std::mt19937_64 engine_;
    bool have_cached_ = false;
    double cached_ = 0.0;
};

}  // namespace dpgda
