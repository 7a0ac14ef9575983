#pragma once
/*
 * Deterministic random substreams.
 *
 * Every stochastic component of the simulator draws from its own substream,
 * keyed by the master seed plus a text label (e.g. "loss/A" or "intf1/events").
 * Adding a component therefore never perturbs the draws of an existing one,
 * and identical (seed, label) always reproduces the same sequence.  All
 * variates are derived from raw mt19937_64 words with explicit transforms so
 * results do not depend on the standard library's distribution algorithms.
 */

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>

namespace redlink {

/// splitmix64 finalizer; spreads seed material over all 64 bits.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// FNV-1a over the label bytes.
inline std::uint64_t hash_label(std::string_view label) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : label) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

class Substream {
public:
    Substream(std::uint64_t master_seed, std::string_view label)
        : eng_(mix64(master_seed ^ mix64(hash_label(label)))) {}

    /// Uniform on [0, 1) with 53-bit resolution.
    double uniform01() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return uniform01() < p; }

    /// Uniform integer on [lo, hi], inclusive, by masked rejection.
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
        if (lo > hi) throw std::invalid_argument("uniform_int: empty range");
        const std::uint64_t range = static_cast<std::uint64_t>(hi - lo) + 1;
        if (range == 0) return static_cast<std::int64_t>(eng_()); // full 64-bit span
        std::uint64_t mask = range - 1;
        mask |= mask >> 1;
        mask |= mask >> 2;
        mask |= mask >> 4;
        mask |= mask >> 8;
        mask |= mask >> 16;
        mask |= mask >> 32;
        std::uint64_t x;
        do {
            x = eng_() & mask;
        } while (x >= range);
        return lo + static_cast<std::int64_t>(x);
    }

    double exponential(double mean) { return -mean * std::log1p(-uniform01()); }

    /// Standard normal via Box-Muller; the paired variate is cached.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = 1.0 - uniform01(); // (0, 1], keeps log finite
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * M_PI * u2;
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

    double lognormal(double mu, double sigma) { return std::exp(mu + sigma * normal()); }

private:
    std::mt19937_64 eng_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

/// Substream label "<purpose>/<channel>" or "<purpose>".
inline std::string stream_label(std::string_view purpose, std::string_view channel = {}) {
    std::string s(purpose);
    if (!channel.empty()) {
        s += '/';
        s += channel;
    }
    return s;
}

} // namespace redlink
