#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string_view>

namespace btadapt {

/// SplitMix64 finalizer; used to decorrelate derived seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept
{
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// 64-bit FNV-1a over the bytes of a label.
constexpr std::uint64_t fnv1a(std::string_view text) noexcept
{
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    return h;
}

/// Seed for one trial of one policy. Stable across platforms and independent
/// of how many other policies or trials share the experiment.
constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t trial, std::string_view stream_label) noexcept
{
    std::uint64_t h = splitmix64(base);
    h = splitmix64(h ^ trial);
    h = splitmix64(h ^ fnv1a(stream_label));
    return h;
}

/// Random stream for a single trial.
///
/// Wraps std::mt19937_64, whose output sequence is fixed by the standard, and
/// converts to doubles by hand so draws are bit-identical on every toolchain
/// (std::uniform_real_distribution is not).
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// True with probability p. p >= 1 always succeeds, p <= 0 never does.
    bool bernoulli(double p) { return uniform01() < p; }

    /// Index drawn from a discrete distribution. Weights need not be normalized.
    std::size_t categorical(std::span<const double> weights)
    {
        double total = 0.0;
        for (double w : weights) total += w;
        const double u = uniform01() * total;
        double acc = 0.0;
        for (std::size_t i = 0; i < weights.size(); ++i) {
            acc += weights[i];
            if (u < acc) return i;
        }
        // Rounding can leave u == total; fall back to the last positive weight.
        for (std::size_t i = weights.size(); i-- > 0;) {
            if (weights[i] > 0.0) return i;
        }
        return 0;
    }

    std::uint64_t next_u64() { return engine_(); }

private:
    std::mt19937_64 engine_;
};

} // namespace btadapt
