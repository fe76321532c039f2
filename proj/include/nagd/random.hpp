#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string_view>

namespace nagd {

/// Seeded 64-bit Mersenne Twister (std::mt19937_64, whose output sequence the
/// C++ standard fixes) with distribution code kept in-house so that draws are
/// identical on every platform. Doubles use the top 53 bits: (x >> 11) * 2^-53.
class Rng {
public:
    static constexpr std::string_view kAlgorithm =
        "mt19937_64; streams seeded via std::seed_seq{seed_lo, seed_hi, stream_lo, stream_hi}; "
        "uniform double = (next() >> 11) * 2^-53";

    explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

    std::uint64_t next() { return engine_(); }

    /// Uniform on [0, 1).
    double uniform();
    /// Uniform on [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    /// Uniform integer on [0, n), unbiased. n must be positive.
    std::uint64_t below(std::uint64_t n);

    template <typename T>
    void shuffle(std::span<T> items) {
        for (std::size_t i = items.size(); i > 1; --i) {
            const auto j = static_cast<std::size_t>(below(i));
            std::swap(items[i - 1], items[j]);
        }
    }

private:
    std::mt19937_64 engine_;
};

} // namespace nagd
