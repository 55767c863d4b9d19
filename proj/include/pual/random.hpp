#ifndef PUAL_RANDOM_HPP
#define PUAL_RANDOM_HPP

#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <utility>

namespace pual {

/// SplitMix64: a Weyl counter passed through a fixed 64-bit mixer. Output k of
/// a stream is mix(seed + (k+1)*golden), so streams are reproducible on every
/// platform and a child stream can be derived from (seed, tag) without state.
class SplitMix64 {
  public:
    using result_type = std::uint64_t;

    explicit SplitMix64(std::uint64_t seed) noexcept : counter_(seed) {}

    static constexpr std::uint64_t golden = 0x9E3779B97F4A7C15ULL;

    static constexpr std::uint64_t mix(std::uint64_t z) noexcept {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Deterministic child seed for a named sub-task.
    static constexpr std::uint64_t derive(std::uint64_t seed, std::uint64_t tag) noexcept {
        return mix(mix(seed + golden) ^ (tag * 0xD1B54A32D192ED03ULL + 1));
    }

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return ~std::uint64_t{0}; }

    result_type operator()() noexcept {
        counter_ += golden;
        return mix(counter_);
    }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, bound) by Lemire's multiply-shift with rejection.
    std::uint64_t below(std::uint64_t bound) noexcept {
        unsigned __int128 product = static_cast<unsigned __int128>((*this)()) * bound;
        auto low = static_cast<std::uint64_t>(product);
        if (low < bound) {
            const std::uint64_t threshold = (0 - bound) % bound;
            while (low < threshold) {
                product = static_cast<unsigned __int128>((*this)()) * bound;
                low = static_cast<std::uint64_t>(product);
            }
        }
        return static_cast<std::uint64_t>(product >> 64);
    }

    /// Standard normal pair by the Box-Muller transform.
    std::pair<double, double> normal_pair() noexcept {
        const double u1 = 1.0 - uniform();  // (0, 1]
        const double u2 = uniform();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * std::numbers::pi * u2;
        return {radius * std::cos(angle), radius * std::sin(angle)};
    }

  private:
    std::uint64_t counter_;
};

/// In-place Fisher-Yates shuffle driven by SplitMix64::below.
template <typename T>
void fisher_yates(std::span<T> items, SplitMix64 &rng) noexcept {
    for (std::size_t i = items.size(); i > 1; --i) {
        const auto j = static_cast<std::size_t>(rng.below(i));
        std::swap(items[i - 1], items[j]);
    }
}

}  // namespace pual

#endif  // PUAL_RANDOM_HPP
