#ifndef PUAL_COMMON_HPP
#define PUAL_COMMON_HPP

#include "pual/error.hpp"

#include <Eigen/Dense>

#include <charconv>
#include <cstdint>
#include <numeric>
#include <string>
#include <string_view>

namespace pual {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;

/// Exact non-negative rational used for subset fractions so that subset sizes
/// do not depend on binary rounding of values like 0.7 or 7/17.
struct Fraction {
    std::int64_t num{0};
    std::int64_t den{1};

    [[nodiscard]] double value() const noexcept { return static_cast<double>(num) / static_cast<double>(den); }

    /// round-half-up of (num/den) * count, computed in integers.
    [[nodiscard]] std::int64_t round_times(std::int64_t count) const noexcept {
        return (2 * num * count + den) / (2 * den);
    }

    [[nodiscard]] Fraction complement() const noexcept { return Fraction{den - num, den}.reduced(); }

    [[nodiscard]] Fraction reduced() const noexcept {
        const std::int64_t g = std::gcd(num, den);
        return g == 0 ? *this : Fraction{num / g, den / g};
    }

    friend bool operator==(const Fraction &a, const Fraction &b) noexcept {
        return a.num * b.den == b.num * a.den;
    }

    /// Accepts "a/b" or a plain decimal such as "0.25" (converted exactly).
    static Fraction parse(std::string_view text) {
        const auto fail = [&] { return Error(ErrorKind::InvalidArgument, "not a fraction: '" + std::string(text) + "'"); };
        const auto parse_int = [&](std::string_view s) {
            std::int64_t v{};
            const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
            if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) {
                throw fail();
            }
            return v;
        };
        if (const auto slash = text.find('/'); slash != std::string_view::npos) {
            const Fraction f{parse_int(text.substr(0, slash)), parse_int(text.substr(slash + 1))};
            if (f.den <= 0 || f.num < 0) {
                throw fail();
            }
            return f.reduced();
        }
        const auto dot = text.find('.');
        if (dot == std::string_view::npos) {
            const std::int64_t v = parse_int(text);
            if (v < 0) {
                throw fail();
            }
            return Fraction{v, 1};
        }
        const std::string_view whole = text.substr(0, dot);
        const std::string_view frac = text.substr(dot + 1);
        if (frac.empty() || frac.size() > 12) {
            throw fail();
        }
        std::int64_t den = 1;
        for (std::size_t i = 0; i < frac.size(); ++i) {
            den *= 10;
        }
        const std::int64_t w = whole.empty() ? 0 : parse_int(whole);
        const std::int64_t f = parse_int(frac);
        if (w < 0 || f < 0) {
            throw fail();
        }
        return Fraction{w * den + f, den}.reduced();
    }

    [[nodiscard]] std::string str() const { return std::to_string(num) + "/" + std::to_string(den); }
};

}  // namespace pual

#endif  // PUAL_COMMON_HPP
