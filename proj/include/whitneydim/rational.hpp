#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace whitneydim {

/// Exact rational with 64-bit numerator and positive 64-bit denominator,
/// always stored in lowest terms. Arithmetic goes through 128-bit
/// intermediates and throws ErrorKind::overflow if the reduced result does
/// not fit.
class Rational {
public:
    constexpr Rational() = default;
    constexpr Rational(std::int64_t n) : num_(n), den_(1) {}  // NOLINT(implicit)
    Rational(std::int64_t n, std::int64_t d);

    static Rational parse(std::string_view text);
    /// Nearest multiple of 2^-bits to x (ties away from zero).
    static Rational from_double_dyadic(long double x, int bits);

    std::int64_t num() const noexcept { return num_; }
    std::int64_t den() const noexcept { return den_; }

    double to_double() const noexcept;
    long double to_long_double() const noexcept;
    std::string to_string() const;

    /// floor(this * 2^k) and ceil(this * 2^k), exact.
    std::int64_t floor_scaled(int k) const;
    std::int64_t ceil_scaled(int k) const;

    Rational operator-() const;
    friend Rational operator+(const Rational& a, const Rational& b);
    friend Rational operator-(const Rational& a, const Rational& b);
    friend Rational operator*(const Rational& a, const Rational& b);
    friend Rational operator/(const Rational& a, const Rational& b);
    Rational& operator+=(const Rational& o) { return *this = *this + o; }
    Rational& operator-=(const Rational& o) { return *this = *this - o; }
    Rational& operator*=(const Rational& o) { return *this = *this * o; }
    Rational& operator/=(const Rational& o) { return *this = *this / o; }

    friend bool operator==(const Rational& a, const Rational& b) noexcept {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }
    friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) noexcept;

    int sign() const noexcept { return (num_ > 0) - (num_ < 0); }

private:
    static Rational from_wide(__int128 n, __int128 d);

    std::int64_t num_ = 0;
    std::int64_t den_ = 1;
};

Rational abs(const Rational& r);
Rational min(const Rational& a, const Rational& b);
Rational max(const Rational& a, const Rational& b);

/// 2^-k as a rational (0 <= k <= 62).
Rational dyadic(std::int64_t index, int k);

}  // namespace whitneydim
