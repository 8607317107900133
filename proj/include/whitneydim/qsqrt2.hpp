#pragma once

#include <compare>
#include <string>

#include "whitneydim/rational.hpp"

namespace whitneydim {

/// Exact element a + b*sqrt(2) of Q(sqrt 2).
class QSqrt2 {
public:
    constexpr QSqrt2() = default;
    QSqrt2(Rational a) : a_(a) {}  // NOLINT(implicit)
    QSqrt2(Rational a, Rational b) : a_(a), b_(b) {}

    const Rational& rational_part() const noexcept { return a_; }
    const Rational& sqrt2_part() const noexcept { return b_; }
    bool is_rational() const noexcept { return b_.sign() == 0; }

    int sign() const;
    long double to_long_double() const noexcept;
    double to_double() const noexcept { return static_cast<double>(to_long_double()); }
    std::string to_string() const;

    QSqrt2 operator-() const { return {-a_, -b_}; }
    friend QSqrt2 operator+(const QSqrt2& x, const QSqrt2& y) { return {x.a_ + y.a_, x.b_ + y.b_}; }
    friend QSqrt2 operator-(const QSqrt2& x, const QSqrt2& y) { return {x.a_ - y.a_, x.b_ - y.b_}; }
    friend QSqrt2 operator*(const QSqrt2& x, const QSqrt2& y) {
        return {x.a_ * y.a_ + Rational(2) * x.b_ * y.b_, x.a_ * y.b_ + x.b_ * y.a_};
    }
    /// Division via the conjugate; throws on division by zero.
    friend QSqrt2 operator/(const QSqrt2& x, const QSqrt2& y);
    QSqrt2& operator+=(const QSqrt2& o) { return *this = *this + o; }
    QSqrt2& operator*=(const QSqrt2& o) { return *this = *this * o; }

    friend bool operator==(const QSqrt2& x, const QSqrt2& y) noexcept { return x.a_ == y.a_ && x.b_ == y.b_; }
    friend std::strong_ordering operator<=>(const QSqrt2& x, const QSqrt2& y) {
        int s = (x - y).sign();
        return s < 0 ? std::strong_ordering::less
                     : (s > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
    }

private:
    Rational a_{};
    Rational b_{};
};

QSqrt2 pow(const QSqrt2& base, int exponent);

}  // namespace whitneydim
