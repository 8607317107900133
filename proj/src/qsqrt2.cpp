#include "whitneydim/qsqrt2.hpp"

#include <cmath>

#include "whitneydim/error.hpp"

namespace whitneydim {

int QSqrt2::sign() const {
    const int sa = a_.sign();
    const int sb = b_.sign();
    if (sa >= 0 && sb >= 0) return (sa > 0 || sb > 0) ? 1 : 0;
    if (sa <= 0 && sb <= 0) return -1;
    // Opposite signs: compare a^2 with 2 b^2.
    Rational lhs = a_ * a_;
    Rational rhs = Rational(2) * b_ * b_;
    return lhs > rhs ? sa : sb;
}

long double QSqrt2::to_long_double() const noexcept {
    return a_.to_long_double() + b_.to_long_double() * std::sqrt(2.0L);
}

std::string QSqrt2::to_string() const {
    if (is_rational()) return a_.to_string();
    return a_.to_string() + "+" + b_.to_string() + "*sqrt2";
}

QSqrt2 operator/(const QSqrt2& x, const QSqrt2& y) {
    // 1 / (a + b sqrt2) = (a - b sqrt2) / (a^2 - 2 b^2)
    Rational norm = y.a_ * y.a_ - Rational(2) * y.b_ * y.b_;
    if (norm.sign() == 0) throw Error(ErrorKind::invalid_params, "division by zero in Q(sqrt2)");
    QSqrt2 conj(y.a_ / norm, -y.b_ / norm);
    return x * conj;
}

QSqrt2 pow(const QSqrt2& base, int exponent) {
    if (exponent < 0) return QSqrt2(Rational(1)) / pow(base, -exponent);
    QSqrt2 result(Rational(1));
    QSqrt2 b = base;
    while (exponent > 0) {
        if (exponent & 1) result = result * b;
        b = b * b;
        exponent >>= 1;
    }
    return result;
}

}  // namespace whitneydim
