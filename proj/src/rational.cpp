#include "whitneydim/rational.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <numeric>

#include "whitneydim/error.hpp"

namespace whitneydim {

namespace {

using i128 = __int128;

i128 gcd128(i128 a, i128 b) {
    if (a < 0) a = -a;
    if (b < 0) b = -b;
    while (b != 0) {
        i128 t = a % b;
        a = b;
        b = t;
    }
    return a;
}

bool fits64(i128 v) {
    return v >= std::numeric_limits<std::int64_t>::min() &&
           v <= std::numeric_limits<std::int64_t>::max();
}

i128 floor_div(i128 a, i128 b) {
    i128 q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

}  // namespace

Rational::Rational(std::int64_t n, std::int64_t d) {
    if (d == 0) throw Error(ErrorKind::format, "rational with zero denominator");
    *this = from_wide(n, d);
}

Rational Rational::from_wide(i128 n, i128 d) {
    if (d == 0) throw Error(ErrorKind::format, "rational with zero denominator");
    if (d < 0) {
        n = -n;
        d = -d;
    }
    i128 g = gcd128(n, d);
    if (g > 1) {
        n /= g;
        d /= g;
    }
    if (!fits64(n) || !fits64(d)) throw Error(ErrorKind::overflow, "rational out of 64-bit range");
    Rational r;
    r.num_ = static_cast<std::int64_t>(n);
    r.den_ = static_cast<std::int64_t>(d);
    return r;
}

Rational Rational::parse(std::string_view text) {
    auto parse_int = [&](std::string_view s) {
        std::int64_t v = 0;
        if (!s.empty() && s.front() == '+') s.remove_prefix(1);
        auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty())
            throw Error(ErrorKind::format, "bad rational '" + std::string(text) + "'");
        return v;
    };
    auto slash = text.find('/');
    if (slash == std::string_view::npos) return Rational(parse_int(text));
    return Rational(parse_int(text.substr(0, slash)), parse_int(text.substr(slash + 1)));
}

Rational Rational::from_double_dyadic(long double x, int bits) {
    if (bits < 0 || bits > 60) throw Error(ErrorKind::overflow, "dyadic precision out of range");
    long double scaled = std::ldexp(x, bits);
    long double rounded = std::round(scaled);
    if (!(std::fabs(rounded) < 9.2e18L)) throw Error(ErrorKind::overflow, "value too large for dyadic rounding");
    return from_wide(static_cast<i128>(static_cast<std::int64_t>(rounded)), static_cast<i128>(1) << bits);
}

double Rational::to_double() const noexcept {
    return static_cast<double>(to_long_double());
}

long double Rational::to_long_double() const noexcept {
    return static_cast<long double>(num_) / static_cast<long double>(den_);
}

std::string Rational::to_string() const {
    if (den_ == 1) return std::to_string(num_);
    return std::to_string(num_) + "/" + std::to_string(den_);
}

std::int64_t Rational::floor_scaled(int k) const {
    i128 n = static_cast<i128>(num_) << k;
    i128 q = floor_div(n, den_);
    if (!fits64(q)) throw Error(ErrorKind::overflow, "scaled floor overflow");
    return static_cast<std::int64_t>(q);
}

std::int64_t Rational::ceil_scaled(int k) const {
    i128 n = static_cast<i128>(num_) << k;
    i128 q = -floor_div(-n, den_);
    if (!fits64(q)) throw Error(ErrorKind::overflow, "scaled ceil overflow");
    return static_cast<std::int64_t>(q);
}

Rational Rational::operator-() const { return from_wide(-static_cast<i128>(num_), den_); }

Rational operator+(const Rational& a, const Rational& b) {
    if (a.den_ == b.den_) return Rational::from_wide(static_cast<i128>(a.num_) + b.num_, a.den_);
    i128 g = std::gcd(a.den_, b.den_);
    i128 bd = b.den_ / g;
    i128 ad = a.den_ / g;
    i128 n = static_cast<i128>(a.num_) * bd + static_cast<i128>(b.num_) * ad;
    i128 d = static_cast<i128>(a.den_) * bd;
    return Rational::from_wide(n, d);
}

Rational operator-(const Rational& a, const Rational& b) { return a + (-b); }

Rational operator*(const Rational& a, const Rational& b) {
    i128 g1 = gcd128(a.num_, b.den_);
    i128 g2 = gcd128(b.num_, a.den_);
    if (g1 == 0) g1 = 1;
    if (g2 == 0) g2 = 1;
    i128 n = (static_cast<i128>(a.num_) / g1) * (static_cast<i128>(b.num_) / g2);
    i128 d = (static_cast<i128>(a.den_) / g2) * (static_cast<i128>(b.den_) / g1);
    return Rational::from_wide(n, d);
}

Rational operator/(const Rational& a, const Rational& b) {
    if (b.num_ == 0) throw Error(ErrorKind::format, "division by zero rational");
    return a * Rational::from_wide(b.den_, b.num_);
}

std::strong_ordering operator<=>(const Rational& a, const Rational& b) noexcept {
    i128 lhs = static_cast<i128>(a.num_) * b.den_;
    i128 rhs = static_cast<i128>(b.num_) * a.den_;
    if (lhs < rhs) return std::strong_ordering::less;
    if (lhs > rhs) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
}

Rational abs(const Rational& r) { return r.sign() < 0 ? -r : r; }
Rational min(const Rational& a, const Rational& b) { return b < a ? b : a; }
Rational max(const Rational& a, const Rational& b) { return a < b ? b : a; }

Rational dyadic(std::int64_t index, int k) {
    if (k < 0 || k > 62) throw Error(ErrorKind::overflow, "dyadic level out of range");
    return Rational(index, std::int64_t{1} << k);
}

}  // namespace whitneydim
