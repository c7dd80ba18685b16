#include "vatsp/rational.hpp"

#include <charconv>
#include <limits>
#include <numeric>
#include <ostream>

namespace vatsp {

namespace {

__int128 gcd128(__int128 a, __int128 b) {
    if (a < 0) a = -a;
    if (b < 0) b = -b;
    while (b != 0) {
        __int128 t = a % b;
        a = b;
        b = t;
    }
    return a;
}

bool fits64(__int128 v) {
    return v >= std::numeric_limits<std::int64_t>::min() && v <= std::numeric_limits<std::int64_t>::max();
}

}  // namespace

Rational::Rational(std::int64_t n, std::int64_t d) {
    if (d == 0) throw std::domain_error("rational with zero denominator");
    *this = from128(n, d);
}

Rational Rational::from128(__int128 n, __int128 d) {
    if (d < 0) {
        n = -n;
        d = -d;
    }
    __int128 g = gcd128(n, d);
    if (g > 1) {
        n /= g;
        d /= g;
    }
    if (n == 0) d = 1;
    if (!fits64(n) || !fits64(d)) throw RationalOverflow("rational overflow");
    Rational r;
    r.num_ = static_cast<std::int64_t>(n);
    r.den_ = static_cast<std::int64_t>(d);
    return r;
}

std::int64_t Rational::floor() const {
    if (is_inf()) throw std::domain_error("floor of infinity");
    std::int64_t q = num_ / den_;
    if (num_ % den_ != 0 && num_ < 0) --q;
    return q;
}

std::int64_t Rational::ceil() const {
    if (is_inf()) throw std::domain_error("ceil of infinity");
    std::int64_t q = num_ / den_;
    if (num_ % den_ != 0 && num_ > 0) ++q;
    return q;
}

double Rational::to_double() const {
    if (is_inf()) return std::numeric_limits<double>::infinity();
    return static_cast<double>(num_) / static_cast<double>(den_);
}

std::string Rational::str() const {
    if (is_inf()) return "inf";
    return std::to_string(num_) + "/" + std::to_string(den_);
}

Rational Rational::parse(std::string_view s) {
    if (s == "inf") return infinity();
    auto slash = s.find('/');
    auto to_i64 = [](std::string_view t) {
        std::int64_t v = 0;
        auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
        if (ec != std::errc() || p != t.data() + t.size())
            throw std::invalid_argument("bad rational: " + std::string(t));
        return v;
    };
    if (slash == std::string_view::npos) return Rational(to_i64(s));
    return Rational(to_i64(s.substr(0, slash)), to_i64(s.substr(slash + 1)));
}

Rational Rational::operator-() const {
    if (is_inf()) throw std::domain_error("negated infinity");
    return from128(-static_cast<__int128>(num_), den_);
}

Rational& Rational::operator+=(const Rational& o) {
    if (is_inf() || o.is_inf()) {
        *this = infinity();
        return *this;
    }
    if (den_ == o.den_) {
        *this = from128(static_cast<__int128>(num_) + o.num_, den_);
        return *this;
    }
    *this = from128(static_cast<__int128>(num_) * o.den_ + static_cast<__int128>(o.num_) * den_,
                    static_cast<__int128>(den_) * o.den_);
    return *this;
}

Rational& Rational::operator-=(const Rational& o) {
    if (o.is_inf()) throw std::domain_error("subtracting infinity");
    return *this += -o;
}

Rational& Rational::operator*=(const Rational& o) {
    if (is_inf() || o.is_inf()) {
        if (is_zero() || o.is_zero()) throw std::domain_error("0 * infinity");
        *this = infinity();
        return *this;
    }
    *this = from128(static_cast<__int128>(num_) * o.num_, static_cast<__int128>(den_) * o.den_);
    return *this;
}

Rational& Rational::operator/=(const Rational& o) {
    if (o.is_inf() || is_inf()) throw std::domain_error("division involving infinity");
    if (o.num_ == 0) throw std::domain_error("division by zero");
    *this = from128(static_cast<__int128>(num_) * o.den_, static_cast<__int128>(den_) * o.num_);
    return *this;
}

std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
    if (a.is_inf() || b.is_inf()) {
        if (a.is_inf() && b.is_inf()) return std::strong_ordering::equal;
        return a.is_inf() ? std::strong_ordering::greater : std::strong_ordering::less;
    }
    __int128 l = static_cast<__int128>(a.num_) * b.den_;
    __int128 r = static_cast<__int128>(b.num_) * a.den_;
    if (l < r) return std::strong_ordering::less;
    if (l > r) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
}

std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

}  // namespace vatsp
