#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>

namespace vatsp {

struct RationalOverflow : std::overflow_error {
    using std::overflow_error::overflow_error;
};

// Exact fraction with 64-bit numerator/denominator, always reduced, den > 0.
// den == 0 encodes +infinity (num == 1); it only appears as a distance sentinel.
class Rational {
public:
    constexpr Rational() = default;
    constexpr Rational(std::int64_t n) : num_(n), den_(1) {}
    Rational(std::int64_t n, std::int64_t d);

    static constexpr Rational infinity() {
        Rational r;
        r.num_ = 1;
        r.den_ = 0;
        return r;
    }

    std::int64_t num() const { return num_; }
    std::int64_t den() const { return den_; }
    bool is_inf() const { return den_ == 0; }
    bool is_zero() const { return den_ != 0 && num_ == 0; }
    bool is_integer() const { return den_ == 1; }

    std::int64_t floor() const;
    std::int64_t ceil() const;
    double to_double() const;
    std::string str() const;  // "a/b", "inf" for the sentinel

    // Parses "a/b", "a", or "inf".
    static Rational parse(std::string_view s);

    Rational operator-() const;
    Rational& operator+=(const Rational& o);
    Rational& operator-=(const Rational& o);
    Rational& operator*=(const Rational& o);
    Rational& operator/=(const Rational& o);

    friend Rational operator+(Rational a, const Rational& b) { return a += b; }
    friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
    friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
    friend Rational operator/(Rational a, const Rational& b) { return a /= b; }

    friend bool operator==(const Rational& a, const Rational& b) {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }
    friend std::strong_ordering operator<=>(const Rational& a, const Rational& b);

    std::size_t hash() const {
        return std::hash<std::int64_t>()(num_) * 1000003u ^ std::hash<std::int64_t>()(den_);
    }

private:
    static Rational from128(__int128 n, __int128 d);
    std::int64_t num_ = 0;
    std::int64_t den_ = 1;
};

std::ostream& operator<<(std::ostream& os, const Rational& r);

inline Rational min(const Rational& a, const Rational& b) { return b < a ? b : a; }
inline Rational max(const Rational& a, const Rational& b) { return a < b ? b : a; }

}  // namespace vatsp

template <>
struct std::hash<vatsp::Rational> {
    std::size_t operator()(const vatsp::Rational& r) const { return r.hash(); }
};
