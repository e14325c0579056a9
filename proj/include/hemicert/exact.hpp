// SPDX-License-Identifier: Apache-2.0
//
// Exact arithmetic substrate: rationals, the field Q[sqrt2], rational
// intervals and certified rational bounds on square roots.

#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>
#include <string_view>

namespace hemicert {

using Integer = mpz_class;
using Rat = mpq_class;

/// Builds num/den in lowest terms. Throws std::domain_error on den == 0.
Rat make_rat(const Integer& num, const Integer& den);
Rat make_rat(long num, long den = 1);

/// Parses "p", "-p/q" or a terminating decimal such as "0.99200".
/// Throws std::invalid_argument on malformed input.
Rat parse_rat(std::string_view text);

std::string to_string(const Rat& q);

/// Element a + b*sqrt2 of Q[sqrt2]. The representation is unique, so
/// equality is componentwise.
class Q2Number {
public:
    Q2Number() = default;
    Q2Number(long a) : a_(a) {}  // NOLINT(google-explicit-constructor)
    Q2Number(Rat a) : a_(std::move(a)) {}  // NOLINT(google-explicit-constructor)
    Q2Number(Rat a, Rat b) : a_(std::move(a)), b_(std::move(b)) {}

    static Q2Number sqrt2() { return {Rat(0), Rat(1)}; }

    const Rat& rat_part() const { return a_; }
    const Rat& sqrt2_part() const { return b_; }

    bool is_zero() const { return sgn(a_) == 0 && sgn(b_) == 0; }
    bool is_rational() const { return sgn(b_) == 0; }

    /// Exact sign, decided by comparing a^2 against 2 b^2.
    int sign() const;

    Q2Number conjugate() const { return {a_, -b_}; }
    /// a^2 - 2 b^2; nonzero for every nonzero element.
    Rat norm() const { return a_ * a_ - 2 * b_ * b_; }
    Q2Number inverse() const;
    Q2Number abs() const { return sign() < 0 ? -*this : *this; }

    double to_double() const;

    /// Minimal "a+b*sqrt2" form: "3+2*sqrt2", "-1/7*sqrt2", "5", "0".
    std::string to_string() const;
    static Q2Number parse(std::string_view text);

    Q2Number operator-() const { return {-a_, -b_}; }
    Q2Number& operator+=(const Q2Number& o);
    Q2Number& operator-=(const Q2Number& o);
    Q2Number& operator*=(const Q2Number& o);
    Q2Number& operator/=(const Q2Number& o);

    friend Q2Number operator+(Q2Number x, const Q2Number& y) { return x += y; }
    friend Q2Number operator-(Q2Number x, const Q2Number& y) { return x -= y; }
    friend Q2Number operator*(Q2Number x, const Q2Number& y) { return x *= y; }
    friend Q2Number operator/(Q2Number x, const Q2Number& y) { return x /= y; }
    friend bool operator==(const Q2Number& x, const Q2Number& y) {
        return x.a_ == y.a_ && x.b_ == y.b_;
    }
    friend bool operator!=(const Q2Number& x, const Q2Number& y) { return !(x == y); }

private:
    Rat a_{0};
    Rat b_{0};
};

int q2_sign(const Q2Number& x);
/// Sign of x - y.
int compare(const Q2Number& x, const Q2Number& y);
inline bool operator<(const Q2Number& x, const Q2Number& y) { return compare(x, y) < 0; }
inline bool operator<=(const Q2Number& x, const Q2Number& y) { return compare(x, y) <= 0; }
inline bool operator>(const Q2Number& x, const Q2Number& y) { return compare(x, y) > 0; }
inline bool operator>=(const Q2Number& x, const Q2Number& y) { return compare(x, y) >= 0; }

/// Sign of a + b*sqrt2 for machine integers. |a|, |b| < 2^62.
int q2_sign_int(std::int64_t a, std::int64_t b);

/// The optimum of the distance-sum problem, 4 + 4*sqrt2.
Q2Number optimum_value();

/// Closed rational interval [lo, hi].
struct RatInterval {
    Rat lo;
    Rat hi;

    RatInterval() = default;
    RatInterval(Rat point) : lo(point), hi(std::move(point)) {}  // NOLINT
    RatInterval(Rat l, Rat h);

    Rat width() const { return hi - lo; }
    bool contains(const Rat& x) const { return lo <= x && x <= hi; }
    bool contains(const RatInterval& o) const { return lo <= o.lo && o.hi <= hi; }
    /// Exact membership test for a + b*sqrt2.
    bool contains(const Q2Number& x) const;

    friend RatInterval operator+(const RatInterval& x, const RatInterval& y);
    friend RatInterval operator-(const RatInterval& x, const RatInterval& y);
    friend RatInterval operator*(const RatInterval& x, const RatInterval& y);
    friend bool operator==(const RatInterval& x, const RatInterval& y) {
        return x.lo == y.lo && x.hi == y.hi;
    }
};

/// Smallest m/2^k >= sqrt(q). Exact when q is a square of a rational.
/// Throws std::domain_error for q < 0.
Rat sqrt_upper(const Rat& q, unsigned k);
/// Largest m/2^k <= sqrt(q). Exact when q is a square of a rational.
Rat sqrt_lower(const Rat& q, unsigned k);

inline constexpr unsigned kDefaultSqrtPrecision = 30;

/// floor(sqrt(x)) and ceil(sqrt(x)) for 128-bit unsigned integers.
unsigned __int128 isqrt_floor(unsigned __int128 x);
unsigned __int128 isqrt_ceil(unsigned __int128 x);

}  // namespace hemicert
