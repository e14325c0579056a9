// SPDX-License-Identifier: Apache-2.0

#include "hemicert/exact.hpp"

#include <cmath>
#include <stdexcept>

namespace hemicert {

Rat make_rat(const Integer& num, const Integer& den) {
    if (sgn(den) == 0) throw std::domain_error("rational with zero denominator");
    Rat q(num, den);
    q.canonicalize();
    return q;
}

Rat make_rat(long num, long den) { return make_rat(Integer(num), Integer(den)); }

namespace {

bool all_digits(std::string_view s) {
    if (s.empty()) return false;
    for (char c : s)
        if (c < '0' || c > '9') return false;
    return true;
}

}  // namespace

Rat parse_rat(std::string_view text) {
    std::string_view body = text;
    bool negative = false;
    if (!body.empty() && (body.front() == '-' || body.front() == '+')) {
        negative = body.front() == '-';
        body.remove_prefix(1);
    }
    Rat out;
    if (auto slash = body.find('/'); slash != std::string_view::npos) {
        auto num = body.substr(0, slash);
        auto den = body.substr(slash + 1);
        if (!all_digits(num) || !all_digits(den))
            throw std::invalid_argument("malformed rational: " + std::string(text));
        out = make_rat(Integer(std::string(num)), Integer(std::string(den)));
    } else if (auto dot = body.find('.'); dot != std::string_view::npos) {
        auto whole = body.substr(0, dot);
        auto frac = body.substr(dot + 1);
        if ((!whole.empty() && !all_digits(whole)) || !all_digits(frac))
            throw std::invalid_argument("malformed decimal: " + std::string(text));
        Integer scale;
        mpz_ui_pow_ui(scale.get_mpz_t(), 10, frac.size());
        Integer w = whole.empty() ? Integer(0) : Integer(std::string(whole));
        out = make_rat(w * scale + Integer(std::string(frac)), scale);
    } else {
        if (!all_digits(body))
            throw std::invalid_argument("malformed rational: " + std::string(text));
        out = Rat(Integer(std::string(body)));
    }
    return negative ? Rat(-out) : out;
}

std::string to_string(const Rat& q) { return q.get_str(); }

int Q2Number::sign() const {
    const int sa = sgn(a_);
    const int sb = sgn(b_);
    if (sb == 0) return sa;
    if (sa == 0 || sa == sb) return sb;
    // Opposite signs: the larger of a^2 and 2 b^2 wins. Equality would make
    // sqrt2 rational, so it cannot happen.
    Rat lhs = a_ * a_;
    Rat rhs = 2 * b_ * b_;
    return cmp(lhs, rhs) > 0 ? sa : sb;
}

Q2Number Q2Number::inverse() const {
    if (is_zero()) throw std::domain_error("inverse of zero in Q[sqrt2]");
    Rat n = norm();
    return {Rat(a_ / n), Rat(-b_ / n)};
}

double Q2Number::to_double() const { return a_.get_d() + b_.get_d() * std::sqrt(2.0); }

std::string Q2Number::to_string() const {
    if (is_zero()) return "0";
    std::string out;
    if (sgn(a_) != 0) out = a_.get_str();
    if (sgn(b_) != 0) {
        if (!out.empty() && sgn(b_) > 0) out += '+';
        out += b_.get_str();
        out += "*sqrt2";
    }
    return out;
}

Q2Number Q2Number::parse(std::string_view text) {
    constexpr std::string_view kRoot = "*sqrt2";
    if (text.empty()) throw std::invalid_argument("empty Q[sqrt2] literal");
    if (text.size() < kRoot.size() || text.substr(text.size() - kRoot.size()) != kRoot)
        return {parse_rat(text), Rat(0)};
    std::string_view head = text.substr(0, text.size() - kRoot.size());
    // Split "a+b" / "a-b" at the last sign that is not leading.
    std::size_t split = std::string_view::npos;
    for (std::size_t i = head.size(); i-- > 1;) {
        if (head[i] == '+' || head[i] == '-') {
            split = i;
            break;
        }
    }
    if (split == std::string_view::npos) return {Rat(0), parse_rat(head)};
    return {parse_rat(head.substr(0, split)), parse_rat(head.substr(split))};
}

Q2Number& Q2Number::operator+=(const Q2Number& o) {
    a_ += o.a_;
    b_ += o.b_;
    return *this;
}

Q2Number& Q2Number::operator-=(const Q2Number& o) {
    a_ -= o.a_;
    b_ -= o.b_;
    return *this;
}

Q2Number& Q2Number::operator*=(const Q2Number& o) {
    Rat a = a_ * o.a_ + 2 * b_ * o.b_;
    Rat b = a_ * o.b_ + b_ * o.a_;
    a_ = std::move(a);
    b_ = std::move(b);
    return *this;
}

Q2Number& Q2Number::operator/=(const Q2Number& o) { return *this *= o.inverse(); }

int q2_sign(const Q2Number& x) { return x.sign(); }

int compare(const Q2Number& x, const Q2Number& y) { return (x - y).sign(); }

int q2_sign_int(std::int64_t a, std::int64_t b) {
    auto sg = [](std::int64_t z) { return (z > 0) - (z < 0); };
    const int sa = sg(a);
    const int sb = sg(b);
    if (sb == 0) return sa;
    if (sa == 0 || sa == sb) return sb;
    const __int128 lhs = static_cast<__int128>(a) * a;
    const __int128 rhs = 2 * static_cast<__int128>(b) * b;
    return lhs > rhs ? sa : sb;
}

Q2Number optimum_value() { return {Rat(4), Rat(4)}; }

RatInterval::RatInterval(Rat l, Rat h) : lo(std::move(l)), hi(std::move(h)) {
    if (hi < lo) throw std::invalid_argument("interval with lo > hi");
}

bool RatInterval::contains(const Q2Number& x) const {
    return compare(Q2Number(lo), x) <= 0 && compare(x, Q2Number(hi)) <= 0;
}

RatInterval operator+(const RatInterval& x, const RatInterval& y) {
    return {Rat(x.lo + y.lo), Rat(x.hi + y.hi)};
}

RatInterval operator-(const RatInterval& x, const RatInterval& y) {
    return {Rat(x.lo - y.hi), Rat(x.hi - y.lo)};
}

RatInterval operator*(const RatInterval& x, const RatInterval& y) {
    Rat p[4] = {x.lo * y.lo, x.lo * y.hi, x.hi * y.lo, x.hi * y.hi};
    Rat lo = p[0];
    Rat hi = p[0];
    for (const auto& v : p) {
        if (v < lo) lo = v;
        if (hi < v) hi = v;
    }
    return {lo, hi};
}

namespace {

// sqrt(q) for q a square of a rational, otherwise false.
bool exact_sqrt(const Rat& q, Rat& out) {
    if (!mpz_perfect_square_p(q.get_num_mpz_t()) || !mpz_perfect_square_p(q.get_den_mpz_t()))
        return false;
    Integer n, d;
    mpz_sqrt(n.get_mpz_t(), q.get_num_mpz_t());
    mpz_sqrt(d.get_mpz_t(), q.get_den_mpz_t());
    out = make_rat(n, d);
    return true;
}

Integer pow2(unsigned k) {
    Integer p;
    mpz_ui_pow_ui(p.get_mpz_t(), 2, k);
    return p;
}

}  // namespace

Rat sqrt_upper(const Rat& q, unsigned k) {
    if (sgn(q) < 0) throw std::domain_error("sqrt_upper of a negative rational");
    Rat exact;
    if (exact_sqrt(q, exact)) return exact;
    // m = ceil(sqrt(ceil(q * 4^k))): m^2 >= q*4^k iff m^2 >= ceil(q*4^k).
    Integer scaled = q.get_num() * pow2(2 * k);
    Integer x;
    mpz_cdiv_q(x.get_mpz_t(), scaled.get_mpz_t(), q.get_den_mpz_t());
    Integer m;
    mpz_sqrt(m.get_mpz_t(), x.get_mpz_t());
    if (m * m < x) m += 1;
    return make_rat(m, pow2(k));
}

Rat sqrt_lower(const Rat& q, unsigned k) {
    if (sgn(q) < 0) throw std::domain_error("sqrt_lower of a negative rational");
    Rat exact;
    if (exact_sqrt(q, exact)) return exact;
    Integer scaled = q.get_num() * pow2(2 * k);
    Integer x;
    mpz_fdiv_q(x.get_mpz_t(), scaled.get_mpz_t(), q.get_den_mpz_t());
    Integer m;
    mpz_sqrt(m.get_mpz_t(), x.get_mpz_t());
    return make_rat(m, pow2(k));
}

unsigned __int128 isqrt_floor(unsigned __int128 x) {
    if (x == 0) return 0;
    auto r = static_cast<unsigned __int128>(std::sqrt(static_cast<long double>(x)));
    while (r * r > x) --r;
    while ((r + 1) * (r + 1) <= x) ++r;
    return r;
}

unsigned __int128 isqrt_ceil(unsigned __int128 x) {
    unsigned __int128 r = isqrt_floor(x);
    return r * r == x ? r : r + 1;
}

}  // namespace hemicert
