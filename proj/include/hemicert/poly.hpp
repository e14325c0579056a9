// SPDX-License-Identifier: Apache-2.0
//
// Sparse polynomials in (s, t, u, v) over Q[sqrt2] and the majorization
// transforms used by the local analysis.

#pragma once

#include "hemicert/exact.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace hemicert {

enum class Var : int { s = 0, t = 1, u = 2, v = 3 };
inline constexpr int kNumVars = 4;
inline constexpr std::array<const char*, kNumVars> kVarNames = {"s", "t", "u", "v"};

struct Monomial {
    std::array<std::uint8_t, kNumVars> exponents{};

    int degree() const {
        return exponents[0] + exponents[1] + exponents[2] + exponents[3];
    }
    bool all_even() const {
        for (auto e : exponents)
            if (e % 2 != 0) return false;
        return true;
    }
    std::uint8_t operator[](Var x) const { return exponents[static_cast<int>(x)]; }

    friend Monomial operator*(const Monomial& a, const Monomial& b);
    friend bool operator==(const Monomial&, const Monomial&) = default;
};

/// Graded lexicographic: total degree first, then s > t > u > v.
struct GrlexLess {
    bool operator()(const Monomial& a, const Monomial& b) const {
        const int da = a.degree(), db = b.degree();
        if (da != db) return da < db;
        return a.exponents > b.exponents;
    }
};

using Point4 = std::array<Q2Number, kNumVars>;

/// Sparse multivariate polynomial; zero coefficients are never stored.
class MultiPoly {
public:
    using TermMap = std::map<Monomial, Q2Number, GrlexLess>;

    MultiPoly() = default;
    MultiPoly(Q2Number c);  // NOLINT(google-explicit-constructor)
    MultiPoly(long c) : MultiPoly(Q2Number(c)) {}  // NOLINT

    static MultiPoly variable(Var x);
    static MultiPoly monomial(const Monomial& m, Q2Number c);

    const TermMap& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    Q2Number coefficient(const Monomial& m) const;

    /// Distinct monomials.
    std::size_t monomial_count() const { return terms_.size(); }
    /// Expanded term count: the rational and sqrt2 parts of a coefficient
    /// count separately, so (-8-8*sqrt2)*s^2 is two terms.
    std::size_t term_count() const;
    /// Both are -1 on the zero polynomial.
    int min_degree() const;
    int max_degree() const;

    void add_term(const Monomial& m, const Q2Number& c);

    MultiPoly operator-() const;
    MultiPoly& operator+=(const MultiPoly& o);
    MultiPoly& operator-=(const MultiPoly& o);
    MultiPoly& operator*=(const MultiPoly& o);
    MultiPoly& operator*=(const Q2Number& c);
    friend MultiPoly operator+(MultiPoly a, const MultiPoly& b) { return a += b; }
    friend MultiPoly operator-(MultiPoly a, const MultiPoly& b) { return a -= b; }
    friend MultiPoly operator*(const MultiPoly& a, const MultiPoly& b);
    friend MultiPoly operator*(MultiPoly a, const Q2Number& c) { return a *= c; }
    friend MultiPoly operator*(const Q2Number& c, MultiPoly a) { return a *= c; }
    friend bool operator==(const MultiPoly& a, const MultiPoly& b) { return a.terms_ == b.terms_; }

    MultiPoly pow(unsigned n) const;

    /// Terms whose monomials satisfy the predicate.
    MultiPoly filter(const std::function<bool(const Monomial&)>& keep) const;

    Q2Number eval(const Point4& point) const;

    /// Canonical text: terms in grlex order joined by " + ", each written as
    /// "(coef)*s^2*t" with coef in "a+b*sqrt2" form; "0" for the zero polynomial.
    std::string to_string() const;
    static MultiPoly parse(std::string_view text);

private:
    TermMap terms_;
};

MultiPoly homog_component(const MultiPoly& p, int degree);

/// Coefficient extraction in one variable: the polynomial multiplying x^k.
MultiPoly coefficient_of(const MultiPoly& p, Var x, int k);

/// Substitutes x := value.
MultiPoly substitute(const MultiPoly& p, Var x, const Q2Number& value);

/// Partial derivative.
MultiPoly derivative(const MultiPoly& p, Var x);

/// Exact evaluation at points (n_s, n_t, n_u, n_v) / 2^bits with integer
/// arithmetic only; coefficients are brought to a common denominator once.
/// Agrees with MultiPoly::eval.
class DyadicEvaluator {
public:
    DyadicEvaluator(const MultiPoly& p, unsigned bits);
    Q2Number operator()(const std::array<std::int64_t, kNumVars>& numerators) const;

private:
    struct Term {
        Monomial m;
        Integer a;
        Integer b;
    };
    unsigned bits_;
    int degree_;
    Integer denominator_{1};
    std::vector<Term> terms_;
};

/// c1 s^2 + c2 t^2 + c3 u^2 + c4 v^2.
struct DiagQuadForm {
    std::array<Q2Number, kNumVars> coefficients{};

    const Q2Number& operator[](Var x) const { return coefficients[static_cast<int>(x)]; }
    Q2Number& operator[](Var x) { return coefficients[static_cast<int>(x)]; }

    DiagQuadForm& operator+=(const DiagQuadForm& o);
    friend DiagQuadForm operator+(DiagQuadForm a, const DiagQuadForm& b) { return a += b; }
    friend bool operator==(const DiagQuadForm&, const DiagQuadForm&) = default;

    bool is_zero() const;
    MultiPoly to_poly() const;
    Q2Number eval(const Point4& point) const;
    /// Componentwise a <= b.
    bool dominated_by(const DiagQuadForm& bound) const;

    /// "[c_s; c_t; c_u; c_v]".
    std::string to_string() const;
    static DiagQuadForm parse(std::string_view text);
};

/// Per-part absolutization: on all-even monomials negative rational or
/// sqrt2 parts are dropped, elsewhere each part is replaced by its absolute
/// value. The image evaluated at (|s|,|t|,|u|,|v|) dominates p.
MultiPoly transform_T(const MultiPoly& p);

/// Replaces every sqrt2 part by the rational upper bound `sqrt2_upper`.
/// Requires nonnegative parts; throws std::invalid_argument otherwise.
MultiPoly bound_sqrt2_above(const MultiPoly& p, const Rat& sqrt2_upper);

/// Literal diagonal form with weights (4 d_k^2 - d_k)^2 and constant
/// r0^(d-2)/12. p must be homogeneous of degree d >= 3 with nonnegative
/// coefficients; throws std::invalid_argument otherwise.
DiagQuadForm transform_Sd(const MultiPoly& p, const Rat& r0);

/// coefficient * r^(N-2)/N * (d1 s^2 + d2 t^2 + d3 u^2 + d4 v^2), which
/// dominates coefficient * s^d1 t^d2 u^d3 v^d4 on [0, r]^4 for N >= 2.
DiagQuadForm lemma3_majorize(const Monomial& m, const Q2Number& coefficient, const Rat& r);

/// Sum of lemma3_majorize over all terms; coefficients must be >= 0.
DiagQuadForm lemma3_majorize(const MultiPoly& p, const Rat& r);

}  // namespace hemicert
