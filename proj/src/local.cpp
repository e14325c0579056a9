// SPDX-License-Identifier: Apache-2.0

#include "hemicert/local.hpp"

#include "hemicert/reference.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

namespace hemicert {

namespace {

MultiPoly var(Var x) { return MultiPoly::variable(x); }

MultiPoly one_plus_square(Var x) { return var(x) * var(x) + MultiPoly(1); }

Q2Number r2() { return Q2Number::sqrt2(); }

MultiPoly denominator_of(const std::array<int, kNumVars>& e) {
    MultiPoly out(1);
    for (int i = 0; i < kNumVars; ++i) out *= one_plus_square(static_cast<Var>(i)).pow(e[i]);
    return out;
}

// Point on the circle or disk as (x numerator, y numerator) over a product of
// (w^2+1) factors.
struct ParamPoint {
    MultiPoly x;
    MultiPoly y;
    std::array<int, kNumVars> denom{};
};

std::array<ParamPoint, 4> param_points() {
    const MultiPoly s = var(Var::s), t = var(Var::t), u = var(Var::u), v = var(Var::v);
    ParamPoint a{MultiPoly(0), MultiPoly(-1), {0, 0, 0, 0}};
    ParamPoint b{MultiPoly(1) - s * s, MultiPoly(2) * s, {1, 0, 0, 0}};
    ParamPoint c{t * t - MultiPoly(1), MultiPoly(2) * t, {0, 1, 0, 0}};
    // x and y of D carry different factors; put both over (u^2+1)(v^2+1).
    // The x sign follows the displayed expansions: D = (-2u/(1+u^2), ...).
    ParamPoint d{MultiPoly(-2) * u * one_plus_square(Var::v), (MultiPoly(1) - v * v) * one_plus_square(Var::u),
                 {0, 0, 1, 1}};
    return {a, b, c, d};
}

constexpr std::array<std::pair<int, int>, 6> kPairs = {{{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}};

// Value of each distance at the square configuration: sqrt2 for AB, AC, BD,
// CD and 2 for AD, BC.
Q2Number pair_scale(int i) { return (i == 2 || i == 3) ? Q2Number(2) : r2(); }

}  // namespace

MultiPoly RationalFn::denominator() const { return denominator_of(denom_exponents); }

Q2Number RationalFn::eval(const Point4& point) const {
    Q2Number den(1);
    for (int i = 0; i < kNumVars; ++i)
        for (int k = 0; k < denom_exponents[i]; ++k) den *= point[i] * point[i] + Q2Number(1);
    return numerator.eval(point) * scalar / den;
}

std::array<RationalFn, 6> distance_radicands() {
    const auto pts = param_points();
    std::array<RationalFn, 6> out;
    for (int i = 0; i < 6; ++i) {
        const auto& p = pts[kPairs[i].first];
        const auto& q = pts[kPairs[i].second];
        std::array<int, kNumVars> e{};
        for (int k = 0; k < kNumVars; ++k) e[k] = p.denom[k] + q.denom[k];
        MultiPoly den = denominator_of(e);
        out[i].numerator = MultiPoly(2) * den - MultiPoly(2) * (p.x * q.x + p.y * q.y);
        out[i].denom_exponents = e;
    }
    return out;
}

std::array<RationalFn, 6> distance_majorants() {
    const auto radicands = distance_radicands();
    std::array<RationalFn, 6> out;
    for (int i = 0; i < 6; ++i) {
        // radicand = c^2 (1 - x), so x = (c^2 D - radicand numerator) / (c^2 D).
        const Q2Number c = pair_scale(i);
        const Q2Number c2 = c * c;
        const MultiPoly den = radicands[i].denominator();
        const MultiPoly n = (c2 * den - radicands[i].numerator) * c2.inverse();
        const MultiPoly d2 = den * den;
        // c (1 - x/2 - x^2/8 - x^3/16) = c (16D^3 - 8N D^2 - 2N^2 D - N^3) / (16 D^3)
        out[i].numerator = c * (MultiPoly(16) * d2 * den - MultiPoly(8) * n * d2 -
                                MultiPoly(2) * n * n * den - n * n * n);
        for (int k = 0; k < kNumVars; ++k) out[i].denom_exponents[k] = 3 * radicands[i].denom_exponents[k];
        out[i].scalar = Q2Number(make_rat(1, 16));
    }
    return out;
}

Config local_params_to_config(const ParamVector& p) { return config_from_params({p.s, p.t, -p.u, p.v}); }

MultiPoly j_denominator() { return MultiPoly(8) * denominator_of({3, 3, 3, 3}); }

MultiPoly build_J() {
    MultiPoly j;
    for (const auto& m : distance_majorants()) {
        std::array<int, kNumVars> rest{};
        for (int k = 0; k < kNumVars; ++k) {
            if (m.denom_exponents[k] > 3) throw std::logic_error("majorant denominator exceeds the common one");
            rest[k] = 3 - m.denom_exponents[k];
        }
        j += m.numerator * denominator_of(rest) * (Q2Number(8) * m.scalar);
    }
    j -= j_denominator() * optimum_value();
    if (j.max_degree() > reference::kJMaxDegree) throw std::logic_error("J exceeds degree 24");
    if (!j.coefficient(Monomial{}).is_zero()) throw std::logic_error("J has a constant term");
    return j;
}

MultiPoly taylor_gap_polynomial() {
    const MultiPoly x = var(Var::s);
    const MultiPoly bound = MultiPoly(1) - x * Q2Number(make_rat(1, 2)) - x * x * Q2Number(make_rat(1, 8)) -
                            x * x * x * Q2Number(make_rat(1, 16));
    return bound * bound - (MultiPoly(1) - x);
}

std::string_view to_string(Majorizer m) {
    switch (m) {
        case Majorizer::paper: return "paper";
        case Majorizer::lemma3: return "lemma3";
        case Majorizer::literal_sd: return "literal-sd";
    }
    return "?";
}

Majorizer parse_majorizer(std::string_view text) {
    if (text == "paper") return Majorizer::paper;
    if (text == "lemma3") return Majorizer::lemma3;
    if (text == "literal-sd") return Majorizer::literal_sd;
    throw std::invalid_argument("unknown majorizer: " + std::string(text));
}

// ---------------------------------------------------------------------------

SymMatrix3::SymMatrix3(const std::array<Q2Number, 6>& upper) {
    m_[0][0] = upper[0];
    m_[0][1] = m_[1][0] = upper[1];
    m_[0][2] = m_[2][0] = upper[2];
    m_[1][1] = upper[3];
    m_[1][2] = m_[2][1] = upper[4];
    m_[2][2] = upper[5];
}

SymMatrix3 SymMatrix3::from_quadratic_form(const MultiPoly& q) {
    std::array<Q2Number, 6> up;
    int idx = 0;
    for (int i = 0; i < 3; ++i)
        for (int j = i; j < 3; ++j) {
            Monomial m;
            m.exponents[i] += 1;
            m.exponents[j] += 1;
            const Q2Number c = q.coefficient(m);
            up[idx++] = i == j ? c * Q2Number(2) : c;
        }
    SymMatrix3 out(up);
    // Reconstruct and compare so stray terms cannot be silently dropped.
    MultiPoly back;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            back += out(i, j) * Q2Number(make_rat(1, 2)) * var(static_cast<Var>(i)) * var(static_cast<Var>(j));
    if (!(back == q)) throw std::invalid_argument("not a quadratic form in s, t, u");
    return out;
}

Q2Number SymMatrix3::determinant() const {
    const auto& a = m_;
    return a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0]) +
           a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
}

std::array<Q2Number, 6> SymMatrix3::upper() const {
    return {m_[0][0], m_[0][1], m_[0][2], m_[1][1], m_[1][2], m_[2][2]};
}

std::string SymMatrix3::to_string() const {
    std::string out = "[";
    const auto up = upper();
    for (int i = 0; i < 6; ++i) {
        if (i) out += "; ";
        out += up[i].to_string();
    }
    return out + "]";
}

SymMatrix3 SymMatrix3::parse(std::string_view text) {
    if (text.size() < 2 || text.front() != '[' || text.back() != ']')
        throw std::invalid_argument("matrix must be bracketed");
    text = text.substr(1, text.size() - 2);
    std::array<Q2Number, 6> up;
    for (int i = 0; i < 6; ++i) {
        auto sep = text.find("; ");
        if ((sep == std::string_view::npos) != (i == 5)) throw std::invalid_argument("matrix needs six entries");
        up[i] = Q2Number::parse(text.substr(0, sep));
        if (sep != std::string_view::npos) text.remove_prefix(sep + 2);
    }
    return SymMatrix3(up);
}

bool is_negative_semidefinite(const SymMatrix3& m) {
    // Principal minors of -M: order 1 and 3 flip sign, order 2 does not.
    for (int i = 0; i < 3; ++i)
        if (m(i, i).sign() > 0) return false;
    for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j)
            if ((m(i, i) * m(j, j) - m(i, j) * m(j, i)).sign() < 0) return false;
    return m.determinant().sign() <= 0;
}

// ---------------------------------------------------------------------------

namespace {

// Solves the gradient system of a quadratic in the free variables.
std::optional<std::vector<Q2Number>> critical_point(const MultiPoly& q, const std::vector<Var>& free) {
    const std::size_t n = free.size();
    std::vector<std::vector<Q2Number>> a(n, std::vector<Q2Number>(n + 1));
    for (std::size_t i = 0; i < n; ++i) {
        const MultiPoly g = derivative(q, free[i]);
        if (g.max_degree() > 1) throw std::invalid_argument("quadratic_box_maximum needs degree <= 2");
        for (std::size_t j = 0; j < n; ++j) {
            Monomial m;
            m.exponents[static_cast<int>(free[j])] = 1;
            a[i][j] = g.coefficient(m);
        }
        a[i][n] = -g.coefficient(Monomial{});
    }
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        while (piv < n && a[piv][col].is_zero()) ++piv;
        if (piv == n) return std::nullopt;
        std::swap(a[piv], a[col]);
        const Q2Number inv = a[col][col].inverse();
        for (auto& x : a[col]) x *= inv;
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col || a[r][col].is_zero()) continue;
            const Q2Number f = a[r][col];
            for (std::size_t k = col; k <= n; ++k) a[r][k] -= f * a[col][k];
        }
    }
    std::vector<Q2Number> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = a[i][n];
    return x;
}

Point4 embed(const std::vector<Var>& free, const std::vector<Q2Number>& x) {
    Point4 p{};
    for (std::size_t i = 0; i < free.size(); ++i) p[static_cast<int>(free[i])] = x[i];
    return p;
}

bool inside(const std::vector<Q2Number>& x, const Rat& w) {
    for (const auto& c : x)
        if (c.abs() > Q2Number(w)) return false;
    return true;
}

}  // namespace

Q2Number quadratic_box_maximum(const MultiPoly& q, const std::vector<Var>& free, const Rat& w) {
    if (free.empty()) {
        if (q.max_degree() > 0) throw std::invalid_argument("polynomial depends on fixed variables");
        return q.coefficient(Monomial{});
    }
    std::optional<Q2Number> best;
    for (std::size_t i = 0; i < free.size(); ++i) {
        std::vector<Var> rest = free;
        rest.erase(rest.begin() + static_cast<long>(i));
        for (int sign : {-1, 1}) {
            Q2Number face = quadratic_box_maximum(substitute(q, free[i], Q2Number(Rat(sign * w))), rest, w);
            if (!best || *best < face) best = face;
        }
    }
    if (auto x = critical_point(q, free); x && inside(*x, w)) {
        Q2Number value = q.eval(embed(free, *x));
        if (*best < value) best = value;
    }
    return *best;
}

bool K2Report::valid() const {
    if (value_at_origin.sign() >= 0) return false;
    for (const auto& f : face_maxima)
        if (f.value.sign() >= 0) return false;
    return cube_maximum.sign() < 0;
}

K2Report analyze_K2(const MultiPoly& k2, const Rat& cube_half_width) {
    const std::vector<Var> free = {Var::s, Var::t, Var::u};
    for (const auto& [m, c] : k2.terms())
        if (m[Var::v] != 0 || m.degree() > 2) throw std::invalid_argument("K2 must be quadratic in s, t, u");
    K2Report report;
    report.value_at_origin = k2.coefficient(Monomial{});
    if (auto x = critical_point(k2, free)) {
        report.critical_point = std::array<Q2Number, 3>{(*x)[0], (*x)[1], (*x)[2]};
        report.critical_point_inside_cube = inside(*x, cube_half_width);
    }
    std::optional<Q2Number> best;
    for (std::size_t i = 0; i < free.size(); ++i) {
        std::vector<Var> rest = free;
        rest.erase(rest.begin() + static_cast<long>(i));
        for (int sign : {-1, 1}) {
            Q2Number value =
                quadratic_box_maximum(substitute(k2, free[i], Q2Number(Rat(sign * cube_half_width))), rest, cube_half_width);
            report.face_maxima.push_back({std::string(kVarNames[static_cast<int>(free[i])]) + (sign < 0 ? "=-r0" : "=+r0"), value});
            if (!best || *best < value) best = value;
        }
    }
    if (report.critical_point && report.critical_point_inside_cube) {
        const auto& c = *report.critical_point;
        Q2Number value = k2.eval({c[0], c[1], c[2], Q2Number()});
        if (*best < value) best = value;
    }
    report.cube_maximum = *best;
    return report;
}

// ---------------------------------------------------------------------------

LowDegreeSplit split_low_degree(const MultiPoly& h2, const MultiPoly& h3, const MultiPoly& h4) {
    LowDegreeSplit out;
    for (const auto* h : {&h2, &h3, &h4})
        for (const auto& [m, c] : h->terms()) {
            const int e = m[Var::v];
            if (e != 0 && e != 2 && e != 4) throw std::logic_error("low-degree part has v^" + std::to_string(e));
        }
    out.k20 = coefficient_of(h2, Var::v, 0);
    out.k30 = coefficient_of(h3, Var::v, 0);
    out.k40 = coefficient_of(h4, Var::v, 0);
    out.k22 = coefficient_of(h2, Var::v, 2);
    out.k32 = coefficient_of(h3, Var::v, 2);
    out.k42 = coefficient_of(h4, Var::v, 2);
    const MultiPoly v4 = coefficient_of(h2 + h3 + h4, Var::v, 4);
    if (v4.max_degree() > 0) throw std::logic_error("v^4 coefficient is not constant");
    out.v4_coefficient = v4.coefficient(Monomial{});
    return out;
}

MultiPoly reduce_to_K2(const LowDegreeSplit& split, const Q2Number& v2_bound) {
    return split.k22 + split.k32 + split.k42 + MultiPoly(v2_bound);
}

CubicQuarticBounds bound_k30_k40(const LowDegreeSplit& split, const Rat& r0) {
    CubicQuarticBounds out;
    Monomial su2, tu2;
    su2.exponents = {1, 0, 2, 0};
    tu2.exponents = {0, 1, 2, 0};
    const Q2Number c = split.k30.coefficient(su2);
    if (c != split.k30.coefficient(tu2) || c.sign() > 0)
        throw std::logic_error("k30 has no -c(s+t)u^2 part with c >= 0");
    out.k30_orientation_part = MultiPoly::monomial(su2, c) + MultiPoly::monomial(tu2, c);
    out.k30_bound = lemma3_majorize(transform_T(split.k30 - out.k30_orientation_part), r0);
    out.k40_bound = lemma3_majorize(transform_T(split.k40), r0);
    return out;
}

std::string LocalCertificate::failing_stage() const {
    for (const auto& s : stages)
        if (!s.ok) return s.name;
    return {};
}

MultiPoly expected_H2() {
    const MultiPoly s = var(Var::s), t = var(Var::t), u = var(Var::u), v = var(Var::v);
    const Q2Number a = Q2Number(-8) * (r2() + Q2Number(1));
    return a * (s * s) - MultiPoly(16) * s * t + a * (t * t) + Q2Number(8) * r2() * (s * u) -
           Q2Number(8) * r2() * (t * u) - Q2Number(8) * r2() * (u * u) - MultiPoly(8) * v * v;
}

MultiPoly expected_H3() {
    const MultiPoly s = var(Var::s), t = var(Var::t), u = var(Var::u), v = var(Var::v);
    return Q2Number(-4) * r2() * ((s * u - t * u + MultiPoly(3) * u * u - MultiPoly(4) * v * v) * (s + t));
}

namespace {

// Sum of c * s^a t^b u^c v^d from a compact table; sqrt2 flags the sqrt2 part.
struct TermSpec {
    long coef;
    bool sqrt2;
    std::array<std::uint8_t, 4> e;
};

MultiPoly from_specs(std::initializer_list<TermSpec> specs) {
    MultiPoly p;
    for (const auto& t : specs) {
        Monomial m;
        m.exponents = t.e;
        p.add_term(m, t.sqrt2 ? Q2Number(Rat(0), Rat(t.coef)) : Q2Number(t.coef));
    }
    return p;
}

}  // namespace

MultiPoly expected_H4() {
    return from_specs({
        {-18, false, {0, 0, 0, 4}}, {-8, true, {4, 0, 0, 0}},   {-8, true, {0, 4, 0, 0}},
        {-8, true, {0, 0, 4, 0}},   {-48, true, {2, 2, 0, 0}},  {-32, true, {2, 0, 2, 0}},
        {-8, true, {2, 0, 0, 2}},   {16, true, {1, 0, 3, 0}},   {-32, true, {0, 2, 2, 0}},
        {-8, true, {0, 2, 0, 2}},   {-16, true, {0, 1, 3, 0}},  {-24, true, {0, 0, 2, 2}},
        {-44, false, {2, 2, 0, 0}}, {-24, false, {2, 0, 2, 0}}, {-48, false, {2, 0, 0, 2}},
        {-24, false, {0, 2, 2, 0}}, {-48, false, {0, 2, 0, 2}}, {-24, false, {0, 0, 2, 2}},
        {-40, false, {3, 1, 0, 0}}, {-40, false, {1, 3, 0, 0}}, {-48, false, {1, 1, 2, 0}},
        {-48, false, {1, 1, 0, 2}}, {-24, true, {2, 1, 1, 0}},  {24, true, {1, 2, 1, 0}},
        {8, true, {1, 0, 1, 2}},    {-8, true, {0, 1, 1, 2}},   {-18, false, {4, 0, 0, 0}},
        {-18, false, {0, 4, 0, 0}},
    });
}

MultiPoly expected_k42() {
    return from_specs({
        {-8, true, {2, 0, 0, 0}}, {8, true, {1, 0, 1, 0}},    {-8, true, {0, 2, 0, 0}},
        {-8, true, {0, 1, 1, 0}}, {-24, true, {0, 0, 2, 0}},  {-48, false, {2, 0, 0, 0}},
        {-48, false, {1, 1, 0, 0}}, {-48, false, {0, 2, 0, 0}}, {-24, false, {0, 0, 2, 0}},
    });
}

bool check_H_counts(const LocalCertificate& cert) {
    for (int d = 2; d <= 24; ++d) {
        auto it = cert.H.find(d);
        const std::size_t n = it == cert.H.end() ? 0 : it->second.term_count();
        if (n != reference::kHTermCounts[d - 2]) return false;
    }
    return cert.H.at(2) == expected_H2() && cert.H.at(3) == expected_H3() && cert.H.at(4) == expected_H4();
}

// ---------------------------------------------------------------------------

std::optional<Point4> find_positivity_witness(const MultiPoly& J, const Rat& r0, std::uint64_t seed, int samples) {
    // Screen in double, confirm exactly.
    std::vector<std::pair<std::array<int, 4>, double>> terms;
    for (const auto& [m, c] : J.terms())
        terms.push_back({{m.exponents[0], m.exponents[1], m.exponents[2], m.exponents[3]}, c.to_double()});
    std::mt19937_64 rng(seed);
    constexpr long kDen = 1 << 20;
    std::uniform_int_distribution<long> coord(-kDen, kDen);
    const double r = r0.get_d();
    std::vector<std::pair<double, std::array<long, 4>>> best;
    for (int n = 0; n < samples; ++n) {
        std::array<long, 4> k{coord(rng), coord(rng), coord(rng), coord(rng)};
        if (k[0] + k[1] < 0) {
            k[0] = -k[0];
            k[1] = -k[1];
        }
        std::array<double, 4> x;
        for (int i = 0; i < 4; ++i) x[i] = r * static_cast<double>(k[i]) / kDen;
        double value = 0;
        for (const auto& [e, c] : terms)
            value += c * std::pow(x[0], e[0]) * std::pow(x[1], e[1]) * std::pow(x[2], e[2]) * std::pow(x[3], e[3]);
        if (value > 0) best.push_back({value, k});
    }
    std::sort(best.begin(), best.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
    for (std::size_t i = 0; i < std::min<std::size_t>(best.size(), 16); ++i) {
        Point4 p;
        for (int j = 0; j < 4; ++j) p[j] = Q2Number(Rat(r0 * make_rat(best[i].second[j], kDen)));
        if (J.eval(p).sign() > 0) return p;
    }
    return std::nullopt;
}

LocalCertificate verify_local(const Rat& r0, Majorizer majorizer, std::uint64_t witness_seed, int witness_samples) {
    if (sgn(r0) <= 0) throw std::invalid_argument("r0 must be positive");
    LocalCertificate cert;
    cert.r0 = r0;
    cert.majorizer = majorizer;
    auto stage = [&](std::string name, bool ok, std::string detail = {}) {
        cert.stages.push_back({std::move(name), ok, std::move(detail)});
        return ok;
    };

    cert.J = build_J();
    stage("build_J", cert.J.min_degree() == reference::kJMinDegree && cert.J.max_degree() <= reference::kJMaxDegree,
          "terms=" + std::to_string(cert.J.term_count()) + " monomials=" + std::to_string(cert.J.monomial_count()));

    for (int d = cert.J.min_degree(); d <= cert.J.max_degree(); ++d) cert.H[d] = homog_component(cert.J, d);
    for (int d = 5; d <= cert.J.max_degree(); ++d) {
        MultiPoly image = transform_T(cert.H[d]);
        cert.theta_term_counts[d] = image.term_count();
        cert.theta += image;
    }

    // Majorize theta by diagonal quadratic forms on [0, r0]^4.
    const Rat sqrt2_upper = make_rat(10, 7);
    if (sqrt2_upper * sqrt2_upper < 2) throw std::logic_error("10/7 is not an upper bound of sqrt2");
    for (int d = 5; d <= cert.J.max_degree(); ++d) {
        const MultiPoly image = transform_T(cert.H[d]);
        cert.res5_lemma3 += lemma3_majorize(image, r0);
        cert.res5_paper += lemma3_majorize(bound_sqrt2_above(image, sqrt2_upper), r0);
        cert.res5_literal_sd += transform_Sd(image, r0);
    }
    switch (majorizer) {
        case Majorizer::paper: cert.res5 = cert.res5_paper; break;
        case Majorizer::lemma3: cert.res5 = cert.res5_lemma3; break;
        case Majorizer::literal_sd: cert.res5 = cert.res5_literal_sd; break;
    }
    const Q2Number tight(make_rat(10, 9));
    const Q2Number loose(make_rat(5, 4));
    cert.res5_bound_tight.coefficients = {tight, tight, Q2Number(1), tight};
    cert.res5_bound.coefficients = {loose, loose, Q2Number(1), loose};
    stage("res5_within_bound", cert.res5.dominated_by(cert.res5_bound), "res5=" + cert.res5.to_string());

    cert.split = split_low_degree(cert.H[2], cert.H[3], cert.H[4]);
    stage("v4_coefficient_negative", cert.split.v4_coefficient.sign() < 0,
          "v4=" + cert.split.v4_coefficient.to_string());

    cert.K2 = reduce_to_K2(cert.split, cert.res5_bound[Var::v]);
    cert.K2_tight = reduce_to_K2(cert.split, cert.res5_bound_tight[Var::v]);
    cert.K2_report = analyze_K2(cert.K2, r0);
    cert.K2_tight_report = analyze_K2(cert.K2_tight, r0);
    stage("K2_negative_on_cube", cert.K2_report.valid(), "max=" + cert.K2_report.cube_maximum.to_string());

    cert.k3_k4 = bound_k30_k40(cert.split, r0);
    stage("orientation_part_dropped", true, "uses s+t>=0 on " + cert.k3_k4.k30_orientation_part.to_string());

    const MultiPoly k34 = cert.k3_k4.k30_bound.to_poly() + cert.k3_k4.k40_bound.to_poly();
    DiagQuadForm stu = cert.res5_bound;
    stu[Var::v] = Q2Number();
    DiagQuadForm stu_tight = cert.res5_bound_tight;
    stu_tight[Var::v] = Q2Number();
    cert.q2 = cert.split.k20 + k34 + stu.to_poly();
    cert.q2_tight = cert.split.k20 + k34 + stu_tight.to_poly();
    cert.final_matrix = SymMatrix3::from_quadratic_form(cert.q2);
    cert.final_matrix_tight = SymMatrix3::from_quadratic_form(cert.q2_tight);
    cert.nsd_verdict = is_negative_semidefinite(cert.final_matrix);
    cert.nsd_tight_verdict = is_negative_semidefinite(cert.final_matrix_tight);
    stage("final_matrix_nsd", cert.nsd_verdict, "M=" + cert.final_matrix.to_string());

    cert.valid = cert.failing_stage().empty();
    if (!cert.valid) cert.positivity_witness = find_positivity_witness(cert.J, r0, witness_seed, witness_samples);
    return cert;
}

// ---------------------------------------------------------------------------

namespace {

constexpr std::string_view kLocalHeader = "hemicert-local-certificate 1";

std::string point_to_string(const Point4& p) {
    std::string out = "[";
    for (int i = 0; i < kNumVars; ++i) {
        if (i) out += "; ";
        out += p[i].to_string();
    }
    return out + "]";
}

Point4 point_from_string(std::string_view text) {
    DiagQuadForm f = DiagQuadForm::parse(text);
    return f.coefficients;
}

std::string bool_str(bool b) { return b ? "true" : "false"; }

void write_k2_report(std::ostringstream& os, const std::string& key, const K2Report& r) {
    if (r.critical_point) {
        const auto& c = *r.critical_point;
        os << key << ".critical_point [" << c[0].to_string() << "; " << c[1].to_string() << "; " << c[2].to_string()
           << "]\n";
    } else {
        os << key << ".critical_point none\n";
    }
    os << key << ".critical_point_inside_cube " << bool_str(r.critical_point_inside_cube) << '\n';
    os << key << ".value_at_origin " << r.value_at_origin.to_string() << '\n';
    for (const auto& f : r.face_maxima) os << key << ".face_max " << f.face << ' ' << f.value.to_string() << '\n';
    os << key << ".cube_maximum " << r.cube_maximum.to_string() << '\n';
}

}  // namespace

std::string serialize(const LocalCertificate& c) {
    std::ostringstream os;
    os << kLocalHeader << '\n';
    os << "r0 " << c.r0.get_str() << '\n';
    os << "majorizer " << to_string(c.majorizer) << '\n';
    os << "orientation_assumption " << bool_str(c.orientation_assumption) << '\n';
    os << "valid " << bool_str(c.valid) << '\n';
    for (const auto& s : c.stages)
        os << "stage " << s.name << ' ' << (s.ok ? "ok" : "FAILED") << (s.detail.empty() ? "" : " ") << s.detail
           << '\n';
    os << "J.term_count " << c.J.term_count() << '\n';
    os << "J.monomial_count " << c.J.monomial_count() << '\n';
    os << "J.min_degree " << c.J.min_degree() << '\n';
    os << "J.max_degree " << c.J.max_degree() << '\n';
    for (const auto& [d, h] : c.H) os << "H." << d << ".term_count " << h.term_count() << '\n';
    for (const auto& [d, n] : c.theta_term_counts) os << "theta." << d << ".term_count " << n << '\n';
    os << "theta.term_count " << c.theta.term_count() << '\n';
    os << "res5 " << c.res5.to_string() << '\n';
    os << "res5.paper " << c.res5_paper.to_string() << '\n';
    os << "res5.lemma3 " << c.res5_lemma3.to_string() << '\n';
    os << "res5.literal_sd " << c.res5_literal_sd.to_string() << '\n';
    os << "res5.bound " << c.res5_bound.to_string() << '\n';
    os << "res5.bound_tight " << c.res5_bound_tight.to_string() << '\n';
    os << "k20 " << c.split.k20.to_string() << '\n';
    os << "k22 " << c.split.k22.to_string() << '\n';
    os << "k30 " << c.split.k30.to_string() << '\n';
    os << "k32 " << c.split.k32.to_string() << '\n';
    os << "k40 " << c.split.k40.to_string() << '\n';
    os << "k42 " << c.split.k42.to_string() << '\n';
    os << "v4_coefficient " << c.split.v4_coefficient.to_string() << '\n';
    os << "K2 " << c.K2.to_string() << '\n';
    write_k2_report(os, "K2", c.K2_report);
    os << "K2_tight " << c.K2_tight.to_string() << '\n';
    write_k2_report(os, "K2_tight", c.K2_tight_report);
    os << "k30_orientation_part " << c.k3_k4.k30_orientation_part.to_string() << '\n';
    os << "k30_bound " << c.k3_k4.k30_bound.to_string() << '\n';
    os << "k40_bound " << c.k3_k4.k40_bound.to_string() << '\n';
    os << "q2 " << c.q2.to_string() << '\n';
    os << "q2_tight " << c.q2_tight.to_string() << '\n';
    os << "final_matrix " << c.final_matrix.to_string() << '\n';
    os << "final_matrix_tight " << c.final_matrix_tight.to_string() << '\n';
    os << "nsd_verdict " << bool_str(c.nsd_verdict) << '\n';
    os << "nsd_tight_verdict " << bool_str(c.nsd_tight_verdict) << '\n';
    if (c.positivity_witness) os << "positivity_witness " << point_to_string(*c.positivity_witness) << '\n';
    for (const auto& [d, h] : c.H) os << "H." << d << ' ' << h.to_string() << '\n';
    os << "theta " << c.theta.to_string() << '\n';
    os << "J " << c.J.to_string() << '\n';
    return os.str();
}

namespace {

bool parse_bool(std::string_view v) {
    if (v == "true") return true;
    if (v == "false") return false;
    throw std::invalid_argument("expected true/false");
}

void read_k2_field(K2Report& r, std::string_view field, std::string_view value) {
    if (field == "critical_point") {
        if (value == "none") {
            r.critical_point.reset();
        } else {
            // Three entries; reuse the four-entry parser with a padding zero.
            std::string padded(value.substr(0, value.size() - 1));
            padded += "; 0]";
            auto p = point_from_string(padded);
            r.critical_point = std::array<Q2Number, 3>{p[0], p[1], p[2]};
        }
    } else if (field == "critical_point_inside_cube") {
        r.critical_point_inside_cube = parse_bool(value);
    } else if (field == "value_at_origin") {
        r.value_at_origin = Q2Number::parse(value);
    } else if (field == "face_max") {
        auto sp = value.find(' ');
        if (sp == std::string_view::npos) throw std::invalid_argument("face_max needs a face and a value");
        r.face_maxima.push_back({std::string(value.substr(0, sp)), Q2Number::parse(value.substr(sp + 1))});
    } else if (field == "cube_maximum") {
        r.cube_maximum = Q2Number::parse(value);
    } else {
        throw std::invalid_argument("unknown K2 field");
    }
}

}  // namespace

LocalCertificate parse_local_certificate(std::string_view text) {
    LocalCertificate c;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    bool saw_header = false;
    while (pos < text.size()) {
        auto end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (line.empty()) continue;
        try {
            if (!saw_header) {
                if (line != kLocalHeader) throw std::invalid_argument("missing certificate header");
                saw_header = true;
                continue;
            }
            auto sp = line.find(' ');
            if (sp == std::string_view::npos) throw std::invalid_argument("expected 'key value'");
            std::string_view key = line.substr(0, sp);
            std::string_view value = line.substr(sp + 1);
            if (key == "r0") c.r0 = parse_rat(value);
            else if (key == "majorizer") c.majorizer = parse_majorizer(value);
            else if (key == "orientation_assumption") c.orientation_assumption = parse_bool(value);
            else if (key == "valid") c.valid = parse_bool(value);
            else if (key == "stage") {
                auto a = value.find(' ');
                if (a == std::string_view::npos) throw std::invalid_argument("stage needs a status");
                std::string_view rest = value.substr(a + 1);
                auto b = rest.find(' ');
                std::string_view status = rest.substr(0, b);
                if (status != "ok" && status != "FAILED") throw std::invalid_argument("bad stage status");
                c.stages.push_back({std::string(value.substr(0, a)), status == "ok",
                                    b == std::string_view::npos ? std::string() : std::string(rest.substr(b + 1))});
            } else if (key == "res5") c.res5 = DiagQuadForm::parse(value);
            else if (key == "res5.paper") c.res5_paper = DiagQuadForm::parse(value);
            else if (key == "res5.lemma3") c.res5_lemma3 = DiagQuadForm::parse(value);
            else if (key == "res5.literal_sd") c.res5_literal_sd = DiagQuadForm::parse(value);
            else if (key == "res5.bound") c.res5_bound = DiagQuadForm::parse(value);
            else if (key == "res5.bound_tight") c.res5_bound_tight = DiagQuadForm::parse(value);
            else if (key == "k20") c.split.k20 = MultiPoly::parse(value);
            else if (key == "k22") c.split.k22 = MultiPoly::parse(value);
            else if (key == "k30") c.split.k30 = MultiPoly::parse(value);
            else if (key == "k32") c.split.k32 = MultiPoly::parse(value);
            else if (key == "k40") c.split.k40 = MultiPoly::parse(value);
            else if (key == "k42") c.split.k42 = MultiPoly::parse(value);
            else if (key == "v4_coefficient") c.split.v4_coefficient = Q2Number::parse(value);
            else if (key == "K2") c.K2 = MultiPoly::parse(value);
            else if (key == "K2_tight") c.K2_tight = MultiPoly::parse(value);
            else if (key.substr(0, 9) == "K2_tight.") read_k2_field(c.K2_tight_report, key.substr(9), value);
            else if (key.substr(0, 3) == "K2.") read_k2_field(c.K2_report, key.substr(3), value);
            else if (key == "k30_orientation_part") c.k3_k4.k30_orientation_part = MultiPoly::parse(value);
            else if (key == "k30_bound") c.k3_k4.k30_bound = DiagQuadForm::parse(value);
            else if (key == "k40_bound") c.k3_k4.k40_bound = DiagQuadForm::parse(value);
            else if (key == "q2") c.q2 = MultiPoly::parse(value);
            else if (key == "q2_tight") c.q2_tight = MultiPoly::parse(value);
            else if (key == "final_matrix") c.final_matrix = SymMatrix3::parse(value);
            else if (key == "final_matrix_tight") c.final_matrix_tight = SymMatrix3::parse(value);
            else if (key == "nsd_verdict") c.nsd_verdict = parse_bool(value);
            else if (key == "nsd_tight_verdict") c.nsd_tight_verdict = parse_bool(value);
            else if (key == "positivity_witness") c.positivity_witness = point_from_string(value);
            else if (key == "theta") c.theta = MultiPoly::parse(value);
            else if (key == "J") c.J = MultiPoly::parse(value);
            else if (key.substr(0, 6) == "theta.") {
                // theta.<d>.term_count is derived data; check it matches what was stored.
                auto dot = key.find('.', 6);
                if (dot != std::string_view::npos)
                    c.theta_term_counts[std::stoi(std::string(key.substr(6, dot - 6)))] =
                        std::stoul(std::string(value));
            } else if (key.substr(0, 2) == "H.") {
                auto rest = key.substr(2);
                auto dot = rest.find('.');
                if (dot == std::string_view::npos) c.H[std::stoi(std::string(rest))] = MultiPoly::parse(value);
            } else if (key.substr(0, 2) == "J.") {
                // Summary lines, recomputed from J.
            } else {
                throw std::invalid_argument("unknown key '" + std::string(key) + "'");
            }
        } catch (const std::exception& e) {
            throw std::invalid_argument("local certificate line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    if (!saw_header) throw std::invalid_argument("local certificate line 1: missing certificate header");
    return c;
}

}  // namespace hemicert
