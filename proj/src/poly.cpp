// SPDX-License-Identifier: Apache-2.0

#include "hemicert/poly.hpp"

#include <algorithm>
#include <stdexcept>
#include <vector>

namespace hemicert {

Monomial operator*(const Monomial& a, const Monomial& b) {
    Monomial out;
    for (int i = 0; i < kNumVars; ++i)
        out.exponents[i] = static_cast<std::uint8_t>(a.exponents[i] + b.exponents[i]);
    return out;
}

MultiPoly::MultiPoly(Q2Number c) {
    if (!c.is_zero()) terms_.emplace(Monomial{}, std::move(c));
}

MultiPoly MultiPoly::variable(Var x) {
    Monomial m;
    m.exponents[static_cast<int>(x)] = 1;
    return monomial(m, Q2Number(1));
}

MultiPoly MultiPoly::monomial(const Monomial& m, Q2Number c) {
    MultiPoly p;
    p.add_term(m, c);
    return p;
}

Q2Number MultiPoly::coefficient(const Monomial& m) const {
    auto it = terms_.find(m);
    return it == terms_.end() ? Q2Number() : it->second;
}

std::size_t MultiPoly::term_count() const {
    std::size_t n = 0;
    for (const auto& [m, c] : terms_)
        n += (sgn(c.rat_part()) != 0) + (sgn(c.sqrt2_part()) != 0);
    return n;
}

int MultiPoly::min_degree() const { return terms_.empty() ? -1 : terms_.begin()->first.degree(); }

int MultiPoly::max_degree() const { return terms_.empty() ? -1 : terms_.rbegin()->first.degree(); }

void MultiPoly::add_term(const Monomial& m, const Q2Number& c) {
    if (c.is_zero()) return;
    auto [it, inserted] = terms_.try_emplace(m, c);
    if (!inserted) {
        it->second += c;
        if (it->second.is_zero()) terms_.erase(it);
    }
}

MultiPoly MultiPoly::operator-() const {
    MultiPoly out = *this;
    for (auto& [m, c] : out.terms_) c = -c;
    return out;
}

MultiPoly& MultiPoly::operator+=(const MultiPoly& o) {
    for (const auto& [m, c] : o.terms_) add_term(m, c);
    return *this;
}

MultiPoly& MultiPoly::operator-=(const MultiPoly& o) {
    for (const auto& [m, c] : o.terms_) add_term(m, -c);
    return *this;
}

MultiPoly operator*(const MultiPoly& a, const MultiPoly& b) {
    // Accumulate without erasing, then drop cancellations once.
    MultiPoly::TermMap acc;
    for (const auto& [ma, ca] : a.terms_)
        for (const auto& [mb, cb] : b.terms_) {
            auto [it, inserted] = acc.try_emplace(ma * mb);
            it->second += ca * cb;
        }
    MultiPoly out;
    for (auto& [m, c] : acc)
        if (!c.is_zero()) out.terms_.emplace_hint(out.terms_.end(), m, std::move(c));
    return out;
}

MultiPoly& MultiPoly::operator*=(const MultiPoly& o) { return *this = *this * o; }

MultiPoly& MultiPoly::operator*=(const Q2Number& c) {
    if (c.is_zero()) {
        terms_.clear();
        return *this;
    }
    for (auto& [m, coef] : terms_) coef *= c;
    return *this;
}

MultiPoly MultiPoly::pow(unsigned n) const {
    MultiPoly out(1);
    for (unsigned i = 0; i < n; ++i) out *= *this;
    return out;
}

MultiPoly MultiPoly::filter(const std::function<bool(const Monomial&)>& keep) const {
    MultiPoly out;
    for (const auto& [m, c] : terms_)
        if (keep(m)) out.terms_.emplace_hint(out.terms_.end(), m, c);
    return out;
}

Q2Number MultiPoly::eval(const Point4& point) const {
    // Power tables avoid recomputing x^k per term.
    std::array<std::vector<Q2Number>, kNumVars> powers;
    const int top = std::max(max_degree(), 0);
    for (int i = 0; i < kNumVars; ++i) {
        powers[i].reserve(top + 1);
        powers[i].emplace_back(1);
        for (int k = 1; k <= top; ++k) powers[i].push_back(powers[i].back() * point[i]);
    }
    Q2Number sum;
    for (const auto& [m, c] : terms_) {
        Q2Number term = c;
        for (int i = 0; i < kNumVars; ++i)
            if (m.exponents[i] != 0) term *= powers[i][m.exponents[i]];
        sum += term;
    }
    return sum;
}

DyadicEvaluator::DyadicEvaluator(const MultiPoly& p, unsigned bits)
    : bits_(bits), degree_(std::max(p.max_degree(), 0)) {
    for (const auto& [m, c] : p.terms()) {
        denominator_ = lcm(denominator_, c.rat_part().get_den());
        denominator_ = lcm(denominator_, c.sqrt2_part().get_den());
    }
    terms_.reserve(p.monomial_count());
    for (const auto& [m, c] : p.terms())
        terms_.push_back({m, Integer(c.rat_part() * Rat(denominator_)), Integer(c.sqrt2_part() * Rat(denominator_))});
}

Q2Number DyadicEvaluator::operator()(const std::array<std::int64_t, kNumVars>& n) const {
    std::array<std::vector<Integer>, kNumVars> powers;
    for (int k = 0; k < kNumVars; ++k) {
        powers[k].assign(degree_ + 1, Integer(1));
        const Integer base(static_cast<long>(n[k]));
        for (int e = 1; e <= degree_; ++e) powers[k][e] = powers[k][e - 1] * base;
    }
    // Scaled by 2^(bits * degree): a term of degree d picks up 2^(bits (degree - d)).
    Integer a = 0, b = 0, term;
    for (const auto& t : terms_) {
        term = powers[0][t.m.exponents[0]] * powers[1][t.m.exponents[1]];
        term *= powers[2][t.m.exponents[2]];
        term *= powers[3][t.m.exponents[3]];
        term <<= static_cast<mp_bitcnt_t>(bits_) * (degree_ - t.m.degree());
        a += t.a * term;
        b += t.b * term;
    }
    const Integer scale = denominator_ << static_cast<mp_bitcnt_t>(bits_) * degree_;
    return {make_rat(a, scale), make_rat(b, scale)};
}

std::string MultiPoly::to_string() const {
    if (terms_.empty()) return "0";
    std::string out;
    for (const auto& [m, c] : terms_) {
        if (!out.empty()) out += " + ";
        out += '(';
        out += c.to_string();
        out += ')';
        for (int i = 0; i < kNumVars; ++i) {
            if (m.exponents[i] == 0) continue;
            out += '*';
            out += kVarNames[i];
            if (m.exponents[i] > 1) {
                out += '^';
                out += std::to_string(m.exponents[i]);
            }
        }
    }
    return out;
}

MultiPoly MultiPoly::parse(std::string_view text) {
    MultiPoly out;
    if (text == "0") return out;
    std::size_t pos = 0;
    auto fail = [&](const char* what) {
        throw std::invalid_argument(std::string("polynomial parse error (") + what + ") at offset " +
                                    std::to_string(pos));
    };
    while (pos < text.size()) {
        if (text[pos] != '(') fail("expected '('");
        auto close = text.find(')', pos);
        if (close == std::string_view::npos) fail("unterminated coefficient");
        Q2Number c = Q2Number::parse(text.substr(pos + 1, close - pos - 1));
        pos = close + 1;
        Monomial m;
        while (pos < text.size() && text[pos] == '*') {
            ++pos;
            int var = -1;
            for (int i = 0; i < kNumVars; ++i)
                if (pos < text.size() && text[pos] == kVarNames[i][0]) var = i;
            if (var < 0) fail("unknown variable");
            ++pos;
            int e = 1;
            if (pos < text.size() && text[pos] == '^') {
                ++pos;
                std::size_t end = pos;
                while (end < text.size() && text[end] >= '0' && text[end] <= '9') ++end;
                if (end == pos) fail("missing exponent");
                e = std::stoi(std::string(text.substr(pos, end - pos)));
                pos = end;
            }
            m.exponents[var] = static_cast<std::uint8_t>(m.exponents[var] + e);
        }
        out.add_term(m, c);
        if (pos == text.size()) break;
        if (text.substr(pos, 3) != " + ") fail("expected ' + '");
        pos += 3;
    }
    return out;
}

MultiPoly homog_component(const MultiPoly& p, int degree) {
    return p.filter([degree](const Monomial& m) { return m.degree() == degree; });
}

MultiPoly coefficient_of(const MultiPoly& p, Var x, int k) {
    MultiPoly out;
    const int i = static_cast<int>(x);
    for (const auto& [m, c] : p.terms()) {
        if (m.exponents[i] != k) continue;
        Monomial rest = m;
        rest.exponents[i] = 0;
        out.add_term(rest, c);
    }
    return out;
}

MultiPoly substitute(const MultiPoly& p, Var x, const Q2Number& value) {
    MultiPoly out;
    const int i = static_cast<int>(x);
    std::vector<Q2Number> powers{Q2Number(1)};
    for (const auto& [m, c] : p.terms()) {
        while (static_cast<int>(powers.size()) <= m.exponents[i]) powers.push_back(powers.back() * value);
        Monomial rest = m;
        rest.exponents[i] = 0;
        out.add_term(rest, c * powers[m.exponents[i]]);
    }
    return out;
}

MultiPoly derivative(const MultiPoly& p, Var x) {
    MultiPoly out;
    const int i = static_cast<int>(x);
    for (const auto& [m, c] : p.terms()) {
        if (m.exponents[i] == 0) continue;
        Monomial d = m;
        d.exponents[i] -= 1;
        out.add_term(d, c * Q2Number(static_cast<long>(m.exponents[i])));
    }
    return out;
}

DiagQuadForm& DiagQuadForm::operator+=(const DiagQuadForm& o) {
    for (int i = 0; i < kNumVars; ++i) coefficients[i] += o.coefficients[i];
    return *this;
}

bool DiagQuadForm::is_zero() const {
    for (const auto& c : coefficients)
        if (!c.is_zero()) return false;
    return true;
}

MultiPoly DiagQuadForm::to_poly() const {
    MultiPoly out;
    for (int i = 0; i < kNumVars; ++i) {
        Monomial m;
        m.exponents[i] = 2;
        out.add_term(m, coefficients[i]);
    }
    return out;
}

Q2Number DiagQuadForm::eval(const Point4& point) const {
    Q2Number sum;
    for (int i = 0; i < kNumVars; ++i) sum += coefficients[i] * point[i] * point[i];
    return sum;
}

bool DiagQuadForm::dominated_by(const DiagQuadForm& bound) const {
    for (int i = 0; i < kNumVars; ++i)
        if (bound.coefficients[i] < coefficients[i]) return false;
    return true;
}

std::string DiagQuadForm::to_string() const {
    std::string out = "[";
    for (int i = 0; i < kNumVars; ++i) {
        if (i) out += "; ";
        out += coefficients[i].to_string();
    }
    return out + "]";
}

DiagQuadForm DiagQuadForm::parse(std::string_view text) {
    if (text.size() < 2 || text.front() != '[' || text.back() != ']')
        throw std::invalid_argument("diagonal form must be bracketed");
    text = text.substr(1, text.size() - 2);
    DiagQuadForm out;
    for (int i = 0; i < kNumVars; ++i) {
        auto sep = text.find("; ");
        if ((sep == std::string_view::npos) != (i == kNumVars - 1))
            throw std::invalid_argument("diagonal form needs four entries");
        out.coefficients[i] = Q2Number::parse(text.substr(0, sep));
        if (sep != std::string_view::npos) text.remove_prefix(sep + 2);
    }
    return out;
}

MultiPoly transform_T(const MultiPoly& p) {
    MultiPoly out;
    for (const auto& [m, c] : p.terms()) {
        const bool even = m.all_even();
        auto image = [even](const Rat& part) -> Rat {
            if (even && sgn(part) < 0) return Rat(0);
            return abs(part);
        };
        out.add_term(m, Q2Number(image(c.rat_part()), image(c.sqrt2_part())));
    }
    return out;
}

MultiPoly bound_sqrt2_above(const MultiPoly& p, const Rat& sqrt2_upper) {
    MultiPoly out;
    for (const auto& [m, c] : p.terms()) {
        if (sgn(c.rat_part()) < 0 || sgn(c.sqrt2_part()) < 0)
            throw std::invalid_argument("bound_sqrt2_above needs nonnegative parts");
        out.add_term(m, Q2Number(Rat(c.rat_part() + c.sqrt2_part() * sqrt2_upper)));
    }
    return out;
}

namespace {

Rat rat_pow(const Rat& base, int n) {
    Rat out(1);
    for (int i = 0; i < n; ++i) out *= base;
    return out;
}

}  // namespace

DiagQuadForm transform_Sd(const MultiPoly& p, const Rat& r0) {
    DiagQuadForm out;
    if (p.is_zero()) return out;
    if (sgn(r0) <= 0) throw std::invalid_argument("transform_Sd needs r0 > 0");
    const int d = p.max_degree();
    if (p.min_degree() != d || d < 3)
        throw std::invalid_argument("transform_Sd needs a homogeneous polynomial of degree >= 3");
    const Rat scale = rat_pow(r0, d - 2) / 12;
    for (const auto& [m, c] : p.terms()) {
        if (c.sign() < 0) throw std::invalid_argument("transform_Sd needs nonnegative coefficients");
        for (int k = 0; k < kNumVars; ++k) {
            const long dk = m.exponents[k];
            const long weight = 4 * dk * dk - dk;
            out.coefficients[k] += c * Q2Number(Rat(scale * weight * weight));
        }
    }
    return out;
}

DiagQuadForm lemma3_majorize(const Monomial& m, const Q2Number& coefficient, const Rat& r) {
    DiagQuadForm out;
    if (coefficient.is_zero()) return out;
    if (coefficient.sign() < 0) throw std::invalid_argument("lemma3_majorize needs coefficient >= 0");
    if (sgn(r) <= 0) throw std::invalid_argument("lemma3_majorize needs r > 0");
    const int n = m.degree();
    if (n < 2) throw std::invalid_argument("lemma3_majorize needs total degree >= 2");
    const Rat scale = rat_pow(r, n - 2) / n;
    for (int k = 0; k < kNumVars; ++k)
        if (m.exponents[k] != 0)
            out.coefficients[k] = coefficient * Q2Number(Rat(scale * static_cast<long>(m.exponents[k])));
    return out;
}

DiagQuadForm lemma3_majorize(const MultiPoly& p, const Rat& r) {
    DiagQuadForm out;
    for (const auto& [m, c] : p.terms()) out += lemma3_majorize(m, c, r);
    return out;
}

}  // namespace hemicert
