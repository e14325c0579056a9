// SPDX-License-Identifier: Apache-2.0
//
// Exact local analysis around the square configuration: builds the
// polynomial J whose sign controls the distance sum near the optimum and
// certifies J <= 0 on [-r0, r0]^4 intersected with s + t >= 0.

#pragma once

#include "hemicert/exact.hpp"
#include "hemicert/geometry.hpp"
#include "hemicert/poly.hpp"

#include <array>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hemicert {

/// numerator * scalar / ((s^2+1)^e1 (t^2+1)^e2 (u^2+1)^e3 (v^2+1)^e4).
/// The denominator is positive on R^4.
struct RationalFn {
    MultiPoly numerator;
    std::array<int, kNumVars> denom_exponents{};
    Q2Number scalar{1};

    MultiPoly denominator() const;
    /// Throws std::domain_error if the point makes the value irrational in a
    /// way Q[sqrt2] cannot hold (it never does for Q[sqrt2] points).
    Q2Number eval(const Point4& point) const;
};

/// Upper bounds for the six distances AB, AC, AD, BC, BD, CD from
/// sqrt(1-x) <= 1 - x/2 - x^2/8 - x^3/16, each scaled by the distance's
/// value at the square configuration.
std::array<RationalFn, 6> distance_majorants();

/// Radicand of each distance as a rational function of (s, t, u, v).
/// The local expansion places D at (-2u/(1+u^2), (1-v^2)/(1+v^2)), the
/// mirror of config_from_params in u; see local_params_to_config.
std::array<RationalFn, 6> distance_radicands();

/// J = 8 Π(·)^3 (Σ majorants - 4 - 4 sqrt2). Throws std::logic_error if
/// the degree exceeds 24 or a constant term survives.
MultiPoly build_J();

/// 8 (s^2+1)^3 (t^2+1)^3 (u^2+1)^3 (v^2+1)^3.
MultiPoly j_denominator();

/// 1 - x/2 - x^2/8 - x^3/16 squared minus (1 - x), as a polynomial in x
/// (encoded in the variable s).
MultiPoly taylor_gap_polynomial();

enum class Majorizer {
    /// Power-mean weights with every sqrt2 bounded above by 10/7; reproduces
    /// the reference res5 rationals.
    paper,
    /// Power-mean weights with exact sqrt2 coefficients.
    lemma3,
    /// (4 d_k^2 - d_k)^2 weights with constant r0^(d-2)/12, as printed.
    literal_sd,
};

std::string_view to_string(Majorizer m);
Majorizer parse_majorizer(std::string_view text);

/// Symmetric 3x3 matrix over Q[sqrt2].
class SymMatrix3 {
public:
    SymMatrix3() = default;
    /// Entries in the order (00, 01, 02, 11, 12, 22).
    explicit SymMatrix3(const std::array<Q2Number, 6>& upper);

    /// M with q = 1/2 (s,t,u) M (s,t,u)^T for a quadratic form q in s, t, u.
    /// Throws std::invalid_argument if q is not such a form.
    static SymMatrix3 from_quadratic_form(const MultiPoly& q);

    const Q2Number& operator()(int i, int j) const { return m_[i][j]; }
    Q2Number determinant() const;
    std::array<Q2Number, 6> upper() const;

    std::string to_string() const;
    static SymMatrix3 parse(std::string_view text);
    friend bool operator==(const SymMatrix3&, const SymMatrix3&) = default;

private:
    std::array<std::array<Q2Number, 3>, 3> m_{};
};

/// All principal minors of -M are >= 0, each sign decided exactly.
bool is_negative_semidefinite(const SymMatrix3& m);

struct FaceMaximum {
    std::string face;  // "s=-r0", "s=+r0", ...
    Q2Number value;
};

struct K2Report {
    std::optional<std::array<Q2Number, 3>> critical_point;
    bool critical_point_inside_cube = false;
    Q2Number value_at_origin;
    std::vector<FaceMaximum> face_maxima;
    Q2Number cube_maximum;  // includes the critical value when it lies inside

    /// Origin value, every face maximum and the cube maximum are < 0.
    bool valid() const;
};

/// Exact maximum of a polynomial of degree <= 2 in the listed variables over
/// [-w, w]^n, by interior critical point plus recursive face restriction.
Q2Number quadratic_box_maximum(const MultiPoly& q, const std::vector<Var>& free, const Rat& w);

/// K2 is a quadratic in (s, t, u). A singular Hessian leaves the critical
/// point empty and the face enumeration decides.
K2Report analyze_K2(const MultiPoly& k2, const Rat& cube_half_width);

/// Split of H2 + H3 + H4 by powers of v: v^0 part k20 + k30 + k40, v^2
/// coefficient k22 + k32 + k42 and the v^4 coefficient.
struct LowDegreeSplit {
    MultiPoly k20, k30, k40;
    MultiPoly k22, k32, k42;
    Q2Number v4_coefficient;
};

/// Throws std::logic_error if v appears with odd or > 4 powers.
LowDegreeSplit split_low_degree(const MultiPoly& h2, const MultiPoly& h3, const MultiPoly& h4);

/// k22 + k32 + k42 + v2_bound.
MultiPoly reduce_to_K2(const LowDegreeSplit& split, const Q2Number& v2_bound);

struct CubicQuarticBounds {
    MultiPoly k30_orientation_part;  // -c (s+t) u^2 with c >= 0, dropped when s+t >= 0
    DiagQuadForm k30_bound;
    DiagQuadForm k40_bound;
};

/// Throws std::logic_error if k30 has no (s+t)u^2 part of the expected sign.
CubicQuarticBounds bound_k30_k40(const LowDegreeSplit& split, const Rat& r0);

struct StageResult {
    std::string name;
    bool ok = false;
    std::string detail;
};

struct LocalCertificate {
    Rat r0;
    Majorizer majorizer = Majorizer::paper;
    bool orientation_assumption = true;

    MultiPoly J;
    std::map<int, MultiPoly> H;  // degree -> homogeneous component
    MultiPoly theta;             // sum of transform_T(H_d), d >= 5
    std::map<int, std::size_t> theta_term_counts;

    DiagQuadForm res5;  // from the selected majorizer
    DiagQuadForm res5_paper;
    DiagQuadForm res5_lemma3;
    DiagQuadForm res5_literal_sd;
    DiagQuadForm res5_bound_tight;  // (10/9, 10/9, 1, 10/9)
    DiagQuadForm res5_bound;        // (5/4, 5/4, 1, 5/4)

    LowDegreeSplit split;
    MultiPoly K2;        // constant from res5_bound
    MultiPoly K2_tight;  // constant from res5_bound_tight
    K2Report K2_report;
    K2Report K2_tight_report;

    CubicQuarticBounds k3_k4;
    MultiPoly q2;
    MultiPoly q2_tight;
    SymMatrix3 final_matrix;
    SymMatrix3 final_matrix_tight;
    bool nsd_verdict = false;
    bool nsd_tight_verdict = false;

    std::vector<StageResult> stages;
    std::optional<Point4> positivity_witness;  // J > 0 found by sampling
    bool valid = false;

    /// Name of the first failing stage, empty when valid.
    std::string failing_stage() const;
};

/// True iff the H2..H24 term counts match the expected list and H2, H3,
/// H4 equal the displayed expansions term for term.
bool check_H_counts(const LocalCertificate& cert);

/// The displayed expansions of H2, H3, H4 and k42.
MultiPoly expected_H2();
MultiPoly expected_H3();
MultiPoly expected_H4();
MultiPoly expected_k42();

/// Configuration whose distance sum the local polynomial J bounds at
/// (s, t, u, v): config_from_params(s, t, -u, v).
Config local_params_to_config(const ParamVector& p);

/// Runs the whole pipeline. On failure samples J on the box (s+t >= 0) to
/// look for a positivity witness.
LocalCertificate verify_local(const Rat& r0 = make_rat(1, 7), Majorizer majorizer = Majorizer::paper,
                              std::uint64_t witness_seed = 1, int witness_samples = 20000);

/// Searches [-r0, r0]^4 with s + t >= 0 for J > 0 at random rational points.
std::optional<Point4> find_positivity_witness(const MultiPoly& J, const Rat& r0, std::uint64_t seed,
                                              int samples);

std::string serialize(const LocalCertificate& cert);
/// Throws std::invalid_argument with a line number on malformed input.
LocalCertificate parse_local_certificate(std::string_view text);

}  // namespace hemicert
