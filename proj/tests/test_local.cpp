// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hemicert/local.hpp"
#include "hemicert/reference.hpp"

#include <Eigen/Dense>

#include <random>

using namespace hemicert;

namespace {

const MultiPoly s = MultiPoly::variable(Var::s);
const MultiPoly t = MultiPoly::variable(Var::t);
const MultiPoly u = MultiPoly::variable(Var::u);
const MultiPoly v = MultiPoly::variable(Var::v);

const LocalCertificate& cert() {
    static const LocalCertificate c = verify_local(make_rat(1, 7));
    return c;
}

Point4 origin() { return {Q2Number(0), Q2Number(0), Q2Number(0), Q2Number(0)}; }

Monomial mono(int a, int b, int c, int d) {
    Monomial m;
    m.exponents = {static_cast<std::uint8_t>(a), static_cast<std::uint8_t>(b), static_cast<std::uint8_t>(c),
                   static_cast<std::uint8_t>(d)};
    return m;
}

}  // namespace

TEST_CASE("J size and degree range") {
    CHECK(cert().J.term_count() == 1288);
    CHECK(cert().J.monomial_count() == 1068);
    CHECK(cert().J.min_degree() == 2);
    CHECK(cert().J.max_degree() == 24);
    CHECK(cert().J.eval(origin()).is_zero());
}

TEST_CASE("the majorant is tight at the square configuration") {
    // 4 + 4 sqrt2 + J / (8 Pi) at the origin.
    const Q2Number value =
        optimum_value() + cert().J.eval(origin()) / j_denominator().eval(origin());
    CHECK(value == optimum_value());
    CHECK(j_denominator().eval(origin()) == Q2Number(8));
}

TEST_CASE("homogeneous part term counts") {
    CHECK(check_H_counts(cert()));
    CHECK(cert().H.at(2).term_count() == 9);
    CHECK(cert().H.at(3).term_count() == 6);
    CHECK(cert().H.at(4).term_count() == 28);
    for (int d = 2; d <= 24; ++d) CHECK(cert().H.at(d).term_count() == reference::kHTermCounts[d - 2]);
    // H3 = -4 sqrt2 (su - tu + 3u^2 - 4v^2)(s + t)
    const MultiPoly h3 = MultiPoly(Q2Number(0, -4)) * (s * u - t * u + MultiPoly(3) * u * u - MultiPoly(4) * v * v) * (s + t);
    CHECK(cert().H.at(3) == h3);
    CHECK(cert().H.at(2) == expected_H2());
    CHECK(cert().H.at(4) == expected_H4());
    CHECK(cert().theta.term_count() == 797);
}

TEST_CASE("res5 with rounded sqrt2 weights reproduces the reference rationals") {
    const DiagQuadForm& r = cert().res5_paper;
    CHECK(r[Var::s] == Q2Number(reference::res5_s2()));
    CHECK(r[Var::t] == Q2Number(reference::res5_s2()));
    CHECK(r[Var::u] == Q2Number(reference::res5_u2()));
    CHECK(r[Var::v] == Q2Number(reference::res5_v2()));
    CHECK(cert().res5 == r);
    CHECK(r.dominated_by(cert().res5_bound_tight));
    CHECK(r.dominated_by(cert().res5_bound));
}

TEST_CASE("the literal weighting formula does not give the reference rationals") {
    const DiagQuadForm& lit = cert().res5_literal_sd;
    CHECK(lit[Var::s] != Q2Number(reference::res5_s2()));
    CHECK(lit[Var::s].to_double() == doctest::Approx(151.19).epsilon(1e-3));
    // Larger than the exact-weight form in every coefficient, so still an upper bound.
    CHECK(cert().res5_lemma3.dominated_by(lit));
}

TEST_CASE("Taylor gap polynomial") {
    const MultiPoly x = s;
    const MultiPoly expected = x * x * x * x * (x * x + MultiPoly(4) * x + MultiPoly(20)) * Q2Number(make_rat(1, 256));
    CHECK(taylor_gap_polynomial() == expected);
    std::mt19937_64 rng(43);
    std::uniform_int_distribution<long> n(-1'000'000, 1'000'000);
    int violations = 0;
    for (int i = 0; i < 10'000; ++i) {
        const Q2Number xi(make_rat(n(rng), 1'000'000));
        if (taylor_gap_polynomial().eval({xi, Q2Number(0), Q2Number(0), Q2Number(0)}).sign() < 0) ++violations;
    }
    CHECK(violations == 0);
}

TEST_CASE("v-power split and K2") {
    const LowDegreeSplit& sp = cert().split;
    CHECK(sp.k22 == MultiPoly(-8));
    CHECK(sp.k32 == MultiPoly(Q2Number(0, 16)) * (s + t));
    CHECK(sp.k42 == expected_k42());
    CHECK(sp.v4_coefficient == Q2Number(-18));
    CHECK(cert().K2_tight.eval(origin()) == Q2Number(make_rat(-62, 9)));
    CHECK(cert().K2.eval(origin()) == Q2Number(make_rat(-27, 4)));
}

TEST_CASE("K2 critical point and cube maximum") {
    const K2Report& r = cert().K2_tight_report;
    REQUIRE(r.critical_point);
    const Q2Number c = reference::k2_critical_coordinate();
    CHECK((*r.critical_point)[0] == c);
    CHECK((*r.critical_point)[1] == c);
    CHECK((*r.critical_point)[2].is_zero());
    const Point4 p = {c, c, Q2Number(0), Q2Number(0)};
    for (Var x : {Var::s, Var::t, Var::u}) CHECK(derivative(cert().K2_tight, x).eval(p).is_zero());
    // (-2 + 9 sqrt2) / 79 < 1/7, so the point lies inside the cube.
    CHECK(r.critical_point_inside_cube);
    CHECK(cert().K2_report.valid());
    CHECK(cert().K2_report.cube_maximum == Q2Number(make_rat(-981, 316), make_rat(-32, 79)));
    CHECK(cert().K2_report.face_maxima.size() == 6);
    for (const auto& f : cert().K2_report.face_maxima) CHECK(f.value.sign() < 0);
}

TEST_CASE("K2 analysis on a smaller cube puts the critical point outside") {
    const K2Report r = analyze_K2(cert().K2_tight, make_rat(1, 8));
    CHECK_FALSE(r.critical_point_inside_cube);
    CHECK(r.valid());
}

TEST_CASE("quadratic box maximum") {
    // -(s - 1/2)^2 on [-1, 1] peaks at s = 1/2; s^2 peaks at the boundary.
    const MultiPoly q = MultiPoly(-1) * (s - MultiPoly(Q2Number(make_rat(1, 2)))).pow(2);
    CHECK(quadratic_box_maximum(q, {Var::s}, Rat(1)).is_zero());
    CHECK(quadratic_box_maximum(s * s + t, {Var::s, Var::t}, make_rat(1, 2)) == Q2Number(make_rat(3, 4)));
}

TEST_CASE("cubic and quartic part bounds") {
    const auto& b = cert().k3_k4;
    const Q2Number c30 = reference::k30_bound_coefficient();
    CHECK(b.k30_bound[Var::s] == c30);
    CHECK(b.k30_bound[Var::t] == c30);
    CHECK(b.k30_bound[Var::u] == c30);
    CHECK(b.k40_bound[Var::s] == reference::k40_bound_st());
    CHECK(b.k40_bound[Var::u] == reference::k40_bound_u());
    CHECK(b.k30_orientation_part == MultiPoly(Q2Number(0, -12)) * (s + t) * u * u);
    CHECK(cert().orientation_assumption);
}

TEST_CASE("q2 additions match the reference constants") {
    CHECK(cert().q2.coefficient(mono(2, 0, 0, 0)) - cert().split.k20.coefficient(mono(2, 0, 0, 0)) ==
          reference::q2_add_st());
    CHECK(cert().q2.coefficient(mono(0, 0, 2, 0)) - cert().split.k20.coefficient(mono(0, 0, 2, 0)) ==
          reference::q2_add_u());
}

TEST_CASE("final matrix") {
    CHECK(cert().final_matrix == SymMatrix3(reference::final_matrix_entries()));
    CHECK(cert().nsd_verdict);
    CHECK(is_negative_semidefinite(cert().final_matrix));
    CHECK(is_negative_semidefinite(cert().final_matrix_tight));
    const SymMatrix3 identity({Q2Number(1), Q2Number(0), Q2Number(0), Q2Number(1), Q2Number(0), Q2Number(1)});
    CHECK_FALSE(is_negative_semidefinite(identity));
    CHECK(is_negative_semidefinite(SymMatrix3()));
    CHECK(SymMatrix3::parse(cert().final_matrix.to_string()) == cert().final_matrix);
    CHECK(SymMatrix3::from_quadratic_form(cert().q2) == cert().final_matrix);
    CHECK_THROWS_AS(SymMatrix3::from_quadratic_form(s * s * s), std::invalid_argument);
}

TEST_CASE("semidefiniteness agrees with floating eigenvalues") {
    std::mt19937_64 rng(47);
    std::uniform_int_distribution<int> small(-4, 4);
    int compared = 0, disagreements = 0;
    for (int i = 0; i < 1000; ++i) {
        std::array<Q2Number, 6> e;
        if (i % 2 == 0) {
            // -G^T G with G over Q[sqrt2] is negative semidefinite, sometimes singular.
            std::array<std::array<Q2Number, 3>, 3> g;
            for (auto& row : g)
                for (auto& x : row) x = Q2Number(Rat(small(rng)), Rat(small(rng) / 2));
            int k = 0;
            for (int a = 0; a < 3; ++a)
                for (int b = a; b < 3; ++b) {
                    Q2Number sum;
                    for (int r = 0; r < 3; ++r) sum += g[r][a] * g[r][b];
                    e[k++] = -sum;
                }
        } else {
            for (auto& x : e) x = Q2Number(Rat(small(rng)), make_rat(small(rng), 3));
        }
        const SymMatrix3 m(e);
        Eigen::Matrix3d d;
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) d(a, b) = m(a, b).to_double();
        const Eigen::Vector3d eig = Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d>(d).eigenvalues();
        if (eig.cwiseAbs().minCoeff() < 1e-9) continue;
        ++compared;
        if (is_negative_semidefinite(m) != (eig.maxCoeff() < 0)) ++disagreements;
    }
    CHECK(compared > 500);
    CHECK(disagreements == 0);
}

TEST_CASE("verify_local on several radii and majorizers") {
    CHECK(cert().valid);
    CHECK(cert().failing_stage().empty());
    CHECK(cert().stages.size() == 6);
    const LocalCertificate eighth = verify_local(make_rat(1, 8));
    CHECK(eighth.valid);
    const LocalCertificate lemma3 = verify_local(make_rat(1, 7), Majorizer::lemma3);
    CHECK(lemma3.valid);
    CHECK(lemma3.nsd_verdict);
    const LocalCertificate literal = verify_local(make_rat(1, 7), Majorizer::literal_sd);
    CHECK_FALSE(literal.valid);
    CHECK(literal.failing_stage() == "res5_within_bound");
}

TEST_CASE("r0 = 1 fails with a positivity witness") {
    const LocalCertificate big = verify_local(Rat(1));
    CHECK_FALSE(big.valid);
    CHECK(big.failing_stage() == "res5_within_bound");
    REQUIRE(big.positivity_witness);
    const Point4& w = *big.positivity_witness;
    CHECK(big.J.eval(w).sign() > 0);
    CHECK((w[0] + w[1]).sign() >= 0);
    for (const auto& x : w) CHECK(x.abs() <= Q2Number(1));
}

TEST_CASE("no positivity witness inside the certified cube") {
    CHECK_FALSE(find_positivity_witness(cert().J, make_rat(1, 7), 3, 2000));
}

TEST_CASE("J is nonpositive at random points of the certified region") {
    constexpr unsigned kBits = 20;
    const long m = (1L << kBits) / 7;
    const DyadicEvaluator eval(cert().J, kBits);
    std::mt19937_64 rng(53);
    std::uniform_int_distribution<long> n(-m, m);
    int positives = 0;
    for (int i = 0; i < 100'000; ++i) {
        std::array<std::int64_t, 4> p = {n(rng), n(rng), n(rng), n(rng)};
        if (p[0] + p[1] < 0) {
            p[0] = -p[0];
            p[1] = -p[1];
        }
        if (eval(p).sign() > 0) ++positives;
    }
    CHECK(positives == 0);
}

TEST_CASE("local certificate round trip") {
    const std::string text = serialize(cert());
    CHECK(text.rfind("hemicert-local-certificate 1\n", 0) == 0);
    const LocalCertificate back = parse_local_certificate(text);
    CHECK(serialize(back) == text);
    CHECK(back.J == cert().J);
    CHECK(back.final_matrix == cert().final_matrix);
    CHECK(back.valid == cert().valid);
    CHECK_THROWS_AS(parse_local_certificate("hemicert-local-certificate 2\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_local_certificate("nonsense"), std::invalid_argument);
}

TEST_CASE("majorizer names") {
    for (Majorizer m : {Majorizer::paper, Majorizer::lemma3, Majorizer::literal_sd})
        CHECK(parse_majorizer(to_string(m)) == m);
    CHECK_THROWS(parse_majorizer("other"));
}

TEST_CASE("local parameters map to the mirrored configuration") {
    const ParamVector p{make_rat(1, 9), make_rat(-1, 11), make_rat(1, 13), make_rat(1, 10)};
    const Config a = local_params_to_config(p);
    const Config b = config_from_params({p.s, p.t, -p.u, p.v});
    CHECK(a.b == b.b);
    CHECK(a.c == b.c);
    CHECK(a.d == b.d);
}
