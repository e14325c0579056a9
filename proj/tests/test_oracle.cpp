// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hemicert/local.hpp"
#include "hemicert/oracle.hpp"
#include "hemicert/search.hpp"

#include <cmath>

using namespace hemicert;

namespace {

const double kOpt = 4 + 4 * std::sqrt(2.0);

Cube6 square_cube(std::int32_t edge) {
    Cube6 c;
    c.edge = edge;
    c.lo = {static_cast<std::int32_t>(kGridScale - edge), 0, static_cast<std::int32_t>(-kGridScale), 0, 0,
            static_cast<std::int32_t>(kGridScale - edge)};
    return c;
}

double norm(const ParamsD& p) { return std::sqrt(p[0] * p[0] + p[1] * p[1] + p[2] * p[2] + p[3] * p[3]); }

}  // namespace

TEST_CASE("objective at known configurations") {
    CHECK(objective(ParamsD{0, 0, 0, 0}) == doctest::Approx(kOpt).epsilon(1e-14));
    // B, C at 30 and 150 degrees, D at the centre.
    const double s = 2 - std::sqrt(3.0);
    CHECK(objective(ParamsD{s, s, 0, 1}) == doctest::Approx(3 * std::sqrt(3.0) + 3 * std::sqrt(2.0)).epsilon(1e-14));
    const mpf_class hp = objective_hp(ParamsD{0, 0, 0, 0}, 200);
    const mpf_class exact = 4 + 4 * sqrt(mpf_class(2, 200));
    CHECK(mpf_class(abs(hp - exact)).get_d() < 1e-50);
    const PointsD x = points_from_params({0, 0, 0, 0});
    CHECK(x.b[0] == 1);
    CHECK(x.c[0] == -1);
    CHECK(x.d[1] == 1);
    CHECK(in_symmetry_chamber(x));
    PointsD swapped = x;
    std::swap(swapped.b, swapped.c);
    CHECK_FALSE(in_symmetry_chamber(swapped));
}

TEST_CASE("multi-start search finds the square configuration") {
    const NumericMax m = numeric_max_search(100, 42);
    CHECK(m.value == doctest::Approx(kOpt).epsilon(1e-10));
    CHECK(std::abs(m.value - kOpt) < 1e-9);
    CHECK(m.value <= kOpt + 1e-12);
    CHECK(norm(m.params) < 1e-4);
    CHECK(criticality_check(m.params, 1e-6).max_abs < 1e-4);
}

TEST_CASE("the search is reproducible from its seed") {
    const NumericMax a = numeric_max_search(20, 7), b = numeric_max_search(20, 7);
    CHECK(a.value == b.value);
    CHECK(a.params == b.params);
}

TEST_CASE("search without the chamber restriction") {
    OracleDomain d;
    d.chamber = false;
    const NumericMax m = numeric_max_search(100, 3, d);
    CHECK(m.value == doctest::Approx(kOpt).epsilon(1e-9));
    CHECK(m.value <= kOpt + 1e-12);
}

TEST_CASE("ascent from the optimum stays there") {
    const NumericMax m = local_ascent({0, 0, 0, 0});
    CHECK(m.value == doctest::Approx(kOpt).epsilon(1e-14));
    CHECK(norm(m.params) < 1e-12);
}

TEST_CASE("keeping D away from the pole lowers the maximum") {
    OracleDomain d;
    d.v_min = 0.9;
    const NumericMax m = numeric_max_search(50, 5, d);
    CHECK(m.value < kOpt - 0.1);
    CHECK(m.params[3] >= 0.9);
    CHECK(std::abs(m.params[2]) <= m.params[3]);
}

TEST_CASE("criticality") {
    const Criticality at_opt = criticality_check({0, 0, 0, 0}, 1e-6);
    // The forward difference in v carries an O(h) error.
    CHECK(at_opt.max_abs < 1e-5);
    CHECK(std::abs(at_opt.partials[0]) < 1e-8);
    const Criticality away = criticality_check({0.5, -0.2, 0.1, 0.3}, 1e-6);
    CHECK(away.max_abs > 1e-2);
    // The objective falls as B leaves (1, 0) counterclockwise, and the
    // difference quotient sees it.
    const Criticality tilted = criticality_check({0.3, 0, 0, 0}, 1e-6);
    CHECK(tilted.partials[0] < 0);
}

TEST_CASE("sampling respects certified cube bounds") {
    const auto cover = build_initial_cover();
    int failures = 0;
    for (std::size_t i = 0; i < cover.size(); i += 997)
        if (!sample_soundness(cover[i], 20, i)) ++failures;
    CHECK(failures == 0);
    CHECK(sample_soundness(square_cube(1024), 50, 1));
    CHECK(sample_soundness(square_cube(1), 5, 1));
    // Configurations near the optimum exceed 4.
    CHECK_FALSE(sample_soundness(square_cube(1024), 20, 1, Rat(4)));
    CHECK(sample_soundness(square_cube(1024), 20, 1, Rat(12)));
}

TEST_CASE("majorization at random local points") {
    const LocalCertificate cert = verify_local(make_rat(1, 7));
    const MajorizationSample m = majorization_sampling(cert.J, make_rat(1, 7), 10'000, 11);
    CHECK(m.samples == 10'000);
    CHECK(m.violations == 0);
    CHECK(m.max_excess <= 0);
}
