// SPDX-License-Identifier: Apache-2.0
//
// Floating-point cross-checks. Nothing here enters a certificate; these
// routines guard the exact engine against implementation mistakes.

#pragma once

#include "hemicert/exact.hpp"
#include "hemicert/geometry.hpp"
#include "hemicert/poly.hpp"

#include <array>
#include <cstdint>

namespace hemicert {

/// (s, t, u, v) in the parametrization of config_from_params.
using ParamsD = std::array<double, 4>;

struct PointsD {
    std::array<double, 2> b{}, c{}, d{};
};

PointsD points_from_params(const ParamsD& p);
/// Sum of the six warp distances with A = (0, -1).
double objective(const PointsD& x);
double objective(const ParamsD& p);

/// The same objective in `bits`-bit floating point (GMP mpf).
mpf_class objective_hp(const Config& c, unsigned bits);
mpf_class objective_hp(const ParamsD& p, unsigned bits);

/// ABC counterclockwise and BC the longest side, as in the cube search.
bool in_symmetry_chamber(const PointsD& x);

struct OracleDomain {
    double v_min = 0;       // v in [v_min, 1]
    bool chamber = true;    // restrict to the labelling chamber
};

struct NumericMax {
    ParamsD params{};
    double value = 0;
};

/// Projected coordinate ascent from `start` over s, t in [-1, 1],
/// v in [v_min, 1], |u| <= v.
NumericMax local_ascent(ParamsD start, const OracleDomain& domain = {});

/// Multi-start local ascent; restart i draws its start from a stream seeded
/// by (seed, i), so results do not depend on evaluation order.
NumericMax numeric_max_search(int restarts, std::uint64_t seed, const OracleDomain& domain = {});

struct Criticality {
    std::array<double, 4> partials{};  // central in s, t, u; forward in v
    double max_abs = 0;                // over all four partials
};

Criticality criticality_check(const ParamsD& p, double h);

/// Samples n feasible configurations in the cube (B, C radially projected
/// onto the circle, D rejected outside the disk) and checks the objective,
/// evaluated in 200-bit floating point, against `bound`. Without a bound the
/// cube's certified distance-sum bound is used.
bool sample_soundness(const Cube6& cube, int n, std::uint64_t seed);
bool sample_soundness(const Cube6& cube, int n, std::uint64_t seed, const Rat& bound);

struct MajorizationSample {
    int samples = 0;
    int violations = 0;
    double max_excess = 0;  // largest f - (4 + 4 sqrt2 + J/(8 Pi)) seen
};

/// Checks f <= 4 + 4 sqrt2 + J / (8 Pi) + 2^-20 at random dyadic points of
/// [-r0, r0]^4 with s + t >= 0, v >= 0, |u| <= v. f is bounded above with
/// certified square roots and J is evaluated exactly; the point is mapped to
/// a configuration with local_params_to_config.
MajorizationSample majorization_sampling(const MultiPoly& J, const Rat& r0, int n, std::uint64_t seed);

}  // namespace hemicert
