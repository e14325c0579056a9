// SPDX-License-Identifier: Apache-2.0
//
// Values printed in the original computer-assisted proof, kept verbatim so
// runs can be compared against them. Timings are context only.

#pragma once

#include "hemicert/exact.hpp"

#include <array>
#include <cstdint>

namespace hemicert::reference {

// Global search.
inline constexpr std::uint64_t kCircleCells = 60;
inline constexpr std::uint64_t kDiskCells = 224;
inline constexpr std::uint64_t kInitialCover = 806'400;
inline constexpr std::uint64_t kStep1BoundSurvivors = 10'648;
inline constexpr std::uint64_t kStep1Survivors = 4'300;
inline constexpr std::uint64_t kStep2RawChildren = 17'612'800;
inline constexpr std::uint64_t kStep2Feasible = 1'105'782;
inline constexpr std::uint64_t kStep2BoundSurvivors = 844'917;
inline constexpr std::uint64_t kStep2Excluded = 2'048;
inline constexpr std::uint64_t kStep2SumEliminated = 823'663;
inline constexpr std::uint64_t kStep2Survivors = 19'206;
inline constexpr std::uint64_t kStep3ResolvedAt128 = 19'107;
inline constexpr std::uint64_t kStep3ResolvedAt512 = 199;
inline constexpr double kStep1Seconds = 15.922;
inline constexpr double kStep2Seconds = 1'170.266;
inline constexpr double kStep3Seconds = 8'777.250;

// Local analysis.
inline constexpr std::size_t kJTermCount = 1288;
inline constexpr int kJMinDegree = 2;
inline constexpr int kJMaxDegree = 24;
/// Term counts of H2..H24 as printed. The H3 entry is printed as 20, which
/// contradicts both the displayed H3 (6 terms) and the 1288 total.
inline constexpr std::array<std::size_t, 23> kHTermCountsPrinted = {
    9, 20, 28, 20, 59, 44, 101, 70, 134, 88, 145, 90, 133, 74, 100, 50, 59, 26, 29, 10, 10, 2, 1};
inline constexpr std::array<std::size_t, 23> kHTermCounts = {
    9, 6, 28, 20, 59, 44, 101, 70, 134, 88, 145, 90, 133, 74, 100, 50, 59, 26, 29, 10, 10, 2, 1};
/// Term counts of T(H_d) for d = 5..23.
inline constexpr std::array<std::size_t, 19> kThetaTermCounts = {
    20, 24, 44, 42, 70, 57, 88, 64, 90, 57, 74, 42, 50, 24, 26, 10, 10, 3, 2};
inline constexpr std::size_t kThetaTermCount = 797;

inline Rat res5_s2() { return make_rat(Integer("2223743956730603493021422"), Integer("2198957644322995555530531")); }
inline Rat res5_u2() { return make_rat(Integer("351460055057882361271126"), Integer("377598787408999236808273")); }
inline Rat res5_v2() { return make_rat(Integer("39371575001649787465938178"), Integer("37382279953490924444019027")); }

inline Rat k2_origin_value() { return make_rat(-62, 9); }
/// Critical point coordinate -2/79 + 9 sqrt2/79 (s and t), u = 0.
inline Q2Number k2_critical_coordinate() { return {make_rat(-2, 79), make_rat(9, 79)}; }

/// Final 3x3 matrix entries (00, 01, 02, 11, 12, 22).
inline std::array<Q2Number, 6> final_matrix_entries() {
    const Q2Number diag{make_rat(-1115, 98), make_rat(-2108, 147)};
    return {diag, Q2Number(-16), Q2Number(Rat(0), Rat(8)), diag, Q2Number(Rat(0), Rat(-8)),
            Q2Number(make_rat(146, 49), make_rat(-2024, 147))};
}

/// Printed bounds on the cubic and quartic parts.
inline Q2Number k30_bound_coefficient() { return {Rat(0), make_rat(8, 21)}; }
inline Q2Number k40_bound_st() { return {make_rat(52, 49), make_rat(22, 49)}; }
inline Q2Number k40_bound_u() { return {make_rat(24, 49), make_rat(36, 49)}; }
/// q2 diagonal additions for s^2 (and t^2) and u^2.
inline Q2Number q2_add_st() { return {make_rat(453, 196), make_rat(122, 147)}; }
inline Q2Number q2_add_u() { return {make_rat(73, 49), make_rat(164, 147)}; }

/// The objective at the square configuration and at the equilateral
/// triangle with D at the pole.
inline constexpr double kOptimumDecimal = 9.65685424;
inline constexpr double kEquilateralDecimal = 9.43879311;

}  // namespace hemicert::reference
