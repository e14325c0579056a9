// SPDX-License-Identifier: Apache-2.0
//
// Feasible set of the projected problem: A = (0,-1) fixed, B and C on the
// unit circle, D in the closed unit disk, distances measured by the warp
// distance sqrt(2 - 2xx' - 2yy'). The z-coordinate of D never appears: for
// points of which at least one lies on the equator, the chord length equals
// the warp distance of their projections.

#pragma once

#include "hemicert/exact.hpp"

#include <array>
#include <cstdint>
#include <string>

namespace hemicert {

struct Point2 {
    Rat x;
    Rat y;
    friend bool operator==(const Point2&, const Point2&) = default;
};

/// The pinned point A.
Point2 point_a();

struct ParamVector {
    Rat s;
    Rat t;
    Rat u;
    Rat v;
};

struct Config {
    Point2 b;
    Point2 c;
    Point2 d;
};

/// 2 - 2(x_P x_Q + y_P y_Q); the warp distance is its square root.
Rat radicand(const Point2& p, const Point2& q);

/// Rational parametrization of B, C (on the circle) and D (in the disk).
/// Throws std::domain_error if D falls outside the unit disk.
Config config_from_params(const ParamVector& p);

/// The six radicands in the order AB, AC, AD, BC, BD, CD.
std::array<Rat, 6> config_radicands(const Config& c);

/// Encloses the six-distance objective; width <= 6 * 2^-k.
RatInterval distance_sum_exact_bounds(const Config& c, unsigned k);

/// Closed axis-aligned box.
struct Box2 {
    Rat x_lo;
    Rat x_hi;
    Rat y_lo;
    Rat y_hi;

    bool contains(const Box2& inner) const {
        return x_lo <= inner.x_lo && inner.x_hi <= x_hi && y_lo <= inner.y_lo && inner.y_hi <= y_hi;
    }
    bool contains(const Point2& p) const {
        return x_lo <= p.x && p.x <= x_hi && y_lo <= p.y && p.y <= y_hi;
    }
    /// "[x_lo,x_hi]x[y_lo,y_hi]".
    std::string to_string() const;
    friend bool operator==(const Box2&, const Box2&) = default;
};

/// Minimum and maximum of x^2 + y^2 over the box.
Rat box_min_norm2(const Box2& b);
Rat box_max_norm2(const Box2& b);
bool box_meets_circle(const Box2& b);
bool box_meets_disk(const Box2& b);

/// Excluded neighbourhood of the optimal square configuration.
struct NeighborhoodSpec {
    Rat delta1 = make_rat(1, 32);
    Rat delta2 = make_rat(1, 4);

    Box2 u_box() const { return {1 - delta1, Rat(1), -delta2, delta2}; }
    Box2 v_box() const { return {Rat(-1), -1 + delta1, -delta2, delta2}; }
    Box2 w1_box() const { return {-delta2, delta2, 1 - delta1, Rat(1)}; }
};

// ---------------------------------------------------------------------------
// Dyadic grid used by the cube search. Coordinates are integers in units of
// 1/kGridScale, so every box edge met by the search (1/8 down to 1/8192) is
// exactly representable.

inline constexpr int kGridBits = 13;
inline constexpr std::int64_t kGridScale = std::int64_t{1} << kGridBits;

enum class Factor : int { b = 0, c = 1, d = 2 };

/// Box in R^6, one square each for B, C and D. lo holds
/// (bx, by, cx, cy, dx, dy) lower corners in grid units.
struct Cube6 {
    std::array<std::int32_t, 6> lo{};
    std::int32_t edge = 0;  // grid units
    int depth = 0;

    Box2 box(Factor f) const;
    Rat edge_length() const { return make_rat(edge, kGridScale); }
    /// Chebyshev distance from the cube to the square configuration
    /// B=(1,0), C=(-1,0), D=(0,1).
    Rat distance_to_optimum() const;
    bool contains(const Config& c) const;
    std::string to_string() const;

    friend bool operator==(const Cube6&, const Cube6&) = default;
    friend bool operator<(const Cube6& a, const Cube6& b) {
        if (a.lo != b.lo) return a.lo < b.lo;
        return a.edge > b.edge;
    }
};

bool cube_in_neighborhood(const Cube6& c, const NeighborhoodSpec& n);

/// Grid-unit versions of the predicates, equal to the Rat ones.
bool grid_box_meets_circle(std::int64_t x, std::int64_t y, std::int64_t edge);
bool grid_box_meets_disk(std::int64_t x, std::int64_t y, std::int64_t edge);

/// Converts an edge like 1/32 to grid units; throws if not representable.
std::int32_t edge_to_grid(const Rat& edge);

}  // namespace hemicert
