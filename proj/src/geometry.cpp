// SPDX-License-Identifier: Apache-2.0

#include "hemicert/geometry.hpp"

#include <algorithm>
#include <stdexcept>

namespace hemicert {

Point2 point_a() { return {Rat(0), Rat(-1)}; }

Rat radicand(const Point2& p, const Point2& q) { return 2 - 2 * (p.x * q.x + p.y * q.y); }

Config config_from_params(const ParamVector& p) {
    Config c;
    const Rat s2 = p.s * p.s, t2 = p.t * p.t, u2 = p.u * p.u, v2 = p.v * p.v;
    c.b = {(1 - s2) / (1 + s2), 2 * p.s / (1 + s2)};
    c.c = {-(1 - t2) / (1 + t2), 2 * p.t / (1 + t2)};
    c.d = {2 * p.u / (1 + u2), (1 - v2) / (1 + v2)};
    if (c.d.x * c.d.x + c.d.y * c.d.y > 1) throw std::domain_error("D lies outside the unit disk");
    return c;
}

std::array<Rat, 6> config_radicands(const Config& c) {
    const Point2 a = point_a();
    return {radicand(a, c.b), radicand(a, c.c), radicand(a, c.d),
            radicand(c.b, c.c), radicand(c.b, c.d), radicand(c.c, c.d)};
}

RatInterval distance_sum_exact_bounds(const Config& c, unsigned k) {
    Rat lo(0), hi(0);
    for (const Rat& r : config_radicands(c)) {
        // Rounding can leave tiny negative radicands only through invalid
        // input; the parametrized points keep them in [0, 4].
        lo += sqrt_lower(r, k);
        hi += sqrt_upper(r, k);
    }
    return {lo, hi};
}

std::string Box2::to_string() const {
    return "[" + x_lo.get_str() + "," + x_hi.get_str() + "]x[" + y_lo.get_str() + "," +
           y_hi.get_str() + "]";
}

namespace {

Rat nearest_to_zero(const Rat& lo, const Rat& hi) {
    if (sgn(lo) <= 0 && sgn(hi) >= 0) return Rat(0);
    return sgn(lo) > 0 ? lo : hi;
}

Rat farthest_from_zero(const Rat& lo, const Rat& hi) { return abs(lo) > abs(hi) ? abs(lo) : abs(hi); }

}  // namespace

Rat box_min_norm2(const Box2& b) {
    Rat x = nearest_to_zero(b.x_lo, b.x_hi);
    Rat y = nearest_to_zero(b.y_lo, b.y_hi);
    return x * x + y * y;
}

Rat box_max_norm2(const Box2& b) {
    Rat x = farthest_from_zero(b.x_lo, b.x_hi);
    Rat y = farthest_from_zero(b.y_lo, b.y_hi);
    return x * x + y * y;
}

bool box_meets_circle(const Box2& b) { return box_min_norm2(b) <= 1 && box_max_norm2(b) >= 1; }

bool box_meets_disk(const Box2& b) { return box_min_norm2(b) <= 1; }

Box2 Cube6::box(Factor f) const {
    const int i = 2 * static_cast<int>(f);
    return {make_rat(lo[i], kGridScale), make_rat(lo[i] + edge, kGridScale),
            make_rat(lo[i + 1], kGridScale), make_rat(lo[i + 1] + edge, kGridScale)};
}

Rat Cube6::distance_to_optimum() const {
    static constexpr std::array<std::int64_t, 6> kTarget = {kGridScale, 0, -kGridScale, 0, 0, kGridScale};
    std::int64_t worst = 0;
    for (int i = 0; i < 6; ++i) {
        const std::int64_t a = lo[i], b = std::int64_t{lo[i]} + edge;
        std::int64_t gap = 0;
        if (kTarget[i] < a) gap = a - kTarget[i];
        if (kTarget[i] > b) gap = kTarget[i] - b;
        worst = std::max(worst, gap);
    }
    return make_rat(worst, kGridScale);
}

bool Cube6::contains(const Config& c) const {
    return box(Factor::b).contains(c.b) && box(Factor::c).contains(c.c) && box(Factor::d).contains(c.d);
}

std::string Cube6::to_string() const {
    return "B=" + box(Factor::b).to_string() + " C=" + box(Factor::c).to_string() +
           " D=" + box(Factor::d).to_string();
}

bool cube_in_neighborhood(const Cube6& c, const NeighborhoodSpec& n) {
    return n.u_box().contains(c.box(Factor::b)) && n.v_box().contains(c.box(Factor::c)) &&
           n.w1_box().contains(c.box(Factor::d));
}

namespace {

std::int64_t grid_nearest(std::int64_t lo, std::int64_t hi) {
    if (lo <= 0 && hi >= 0) return 0;
    return lo > 0 ? lo : -hi;
}

std::int64_t grid_farthest(std::int64_t lo, std::int64_t hi) { return std::max(std::abs(lo), std::abs(hi)); }

constexpr std::int64_t kUnit2 = kGridScale * kGridScale;

}  // namespace

bool grid_box_meets_circle(std::int64_t x, std::int64_t y, std::int64_t edge) {
    const std::int64_t nx = grid_nearest(x, x + edge), ny = grid_nearest(y, y + edge);
    const std::int64_t fx = grid_farthest(x, x + edge), fy = grid_farthest(y, y + edge);
    return nx * nx + ny * ny <= kUnit2 && fx * fx + fy * fy >= kUnit2;
}

bool grid_box_meets_disk(std::int64_t x, std::int64_t y, std::int64_t edge) {
    const std::int64_t nx = grid_nearest(x, x + edge), ny = grid_nearest(y, y + edge);
    return nx * nx + ny * ny <= kUnit2;
}

std::int32_t edge_to_grid(const Rat& edge) {
    Rat scaled = edge * kGridScale;
    if (sgn(edge) <= 0 || scaled.get_den() != 1 || scaled > Rat(2 * kGridScale))
        throw std::invalid_argument("edge " + edge.get_str() + " is not a positive multiple of 1/" +
                                    std::to_string(kGridScale));
    return static_cast<std::int32_t>(scaled.get_num().get_si());
}

}  // namespace hemicert
