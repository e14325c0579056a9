// SPDX-License-Identifier: Apache-2.0

#include "hemicert/oracle.hpp"

#include "hemicert/local.hpp"
#include "hemicert/search.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <random>

namespace hemicert {

namespace {

double warp(const std::array<double, 2>& p, const std::array<double, 2>& q) {
    return std::sqrt(std::max(0.0, 2 - 2 * (p[0] * q[0] + p[1] * q[1])));
}

constexpr std::array<double, 2> kA = {0, -1};

ParamsD project(ParamsD p, const OracleDomain& dom) {
    p[0] = std::clamp(p[0], -1.0, 1.0);
    p[1] = std::clamp(p[1], -1.0, 1.0);
    p[3] = std::clamp(p[3], dom.v_min, 1.0);
    p[2] = std::clamp(p[2], -p[3], p[3]);
    return p;
}

bool admissible(const ParamsD& p, const OracleDomain& dom) {
    return !dom.chamber || in_symmetry_chamber(points_from_params(p));
}

mpf_class mpf_sqrt_clamped(const mpf_class& x, unsigned bits) {
    mpf_class out(0, bits);
    if (sgn(x) > 0) out = sqrt(x);
    return out;
}

}  // namespace

PointsD points_from_params(const ParamsD& p) {
    const auto [s, t, u, v] = p;
    PointsD x;
    x.b = {(1 - s * s) / (1 + s * s), 2 * s / (1 + s * s)};
    x.c = {-(1 - t * t) / (1 + t * t), 2 * t / (1 + t * t)};
    x.d = {2 * u / (1 + u * u), (1 - v * v) / (1 + v * v)};
    return x;
}

double objective(const PointsD& x) {
    return warp(kA, x.b) + warp(kA, x.c) + warp(kA, x.d) + warp(x.b, x.c) + warp(x.b, x.d) + warp(x.c, x.d);
}

double objective(const ParamsD& p) { return objective(points_from_params(p)); }

mpf_class objective_hp(const Config& c, unsigned bits) {
    const std::array<Point2, 4> pts = {point_a(), c.b, c.c, c.d};
    std::array<mpf_class, 4> x, y;
    for (int i = 0; i < 4; ++i) {
        x[i] = mpf_class(pts[i].x, bits);
        y[i] = mpf_class(pts[i].y, bits);
    }
    mpf_class sum(0, bits);
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j) {
            mpf_class r(2 - 2 * (x[i] * x[j] + y[i] * y[j]), bits);
            sum += mpf_sqrt_clamped(r, bits);
        }
    return sum;
}

mpf_class objective_hp(const ParamsD& p, unsigned bits) {
    std::array<mpf_class, 4> q;
    for (int i = 0; i < 4; ++i) q[i] = mpf_class(p[i], bits);
    auto on_circle = [&](const mpf_class& w, int sign) {
        mpf_class den(1 + w * w, bits);
        return std::array<mpf_class, 2>{mpf_class(sign * (1 - w * w) / den, bits), mpf_class(2 * w / den, bits)};
    };
    const auto b = on_circle(q[0], 1);
    const auto c = on_circle(q[1], -1);
    const std::array<mpf_class, 2> d = {mpf_class(2 * q[2] / (1 + q[2] * q[2]), bits),
                                        mpf_class((1 - q[3] * q[3]) / (1 + q[3] * q[3]), bits)};
    const std::array<mpf_class, 2> a = {mpf_class(0, bits), mpf_class(-1, bits)};
    const std::array<const std::array<mpf_class, 2>*, 4> pts = {&a, &b, &c, &d};
    mpf_class sum(0, bits);
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j) {
            const auto& P = *pts[i];
            const auto& Q = *pts[j];
            mpf_class r(2 - 2 * (P[0] * Q[0] + P[1] * Q[1]), bits);
            sum += mpf_sqrt_clamped(r, bits);
        }
    return sum;
}

bool in_symmetry_chamber(const PointsD& x) {
    const auto& b = x.b;
    const auto& c = x.c;
    const double orient = (b[0] - kA[0]) * (c[1] - kA[1]) - (b[1] - kA[1]) * (c[0] - kA[0]);
    const double bc = 2 - 2 * (b[0] * c[0] + b[1] * c[1]);
    const double ab = 2 - 2 * (kA[0] * b[0] + kA[1] * b[1]);
    const double ac = 2 - 2 * (kA[0] * c[0] + kA[1] * c[1]);
    return orient >= 0 && bc >= ab && bc >= ac;
}

NumericMax local_ascent(ParamsD start, const OracleDomain& domain) {
    static constexpr std::array<std::array<double, 4>, 8> kDirs = {{
        {1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 1, 0}, {0, 0, 0, 1},
        {1, 1, 0, 0}, {1, -1, 0, 0}, {0, 0, 1, 1}, {0, 0, 1, -1},
    }};
    NumericMax best{project(start, domain), 0};
    best.value = objective(best.params);
    for (double h = 0.125; h > 1e-13; h *= 0.5) {
        bool improved = true;
        while (improved) {
            improved = false;
            for (const auto& dir : kDirs)
                for (double sign : {1.0, -1.0}) {
                    ParamsD q = best.params;
                    for (int i = 0; i < 4; ++i) q[i] += sign * h * dir[i];
                    q = project(q, domain);
                    if (!admissible(q, domain)) continue;
                    const double value = objective(q);
                    if (value > best.value) {
                        best = {q, value};
                        improved = true;
                    }
                }
        }
    }
    return best;
}

NumericMax numeric_max_search(int restarts, std::uint64_t seed, const OracleDomain& domain) {
    NumericMax best{{0, 0, 0, 0}, -1};
    for (int i = 0; i < restarts; ++i) {
        std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                          static_cast<std::uint32_t>(i)};
        std::mt19937_64 rng(seq);
        std::uniform_real_distribution<double> unit(-1.0, 1.0);
        std::uniform_real_distribution<double> vdist(domain.v_min, 1.0);
        ParamsD start{};
        for (int tries = 0; tries < 1000; ++tries) {
            const double v = vdist(rng);
            start = {unit(rng), unit(rng), v * unit(rng), v};
            if (admissible(start, domain)) break;
        }
        const NumericMax r = local_ascent(start, domain);
        if (r.value > best.value) best = r;
    }
    return best;
}

Criticality criticality_check(const ParamsD& p, double h) {
    Criticality out;
    const double f0 = objective(p);
    for (int i = 0; i < 4; ++i) {
        ParamsD plus = p, minus = p;
        plus[i] += h;
        minus[i] -= h;
        out.partials[i] = i == 3 ? (objective(plus) - f0) / h : (objective(plus) - objective(minus)) / (2 * h);
        out.max_abs = std::max(out.max_abs, std::abs(out.partials[i]));
    }
    return out;
}

namespace {

// Uniform point of box, radially projected onto the circle; nullopt if the
// projection leaves the box every time.
std::optional<std::array<double, 2>> sample_on_arc(const Box2& box, std::mt19937_64& rng) {
    const double x0 = box.x_lo.get_d(), x1 = box.x_hi.get_d(), y0 = box.y_lo.get_d(), y1 = box.y_hi.get_d();
    std::uniform_real_distribution<double> ux(x0, x1), uy(y0, y1);
    for (int i = 0; i < 200; ++i) {
        const double x = ux(rng), y = uy(rng);
        const double r = std::hypot(x, y);
        if (r == 0) continue;
        const double px = x / r, py = y / r;
        if (px >= x0 && px <= x1 && py >= y0 && py <= y1) return std::array<double, 2>{px, py};
    }
    return std::nullopt;
}

std::optional<std::array<double, 2>> sample_in_disk(const Box2& box, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> ux(box.x_lo.get_d(), box.x_hi.get_d());
    std::uniform_real_distribution<double> uy(box.y_lo.get_d(), box.y_hi.get_d());
    for (int i = 0; i < 200; ++i) {
        const double x = ux(rng), y = uy(rng);
        if (x * x + y * y <= 1) return std::array<double, 2>{x, y};
    }
    return std::nullopt;
}

Rat exact(double x) { return Rat(x); }

}  // namespace

bool sample_soundness(const Cube6& cube, int n, std::uint64_t seed) {
    Rat bound = 0;
    for (int p = 0; p < kNumPairs; ++p) bound += pair_distance_upper(cube, p, kDefaultSqrtPrecision);
    return sample_soundness(cube, n, seed, bound);
}

bool sample_soundness(const Cube6& cube, int n, std::uint64_t seed, const Rat& bound) {
    constexpr unsigned kBits = 200;
    std::mt19937_64 rng(seed);
    const mpf_class limit(mpf_class(bound, kBits) + mpf_class(std::ldexp(1.0, -150), kBits), kBits);
    for (int i = 0; i < n; ++i) {
        const auto b = sample_on_arc(cube.box(Factor::b), rng);
        const auto c = sample_on_arc(cube.box(Factor::c), rng);
        const auto d = sample_in_disk(cube.box(Factor::d), rng);
        if (!b || !c || !d) continue;
        const Config cfg{{exact((*b)[0]), exact((*b)[1])}, {exact((*c)[0]), exact((*c)[1])},
                         {exact((*d)[0]), exact((*d)[1])}};
        if (objective_hp(cfg, kBits) > limit) return false;
    }
    return true;
}

MajorizationSample majorization_sampling(const MultiPoly& J, const Rat& r0, int n, std::uint64_t seed) {
    constexpr int kBits = 20;
    const Integer den = Integer(1) << kBits;
    const Integer span = Integer(r0 * Rat(den));  // floor(r0 * 2^20)
    const long m = span.get_si();
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<long> pick(-m, m);
    std::uniform_int_distribution<long> pick_pos(0, m);
    const Q2Number slack(make_rat(Integer(1), den));
    const DyadicEvaluator eval(J, kBits);
    MajorizationSample out;
    out.max_excess = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
        long s = pick(rng), t = pick(rng);
        if (s + t < 0) {
            s = -s;
            t = -t;
        }
        const long v = pick_pos(rng);
        const long u = std::uniform_int_distribution<long>(-v, v)(rng);
        const ParamVector p{make_rat(Integer(s), den), make_rat(Integer(t), den), make_rat(Integer(u), den),
                            make_rat(Integer(v), den)};
        Rat pi = 8;
        for (const auto& w : {p.s, p.t, p.u, p.v}) {
            const Rat q = 1 + w * w;
            pi *= q * q * q;
        }
        const Rat f_upper = distance_sum_exact_bounds(local_params_to_config(p), 40).hi;
        const Q2Number rhs = optimum_value() + eval({s, t, u, v}) * Q2Number(1 / pi) + slack;
        const Q2Number gap = Q2Number(f_upper) - rhs;
        ++out.samples;
        if (gap.sign() > 0) ++out.violations;
        out.max_excess = std::max(out.max_excess, (gap - slack).to_double());
    }
    return out;
}

}  // namespace hemicert
