// SPDX-License-Identifier: Apache-2.0

#include "hemicert/search.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <chrono>
#include <functional>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace hemicert {

namespace {

constexpr std::int64_t L = kGridScale;
constexpr int kScaleBits = 2 * kGridBits;  // radicands are held in units of 1/L^2

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

Rat scaled_to_rat(std::int64_t m, unsigned k) { return make_rat(Integer(m), Integer(1) << k); }

std::int64_t min_product(std::int64_t a, std::int64_t b, std::int64_t e) {
    const std::int64_t a1 = a + e, b1 = b + e;
    return std::min({a * b, a * b1, a1 * b, a1 * b1});
}

// Max over the boxes of 2L^2 - 2(P.Q); the objective separates into x and y.
std::int64_t radicand_grid(std::int64_t px, std::int64_t py, std::int64_t qx, std::int64_t qy, std::int64_t e) {
    return 2 * L * L - 2 * (min_product(px, qx, e) + min_product(py, qy, e));
}

// A = (0, -L): 2L^2 + 2L * y, largest at the top edge.
std::int64_t radicand_grid_a(std::int64_t qy, std::int64_t e) { return 2 * L * L + 2 * L * (qy + e); }

// m = ceil(2^k sqrt(R / L^2)), the same value sqrt_upper(R / L^2, k) yields.
std::int64_t scaled_sqrt(std::int64_t radicand, unsigned k) {
    if (radicand <= 0) return 0;
    const int shift = 2 * static_cast<int>(k) - kScaleBits;
    unsigned __int128 x = static_cast<unsigned __int128>(radicand);
    if (shift >= 0) {
        x <<= shift;
    } else {
        const unsigned __int128 d = static_cast<unsigned __int128>(1) << (-shift);
        x = (x + d - 1) / d;
    }
    return static_cast<std::int64_t>(isqrt_ceil(x));
}

// Grid bounds of the neighbourhood boxes; nullopt if a bound is off the grid.
struct GridRect {
    std::int64_t x0, x1, y0, y1;
    bool contains(std::int64_t x, std::int64_t y, std::int64_t e) const {
        return x0 <= x && x + e <= x1 && y0 <= y && y + e <= y1;
    }
};

std::int64_t to_grid_exact(const Rat& q) {
    Rat scaled = q * L;
    if (scaled.get_den() != 1) throw std::invalid_argument("neighbourhood bound " + q.get_str() + " is off the grid");
    return scaled.get_num().get_si();
}

GridRect grid_rect(const Box2& b) {
    return {to_grid_exact(b.x_lo), to_grid_exact(b.x_hi), to_grid_exact(b.y_lo), to_grid_exact(b.y_hi)};
}

std::int64_t max_product(std::int64_t a, std::int64_t b, std::int64_t e) {
    const std::int64_t a1 = a + e, b1 = b + e;
    return std::max({a * b, a * b1, a1 * b, a1 * b1});
}

// The three chamber inequalities, each maximized over the B and C boxes:
// orient(A,B,C) >= 0, |BC|^2 >= |AB|^2, |BC|^2 >= |AC|^2.
bool grid_meets_chamber(std::int64_t bx, std::int64_t by, std::int64_t cx, std::int64_t cy, std::int64_t e) {
    // orient = bx (cy + L) - (by + L) cx
    if (max_product(bx, cy + L, e) - min_product(by + L, cx, e) < 0) return false;
    // |BC|^2 - |AB|^2 = 2(-bx cx - by (cy + L)) in units of 1/L^2
    if (-min_product(bx, cx, e) - min_product(by, cy + L, e) < 0) return false;
    // |BC|^2 - |AC|^2 = 2(-bx cx - cy (by + L))
    if (-min_product(bx, cx, e) - min_product(cy, by + L, e) < 0) return false;
    return true;
}

struct SubBox {
    std::int32_t x, y;
    bool in_neighborhood;
};

enum class Stage { bfs, dfs };

// Enumerates the feasible children of one parent with per-pair tables.
class ChildEngine {
public:
    ChildEngine(const SearchConfig& cfg, Stage stage)
        : k_(cfg.sqrt_precision),
          target_(std::int64_t{4} << cfg.sqrt_precision),
          use_filter_(stage == Stage::bfs && cfg.use_bound_filter),
          exclude_(stage == Stage::bfs && cfg.exclude_neighborhood),
          chamber_(cfg.symmetry_reduction),
          thresholds_(DistanceBoundTable::standard().scaled_thresholds(cfg.sqrt_precision)),
          rects_{grid_rect(cfg.neighborhood.u_box()), grid_rect(cfg.neighborhood.v_box()),
                 grid_rect(cfg.neighborhood.w1_box())} {}

    struct Counts {
        std::uint64_t raw = 0, feasible = 0, bound_passed = 0, excluded = 0, eliminated = 0, outside_chamber = 0,
                      survivors = 0;
    };

    // visit(child, verdict, scaled sum) for every feasible child in lex order.
    template <class Visit>
    Counts expand(const Cube6& parent, std::int32_t child_edge, Visit&& visit) {
        Counts n;
        const std::int64_t ratio = parent.edge / child_edge;
        const std::int64_t e = child_edge;
        for (int f = 0; f < 3; ++f) {
            auto& list = sub_[f];
            list.clear();
            for (std::int64_t i = 0; i < ratio; ++i)
                for (std::int64_t j = 0; j < ratio; ++j) {
                    const std::int64_t x = parent.lo[2 * f] + i * e, y = parent.lo[2 * f + 1] + j * e;
                    const bool ok = f == 2 ? grid_box_meets_disk(x, y, e) : grid_box_meets_circle(x, y, e);
                    if (ok)
                        list.push_back({static_cast<std::int32_t>(x), static_cast<std::int32_t>(y),
                                        exclude_ && rects_[f].contains(x, y, e)});
                }
        }
        const std::size_t nb = sub_[0].size(), nc = sub_[1].size(), nd = sub_[2].size();
        n.raw = static_cast<std::uint64_t>(ratio * ratio) * static_cast<std::uint64_t>(ratio * ratio) *
                static_cast<std::uint64_t>(ratio * ratio);
        n.feasible = nb * nc * nd;
        if (n.feasible == 0) return n;

        auto fill1 = [&](std::vector<std::int64_t>& t, const std::vector<SubBox>& q) {
            t.resize(q.size());
            for (std::size_t i = 0; i < q.size(); ++i) t[i] = scaled_sqrt(radicand_grid_a(q[i].y, e), k_);
        };
        auto fill2 = [&](std::vector<std::int64_t>& t, const std::vector<SubBox>& p, const std::vector<SubBox>& q) {
            t.resize(p.size() * q.size());
            for (std::size_t i = 0; i < p.size(); ++i)
                for (std::size_t j = 0; j < q.size(); ++j)
                    t[i * q.size() + j] = scaled_sqrt(radicand_grid(p[i].x, p[i].y, q[j].x, q[j].y, e), k_);
        };
        fill1(ab_, sub_[0]);
        fill1(ac_, sub_[1]);
        fill1(ad_, sub_[2]);
        fill2(bc_, sub_[0], sub_[1]);
        fill2(bd_, sub_[0], sub_[2]);
        fill2(cd_, sub_[1], sub_[2]);
        if (chamber_) {
            in_chamber_.resize(nb * nc);
            for (std::size_t b = 0; b < nb; ++b)
                for (std::size_t c = 0; c < nc; ++c)
                    in_chamber_[b * nc + c] =
                        grid_meets_chamber(sub_[0][b].x, sub_[0][b].y, sub_[1][c].x, sub_[1][c].y, e);
        }

        Cube6 child;
        child.edge = child_edge;
        child.depth = parent.depth + 1;
        for (std::size_t b = 0; b < nb; ++b) {
            child.lo[0] = sub_[0][b].x;
            child.lo[1] = sub_[0][b].y;
            for (std::size_t c = 0; c < nc; ++c) {
                child.lo[2] = sub_[1][c].x;
                child.lo[3] = sub_[1][c].y;
                const std::int64_t m_ab = ab_[b], m_ac = ac_[c], m_bc = bc_[b * nc + c];
                const bool chamber_ok = !chamber_ || in_chamber_[b * nc + c];
                for (std::size_t d = 0; d < nd; ++d) {
                    child.lo[4] = sub_[2][d].x;
                    child.lo[5] = sub_[2][d].y;
                    std::array<std::int64_t, kNumPairs> m = {m_ab, m_ac, ad_[d], m_bc, bd_[b * nd + d], cd_[c * nd + d]};
                    const std::int64_t sum = m[0] + m[1] + m[2] + m[3] + m[4] + m[5];
                    if (use_filter_ && !passes_filter(m)) {
                        visit(child, Verdict::eliminated_by_bound_filter, sum);
                        continue;
                    }
                    ++n.bound_passed;
                    if (exclude_ && sub_[0][b].in_neighborhood && sub_[1][c].in_neighborhood &&
                        sub_[2][d].in_neighborhood) {
                        ++n.excluded;
                        visit(child, Verdict::excluded_neighborhood, sum);
                        continue;
                    }
                    if (q2_sign_int(target_ - sum, target_) > 0) {
                        ++n.eliminated;
                        visit(child, Verdict::eliminated_by_sum_test, sum);
                    } else if (!chamber_ok) {
                        ++n.outside_chamber;
                        visit(child, Verdict::outside_symmetry_chamber, sum);
                    } else {
                        ++n.survivors;
                        visit(child, Verdict::subdivided, sum);
                    }
                }
            }
        }
        return n;
    }

    unsigned precision() const { return k_; }

private:
    bool passes_filter(std::array<std::int64_t, kNumPairs> m) const {
        std::sort(m.begin(), m.end());
        for (int i = 0; i < kNumPairs; ++i)
            if (m[i] < thresholds_[i]) return false;
        return true;
    }

    unsigned k_;
    std::int64_t target_;
    bool use_filter_;
    bool exclude_;
    bool chamber_;
    std::array<std::int64_t, kNumPairs> thresholds_;
    std::array<GridRect, 3> rects_;
    std::array<std::vector<SubBox>, 3> sub_;
    std::vector<std::int64_t> ab_, ac_, ad_, bc_, bd_, cd_;
    std::vector<char> in_chamber_;
};

// Runs fn(i) for i in [0, n) on up to `workers` threads.
void parallel_for(std::size_t n, unsigned workers, const std::function<void(std::size_t)>& fn) {
    workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
    if (workers == 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    std::exception_ptr error;
    std::mutex error_mutex;
    for (unsigned w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            try {
                for (std::size_t i = next++; i < n; i = next++) fn(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
                next = n;
            }
        });
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

constexpr std::size_t kChunk = 64;

}  // namespace

// ---------------------------------------------------------------------------

DistanceBoundTable DistanceBoundTable::standard() {
    return {{Q2Number(parse_rat("0.99200")), Q2Number(parse_rat("1.21895")), Q2Number(make_rat(4, 3)),
             Q2Number::sqrt2(), Q2Number(parse_rat("1.53137")), Q2Number(parse_rat("1.60947"))}};
}

std::array<std::int64_t, kNumPairs> DistanceBoundTable::scaled_thresholds(unsigned k) const {
    std::array<std::int64_t, kNumPairs> out{};
    const Integer scale = Integer(1) << k;
    for (int i = 0; i < kNumPairs; ++i) {
        const Q2Number& b = bounds[i];
        if (b.sign() < 0) throw std::invalid_argument("distance bounds must be nonnegative");
        // Smallest integer n with n >= b * 2^k: n = ceil(a 2^k + c 2^k sqrt2)
        // found by exact comparison around the double estimate.
        Integer n(static_cast<long>(std::floor(b.to_double() * std::ldexp(1.0, static_cast<int>(k)))) - 2);
        while (Q2Number(Rat(n)) < b * Q2Number(Rat(scale))) ++n;
        out[i] = n.get_si();
    }
    return out;
}

std::string_view to_string(RecordLevel r) { return r == RecordLevel::roots ? "roots" : "all"; }

RecordLevel parse_record_level(std::string_view text) {
    if (text == "roots") return RecordLevel::roots;
    if (text == "all") return RecordLevel::all;
    throw std::invalid_argument("unknown record level: " + std::string(text));
}

void SearchConfig::validate() const {
    if (bfs_edges.empty()) throw std::invalid_argument("at least one BFS edge is required");
    if (dfs_subdivision < 2) throw std::invalid_argument("dfs_subdivision must be >= 2");
    if (sqrt_precision < 1 || sqrt_precision > 48) throw std::invalid_argument("sqrt_precision must be in [1, 48]");
    std::int32_t prev = 2 * static_cast<std::int32_t>(L);
    for (const auto& e : bfs_edges) {
        const std::int32_t g = edge_to_grid(e);
        if (g >= prev || prev % g != 0)
            throw std::invalid_argument("BFS edge " + e.get_str() + " does not divide the previous edge");
        prev = g;
    }
    std::int32_t g = prev;
    const std::int32_t target = edge_to_grid(dfs_max_edge);
    while (g > target) {
        if (g % dfs_subdivision != 0) break;
        g /= dfs_subdivision;
    }
    if (g != target)
        throw std::invalid_argument("dfs_max_edge " + dfs_max_edge.get_str() +
                                    " is not reachable from the last BFS edge by the subdivision factor");
    if (target >= prev) throw std::invalid_argument("dfs_max_edge must be smaller than the last BFS edge");
    grid_rect(neighborhood.u_box());
    grid_rect(neighborhood.w1_box());
}

std::string_view to_string(Verdict v) {
    switch (v) {
        case Verdict::eliminated_by_bound_filter: return "eliminated_by_bound_filter";
        case Verdict::eliminated_by_sum_test: return "eliminated_by_sum_test";
        case Verdict::excluded_neighborhood: return "excluded_neighborhood";
        case Verdict::subdivided: return "subdivided";
        case Verdict::exhausted_depth: return "exhausted_depth";
        case Verdict::outside_symmetry_chamber: return "outside_symmetry_chamber";
    }
    return "?";
}

Verdict parse_verdict(std::string_view text) {
    for (auto v : {Verdict::eliminated_by_bound_filter, Verdict::eliminated_by_sum_test,
                   Verdict::excluded_neighborhood, Verdict::subdivided, Verdict::exhausted_depth,
                   Verdict::outside_symmetry_chamber})
        if (to_string(v) == text) return v;
    throw std::invalid_argument("unknown verdict: " + std::string(text));
}

// ---------------------------------------------------------------------------

std::array<Rat, kNumPairs> pair_radicand_max(const Cube6& cube) {
    const std::array<Box2, 4> boxes = {Box2{Rat(0), Rat(0), Rat(-1), Rat(-1)}, cube.box(Factor::b),
                                       cube.box(Factor::c), cube.box(Factor::d)};
    static constexpr std::array<std::pair<int, int>, kNumPairs> kPairs = {
        {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}};
    auto corner = [](const Box2& b, int i) {
        return Point2{i & 1 ? b.x_hi : b.x_lo, i & 2 ? b.y_hi : b.y_lo};
    };
    std::array<Rat, kNumPairs> out;
    for (int p = 0; p < kNumPairs; ++p) {
        const auto& [i, j] = kPairs[p];
        std::optional<Rat> best;
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b) {
                Rat r = radicand(corner(boxes[i], a), corner(boxes[j], b));
                if (!best || *best < r) best = r;
            }
        out[p] = *best;
    }
    return out;
}

Rat pair_distance_upper(const Cube6& cube, int pair, unsigned k) {
    if (pair < 0 || pair >= kNumPairs) throw std::out_of_range("pair index");
    Rat r = pair_radicand_max(cube)[pair];
    if (sgn(r) < 0) r = 0;
    return sqrt_upper(r, k);
}

std::array<std::int64_t, kNumPairs> pair_distance_upper_scaled(const Cube6& cube, unsigned k) {
    const auto& l = cube.lo;
    const std::int64_t e = cube.edge;
    return {scaled_sqrt(radicand_grid_a(l[1], e), k),
            scaled_sqrt(radicand_grid_a(l[3], e), k),
            scaled_sqrt(radicand_grid_a(l[5], e), k),
            scaled_sqrt(radicand_grid(l[0], l[1], l[2], l[3], e), k),
            scaled_sqrt(radicand_grid(l[0], l[1], l[4], l[5], e), k),
            scaled_sqrt(radicand_grid(l[2], l[3], l[4], l[5], e), k)};
}

bool passes_distance_bound_test(const Cube6& cube, const DistanceBoundTable& table, unsigned k) {
    auto m = pair_distance_upper_scaled(cube, k);
    const auto t = table.scaled_thresholds(k);
    std::sort(m.begin(), m.end());
    for (int i = 0; i < kNumPairs; ++i)
        if (m[i] < t[i]) return false;
    return true;
}

bool cube_meets_symmetry_chamber(const Cube6& cube) {
    const Box2 b = cube.box(Factor::b), c = cube.box(Factor::c);
    const Point2 a = point_a();
    auto corner = [](const Box2& x, int i) { return Point2{i & 1 ? x.x_hi : x.x_lo, i & 2 ? x.y_hi : x.y_lo}; };
    std::optional<Rat> orient, ab_gap, ac_gap;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            const Point2 p = corner(b, i), q = corner(c, j);
            const Rat o = (p.x - a.x) * (q.y - a.y) - (p.y - a.y) * (q.x - a.x);
            const Rat g1 = radicand(p, q) - radicand(a, p);
            const Rat g2 = radicand(p, q) - radicand(a, q);
            if (!orient || *orient < o) orient = o;
            if (!ab_gap || *ab_gap < g1) ab_gap = g1;
            if (!ac_gap || *ac_gap < g2) ac_gap = g2;
        }
    return sgn(*orient) >= 0 && sgn(*ab_gap) >= 0 && sgn(*ac_gap) >= 0;
}

CubeVerdict distance_sum_test(const Cube6& cube, unsigned k) {
    const auto m = pair_distance_upper_scaled(cube, k);
    std::int64_t sum = 0;
    for (auto x : m) sum += x;
    const std::int64_t target = std::int64_t{4} << k;
    CubeVerdict out{cube, Verdict::subdivided, scaled_to_rat(sum, k)};
    if (q2_sign_int(target - sum, target) > 0) out.verdict = Verdict::eliminated_by_sum_test;
    return out;
}

// ---------------------------------------------------------------------------

Cube6 root_cube() {
    Cube6 c;
    c.lo.fill(static_cast<std::int32_t>(-L));
    c.edge = static_cast<std::int32_t>(2 * L);
    c.depth = -1;
    return c;
}

InitialCells initial_cells() {
    const std::int32_t e = static_cast<std::int32_t>(L / 8);
    InitialCells out;
    for (std::int32_t x = -static_cast<std::int32_t>(L); x < L; x += e)
        for (std::int32_t y = -static_cast<std::int32_t>(L); y < L; y += e) {
            if (grid_box_meets_circle(x, y, e)) out.circle.emplace_back(x, y);
            if (grid_box_meets_disk(x, y, e)) out.disk.emplace_back(x, y);
        }
    return out;
}

std::vector<Cube6> build_initial_cover() {
    const std::int32_t e = static_cast<std::int32_t>(L / 8);
    const InitialCells cells = initial_cells();
    std::vector<Cube6> out;
    out.reserve(cells.circle.size() * cells.circle.size() * cells.disk.size());
    for (const auto& b : cells.circle)
        for (const auto& c : cells.circle)
            for (const auto& d : cells.disk) {
                Cube6 cube;
                cube.lo = {b.first, b.second, c.first, c.second, d.first, d.second};
                cube.edge = e;
                cube.depth = 0;
                out.push_back(cube);
            }
    return out;
}

RoundStats& RoundStats::operator+=(const RoundStats& o) {
    input_cubes += o.input_cubes;
    raw_children += o.raw_children;
    feasible += o.feasible;
    bound_filter_passed += o.bound_filter_passed;
    excluded += o.excluded;
    sum_eliminated += o.sum_eliminated;
    outside_chamber += o.outside_chamber;
    survivors += o.survivors;
    seconds += o.seconds;
    return *this;
}

BfsResult bfs_round(const std::vector<Cube6>& cubes, const Rat& next_edge, const SearchConfig& cfg) {
    const auto t0 = Clock::now();
    const std::int32_t child_edge = edge_to_grid(next_edge);
    for (const auto& c : cubes)
        if (c.edge <= child_edge || c.edge % child_edge != 0)
            throw std::invalid_argument("next edge " + next_edge.get_str() + " does not divide cube edge");
    const bool keep_all = cfg.records == RecordLevel::all;
    const unsigned k = cfg.sqrt_precision;

    struct Part {
        std::vector<Cube6> survivors;
        std::vector<CubeVerdict> records;
        RoundStats stats;
    };
    const std::size_t chunks = (cubes.size() + kChunk - 1) / kChunk;
    std::vector<Part> parts(chunks);
    parallel_for(chunks, cfg.worker_count, [&](std::size_t ci) {
        ChildEngine engine(cfg, Stage::bfs);
        Part& part = parts[ci];
        const std::size_t end = std::min(cubes.size(), (ci + 1) * kChunk);
        for (std::size_t i = ci * kChunk; i < end; ++i) {
            const auto n = engine.expand(cubes[i], child_edge, [&](const Cube6& child, Verdict v, std::int64_t sum) {
                if (v == Verdict::subdivided) {
                    part.survivors.push_back(child);
                } else if (v == Verdict::excluded_neighborhood || keep_all) {
                    const bool tested = v == Verdict::eliminated_by_sum_test;
                    part.records.push_back({child, v, tested ? scaled_to_rat(sum, k) : Rat(0)});
                }
            });
            part.stats.input_cubes += 1;
            part.stats.raw_children += n.raw;
            part.stats.feasible += n.feasible;
            part.stats.bound_filter_passed += n.bound_passed;
            part.stats.excluded += n.excluded;
            part.stats.sum_eliminated += n.eliminated;
            part.stats.outside_chamber += n.outside_chamber;
            part.stats.survivors += n.survivors;
        }
    });

    BfsResult out;
    out.stats.edge = next_edge;
    for (auto& p : parts) {
        out.stats += p.stats;
        out.survivors.insert(out.survivors.end(), p.survivors.begin(), p.survivors.end());
        out.records.insert(out.records.end(), std::make_move_iterator(p.records.begin()),
                           std::make_move_iterator(p.records.end()));
    }
    std::sort(out.survivors.begin(), out.survivors.end());
    std::sort(out.records.begin(), out.records.end(),
              [](const CubeVerdict& a, const CubeVerdict& b) { return a.cube < b.cube; });
    out.stats.seconds = seconds_since(t0);
    return out;
}

namespace {

class DfsRunner {
public:
    DfsRunner(const SearchConfig& cfg)
        : engine_(cfg, Stage::dfs), sub_(cfg.dfs_subdivision), max_edge_(edge_to_grid(cfg.dfs_max_edge)) {}

    DfsResult run(const Cube6& root) {
        result_ = DfsResult{};
        result_.root_bound = distance_sum_test(root, engine_.precision()).bound;
        result_.finest_edge = root.edge_length();
        result_.ok = visit(root, 1);
        return result_;
    }

private:
    bool visit(const Cube6& cube, int level) {
        const std::int32_t child_edge = cube.edge / sub_;
        std::vector<Cube6> failing;
        const auto n = engine_.expand(cube, child_edge, [&](const Cube6& child, Verdict v, std::int64_t) {
            if (v == Verdict::subdivided) failing.push_back(child);
        });
        result_.tested += n.feasible;
        if (level > result_.depth) {
            result_.depth = level;
            result_.finest_edge = make_rat(child_edge, L);
        }
        for (const auto& child : failing) {
            if (child_edge <= max_edge_) {
                result_.witness = child;
                return false;
            }
            if (!visit(child, level + 1)) return false;
        }
        return true;
    }

    ChildEngine engine_;
    std::int32_t sub_;
    std::int32_t max_edge_;
    DfsResult result_;
};

}  // namespace

DfsResult dfs_verify(const Cube6& root, const SearchConfig& cfg) {
    if (root.edge % cfg.dfs_subdivision != 0 || root.edge <= edge_to_grid(cfg.dfs_max_edge))
        throw std::invalid_argument("root cube cannot be subdivided down to dfs_max_edge");
    DfsRunner runner(cfg);
    return runner.run(root);
}

GlobalCertificate run_global(const SearchConfig& cfg) {
    cfg.validate();
    const auto t0 = Clock::now();
    GlobalCertificate cert;
    cert.config = cfg;

    std::vector<Cube6> frontier = {root_cube()};
    for (const auto& edge : cfg.bfs_edges) {
        BfsResult r = bfs_round(frontier, edge, cfg);
        cert.rounds.push_back(r.stats);
        for (auto& rec : r.records) cert.records.push_back({rec.cube, rec.verdict, rec.bound, -1});
        frontier = std::move(r.survivors);
    }

    const auto t_dfs = Clock::now();
    std::vector<DfsResult> results(frontier.size());
    const std::size_t chunks = (frontier.size() + kChunk - 1) / kChunk;
    parallel_for(chunks, cfg.worker_count, [&](std::size_t ci) {
        DfsRunner runner(cfg);
        const std::size_t end = std::min(frontier.size(), (ci + 1) * kChunk);
        for (std::size_t i = ci * kChunk; i < end; ++i) results[i] = runner.run(frontier[i]);
    });
    cert.dfs.roots = frontier.size();
    for (std::size_t i = 0; i < frontier.size(); ++i) {
        const auto& r = results[i];
        cert.dfs.tested += r.tested;
        cert.records.push_back({frontier[i], Verdict::subdivided, r.root_bound, r.depth});
        if (r.ok) {
            cert.dfs.resolved_at_edge[r.finest_edge] += 1;
        } else {
            cert.dfs.failures += 1;
            cert.witnesses.push_back(*r.witness);
            const auto w = distance_sum_test(*r.witness, cfg.sqrt_precision);
            cert.records.push_back({*r.witness, Verdict::exhausted_depth, w.bound, -1});
        }
    }
    cert.dfs.seconds = seconds_since(t_dfs);
    std::stable_sort(cert.records.begin(), cert.records.end(),
                     [](const CubeRecord& a, const CubeRecord& b) { return a.cube < b.cube; });
    std::sort(cert.witnesses.begin(), cert.witnesses.end());
    cert.valid = cert.dfs.failures == 0;
    cert.total_seconds = seconds_since(t0);
    return cert;
}

bool GlobalCertificate::same_content(const GlobalCertificate& o) const {
    const auto& a = config;
    const auto& b = o.config;
    const bool same_cfg = a.bfs_edges == b.bfs_edges && a.dfs_subdivision == b.dfs_subdivision &&
                          a.dfs_max_edge == b.dfs_max_edge && a.use_bound_filter == b.use_bound_filter &&
                          a.exclude_neighborhood == b.exclude_neighborhood &&
                          a.symmetry_reduction == b.symmetry_reduction && a.sqrt_precision == b.sqrt_precision &&
                          a.records == b.records && a.neighborhood.delta1 == b.neighborhood.delta1 &&
                          a.neighborhood.delta2 == b.neighborhood.delta2;
    return same_cfg && rounds == o.rounds && dfs == o.dfs && records == o.records && witnesses == o.witnesses &&
           valid == o.valid;
}

// ---------------------------------------------------------------------------

namespace {

constexpr std::string_view kGlobalHeader = "hemicert-global-certificate 1";

std::string edges_to_string(const std::vector<Rat>& edges) {
    std::string out;
    for (std::size_t i = 0; i < edges.size(); ++i) out += (i ? "," : "") + edges[i].get_str();
    return out;
}

std::vector<std::string_view> split_ws(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && s[i] == ' ') ++i;
        std::size_t j = i;
        while (j < s.size() && s[j] != ' ') ++j;
        if (j > i) out.push_back(s.substr(i, j - i));
        i = j;
    }
    return out;
}

// Parses "name=value" and checks the name.
std::string_view field(std::string_view token, std::string_view name) {
    if (token.size() <= name.size() || token.substr(0, name.size()) != name || token[name.size()] != '=')
        throw std::invalid_argument("expected field '" + std::string(name) + "'");
    return token.substr(name.size() + 1);
}

std::uint64_t parse_u64(std::string_view s) {
    std::size_t used = 0;
    const std::string str(s);
    const unsigned long long v = std::stoull(str, &used);
    if (used != str.size()) throw std::invalid_argument("bad integer '" + str + "'");
    return v;
}

long parse_long(std::string_view s) {
    std::size_t used = 0;
    const std::string str(s);
    const long v = std::stol(str, &used);
    if (used != str.size()) throw std::invalid_argument("bad integer '" + str + "'");
    return v;
}

bool parse_bool(std::string_view v) {
    if (v == "true") return true;
    if (v == "false") return false;
    throw std::invalid_argument("expected true/false");
}

const char* bool_str(bool b) { return b ? "true" : "false"; }

// "[a,b]x[c,d]" -> grid lower corner and edge.
void parse_box(std::string_view text, std::int32_t& x, std::int32_t& y, std::int32_t& edge) {
    auto bracket = [&](std::string_view t, Rat& lo, Rat& hi) {
        if (t.size() < 5 || t.front() != '[' || t.back() != ']') throw std::invalid_argument("bad interval");
        t = t.substr(1, t.size() - 2);
        const auto comma = t.find(',');
        if (comma == std::string_view::npos) throw std::invalid_argument("bad interval");
        lo = parse_rat(t.substr(0, comma));
        hi = parse_rat(t.substr(comma + 1));
    };
    const auto cross = text.find("]x[");
    if (cross == std::string_view::npos) throw std::invalid_argument("bad box");
    Rat x0, x1, y0, y1;
    bracket(text.substr(0, cross + 1), x0, x1);
    bracket(text.substr(cross + 2), y0, y1);
    const std::int64_t gx0 = to_grid_exact(x0), gx1 = to_grid_exact(x1);
    const std::int64_t gy0 = to_grid_exact(y0), gy1 = to_grid_exact(y1);
    if (gx1 - gx0 != gy1 - gy0 || gx1 <= gx0) throw std::invalid_argument("box is not a square");
    if (edge != 0 && edge != gx1 - gx0) throw std::invalid_argument("boxes of different size");
    x = static_cast<std::int32_t>(gx0);
    y = static_cast<std::int32_t>(gy0);
    edge = static_cast<std::int32_t>(gx1 - gx0);
}

}  // namespace

Cube6 parse_cube(std::string_view text) {
    const auto parts = split_ws(text);
    if (parts.size() != 3) throw std::invalid_argument("cube needs B=, C= and D= boxes");
    Cube6 c;
    c.edge = 0;
    parse_box(field(parts[0], "B"), c.lo[0], c.lo[1], c.edge);
    parse_box(field(parts[1], "C"), c.lo[2], c.lo[3], c.edge);
    parse_box(field(parts[2], "D"), c.lo[4], c.lo[5], c.edge);
    return c;
}

std::string serialize(const GlobalCertificate& cert) {
    std::ostringstream os;
    const auto& c = cert.config;
    os << kGlobalHeader << '\n';
    os << "config bfs_edges " << edges_to_string(c.bfs_edges) << '\n';
    os << "config dfs_subdivision " << c.dfs_subdivision << '\n';
    os << "config dfs_max_edge " << c.dfs_max_edge.get_str() << '\n';
    os << "config use_bound_filter " << bool_str(c.use_bound_filter) << '\n';
    os << "config exclude_neighborhood " << bool_str(c.exclude_neighborhood) << '\n';
    os << "config symmetry_reduction " << bool_str(c.symmetry_reduction) << '\n';
    os << "config sqrt_precision " << c.sqrt_precision << '\n';
    os << "config records " << to_string(c.records) << '\n';
    os << "config delta1 " << c.neighborhood.delta1.get_str() << '\n';
    os << "config delta2 " << c.neighborhood.delta2.get_str() << '\n';
    os << "valid " << bool_str(cert.valid) << '\n';
    for (std::size_t i = 0; i < cert.rounds.size(); ++i) {
        const auto& r = cert.rounds[i];
        os << "round " << i + 1 << " edge=" << r.edge.get_str() << " input=" << r.input_cubes
           << " raw=" << r.raw_children << " feasible=" << r.feasible << " bound_passed=" << r.bound_filter_passed
           << " excluded=" << r.excluded << " sum_eliminated=" << r.sum_eliminated << " outside_chamber=" << r.outside_chamber
           << " survivors=" << r.survivors
           << '\n';
    }
    os << "dfs roots=" << cert.dfs.roots << " failures=" << cert.dfs.failures << " tested=" << cert.dfs.tested
       << '\n';
    for (const auto& [edge, n] : cert.dfs.resolved_at_edge)
        os << "dfs_resolved edge=" << edge.get_str() << " roots=" << n << '\n';
    for (const auto& w : cert.witnesses) os << "witness depth=" << w.depth << ' ' << w.to_string() << '\n';
    for (const auto& r : cert.records)
        os << "record " << to_string(r.verdict) << " depth=" << r.cube.depth << " bound=" << r.bound.get_str()
           << " dfs_depth=" << r.dfs_depth << ' ' << r.cube.to_string() << '\n';
    for (std::size_t i = 0; i < cert.rounds.size(); ++i)
        os << "timing round " << i + 1 << " seconds=" << cert.rounds[i].seconds << '\n';
    os << "timing dfs seconds=" << cert.dfs.seconds << '\n';
    os << "timing total seconds=" << cert.total_seconds << '\n';
    os << "timing workers " << c.worker_count << '\n';
    return os.str();
}

GlobalCertificate parse_global_certificate(std::string_view text) {
    GlobalCertificate cert;
    cert.config.bfs_edges.clear();
    std::size_t pos = 0, line_no = 0;
    bool saw_header = false;
    while (pos < text.size()) {
        auto end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        const std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (line.empty()) continue;
        try {
            if (!saw_header) {
                if (line != kGlobalHeader) throw std::invalid_argument("missing certificate header");
                saw_header = true;
                continue;
            }
            const auto tok = split_ws(line);
            const auto& kind = tok[0];
            auto need = [&](std::size_t n) {
                if (tok.size() < n) throw std::invalid_argument("too few fields");
            };
            if (kind == "config") {
                need(3);
                const auto key = tok[1];
                const auto value = tok[2];
                auto& c = cert.config;
                if (key == "bfs_edges") {
                    std::size_t i = 0;
                    while (i <= value.size()) {
                        auto comma = value.find(',', i);
                        if (comma == std::string_view::npos) comma = value.size();
                        c.bfs_edges.push_back(parse_rat(value.substr(i, comma - i)));
                        i = comma + 1;
                    }
                } else if (key == "dfs_subdivision") c.dfs_subdivision = static_cast<int>(parse_long(value));
                else if (key == "dfs_max_edge") c.dfs_max_edge = parse_rat(value);
                else if (key == "use_bound_filter") c.use_bound_filter = parse_bool(value);
                else if (key == "exclude_neighborhood") c.exclude_neighborhood = parse_bool(value);
                else if (key == "symmetry_reduction") c.symmetry_reduction = parse_bool(value);
                else if (key == "sqrt_precision") c.sqrt_precision = static_cast<unsigned>(parse_u64(value));
                else if (key == "records") c.records = parse_record_level(value);
                else if (key == "delta1") c.neighborhood.delta1 = parse_rat(value);
                else if (key == "delta2") c.neighborhood.delta2 = parse_rat(value);
                else throw std::invalid_argument("unknown config key '" + std::string(key) + "'");
            } else if (kind == "valid") {
                need(2);
                cert.valid = parse_bool(tok[1]);
            } else if (kind == "round") {
                need(11);
                RoundStats r;
                r.edge = parse_rat(field(tok[2], "edge"));
                r.input_cubes = parse_u64(field(tok[3], "input"));
                r.raw_children = parse_u64(field(tok[4], "raw"));
                r.feasible = parse_u64(field(tok[5], "feasible"));
                r.bound_filter_passed = parse_u64(field(tok[6], "bound_passed"));
                r.excluded = parse_u64(field(tok[7], "excluded"));
                r.sum_eliminated = parse_u64(field(tok[8], "sum_eliminated"));
                r.outside_chamber = parse_u64(field(tok[9], "outside_chamber"));
                r.survivors = parse_u64(field(tok[10], "survivors"));
                cert.rounds.push_back(r);
            } else if (kind == "dfs") {
                need(4);
                cert.dfs.roots = parse_u64(field(tok[1], "roots"));
                cert.dfs.failures = parse_u64(field(tok[2], "failures"));
                cert.dfs.tested = parse_u64(field(tok[3], "tested"));
            } else if (kind == "dfs_resolved") {
                need(3);
                cert.dfs.resolved_at_edge[parse_rat(field(tok[1], "edge"))] = parse_u64(field(tok[2], "roots"));
            } else if (kind == "witness") {
                need(5);
                Cube6 w = parse_cube(line.substr(line.find("B=")));
                w.depth = static_cast<int>(parse_long(field(tok[1], "depth")));
                cert.witnesses.push_back(w);
            } else if (kind == "record") {
                need(8);
                CubeRecord r;
                r.verdict = parse_verdict(tok[1]);
                r.bound = parse_rat(field(tok[3], "bound"));
                r.dfs_depth = static_cast<int>(parse_long(field(tok[4], "dfs_depth")));
                r.cube = parse_cube(line.substr(line.find("B=")));
                r.cube.depth = static_cast<int>(parse_long(field(tok[2], "depth")));
                cert.records.push_back(std::move(r));
            } else if (kind == "timing") {
                need(3);
                if (tok[1] == "round") {
                    need(4);
                    const auto i = parse_u64(tok[2]);
                    if (i == 0 || i > cert.rounds.size()) throw std::invalid_argument("timing for unknown round");
                    cert.rounds[i - 1].seconds = std::stod(std::string(field(tok[3], "seconds")));
                } else if (tok[1] == "dfs") {
                    cert.dfs.seconds = std::stod(std::string(field(tok[2], "seconds")));
                } else if (tok[1] == "total") {
                    cert.total_seconds = std::stod(std::string(field(tok[2], "seconds")));
                } else if (tok[1] == "workers") {
                    cert.config.worker_count = static_cast<unsigned>(parse_u64(tok[2]));
                } else {
                    throw std::invalid_argument("unknown timing line");
                }
            } else {
                throw std::invalid_argument("unknown line kind '" + std::string(kind) + "'");
            }
        } catch (const std::exception& e) {
            throw std::invalid_argument("global certificate line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    if (!saw_header) throw std::invalid_argument("global certificate line 1: missing certificate header");
    return cert;
}

}  // namespace hemicert
