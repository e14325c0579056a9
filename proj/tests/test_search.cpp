// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hemicert/search.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

using namespace hemicert;

namespace {

Cube6 make_cube(std::array<Rat, 6> lo, const Rat& edge) {
    Cube6 c;
    c.edge = edge_to_grid(edge);
    for (int i = 0; i < 6; ++i) {
        const Rat g = lo[i] * kGridScale;
        REQUIRE(g.get_den() == 1);
        c.lo[i] = static_cast<std::int32_t>(g.get_num().get_si());
    }
    return c;
}

Cube6 square_cube(std::int32_t edge) {
    Cube6 c;
    c.edge = edge;
    c.lo = {static_cast<std::int32_t>(kGridScale - edge), 0, static_cast<std::int32_t>(-kGridScale), 0, 0,
            static_cast<std::int32_t>(kGridScale - edge)};
    return c;
}

Config random_config(std::mt19937_64& rng) {
    std::uniform_int_distribution<long> n(-4000, 4000), m(0, 1000), f(-1000, 1000);
    const Rat v = make_rat(m(rng), 1000);
    return config_from_params({make_rat(n(rng), 1000), make_rat(n(rng), 1000), v * make_rat(f(rng), 1000), v});
}

// Grid-aligned cube of the given edge (grid units) containing the configuration.
Cube6 cube_around(const Config& c, std::int32_t edge) {
    const std::array<Rat, 6> x = {c.b.x, c.b.y, c.c.x, c.c.y, c.d.x, c.d.y};
    Cube6 cube;
    cube.edge = edge;
    for (int i = 0; i < 6; ++i) {
        const Rat g = x[i] * kGridScale / edge;
        Integer q = g.get_num() / g.get_den();  // truncation
        if (sgn(g) < 0 && Rat(q) != g) q -= 1;
        cube.lo[i] = static_cast<std::int32_t>(q.get_si() * edge);
    }
    return cube;
}

// Every grid-aligned cube of the given edge containing the configuration.
std::vector<Cube6> all_cubes_around(const Config& c, std::int32_t edge) {
    const std::array<Rat, 6> x = {c.b.x, c.b.y, c.c.x, c.c.y, c.d.x, c.d.y};
    const Cube6 base = cube_around(c, edge);
    std::vector<Cube6> out;
    for (int mask = 0; mask < 64; ++mask) {
        Cube6 cube = base;
        bool ok = true;
        for (int i = 0; i < 6 && ok; ++i)
            if (mask >> i & 1) {
                cube.lo[i] -= edge;
                ok = make_rat(base.lo[i], kGridScale) == x[i];
            }
        if (ok) out.push_back(cube);
    }
    return out;
}

const std::vector<Cube6>& cover() {
    static const std::vector<Cube6> c = [] {
        auto v = build_initial_cover();
        std::sort(v.begin(), v.end());
        return v;
    }();
    return c;
}

SearchConfig trustless() { return SearchConfig{}; }

SearchConfig paper() {
    SearchConfig c;
    c.use_bound_filter = true;
    return c;
}

const GlobalCertificate& default_run() {
    static const GlobalCertificate c = run_global(trustless());
    return c;
}

std::string without_timings(const std::string& text) {
    std::istringstream in(text);
    std::string line, out;
    while (std::getline(in, line))
        if (line.rfind("timing", 0) != 0) out += line + "\n";
    return out;
}

double max_radicand_sqrt_sum(const Cube6& cube) {
    double sum = 0;
    for (const Rat& r : pair_radicand_max(cube)) sum += std::sqrt(r.get_d());
    return sum;
}

}  // namespace

TEST_CASE("distance lower bound table") {
    const DistanceBoundTable t = DistanceBoundTable::standard();
    CHECK(t.bounds[0] == Q2Number(make_rat(992, 1000)));
    CHECK(t.bounds[2] == Q2Number(make_rat(4, 3)));
    CHECK(t.bounds[3] == Q2Number::sqrt2());
    CHECK(std::is_sorted(t.bounds.begin(), t.bounds.end()));
    const auto scaled = t.scaled_thresholds(30);
    for (int i = 0; i < kNumPairs; ++i) {
        const Q2Number n(Rat(static_cast<long>(scaled[i])));
        const Q2Number scale(Rat(Integer(1) << 30));
        CHECK(n >= t.bounds[i] * scale);
        CHECK(n - Q2Number(1) < t.bounds[i] * scale);
    }
}

TEST_CASE("the initial cover has 806400 cubes and covers random configurations") {
    CHECK(cover().size() == 806400);
    CHECK(std::adjacent_find(cover().begin(), cover().end()) == cover().end());
    std::mt19937_64 rng(83);
    int uncovered = 0;
    for (int i = 0; i < 100'000; ++i) {
        const auto cands = all_cubes_around(random_config(rng), static_cast<std::int32_t>(kGridScale / 8));
        const bool hit = std::any_of(cands.begin(), cands.end(), [](const Cube6& c) {
            return std::binary_search(cover().begin(), cover().end(), c);
        });
        if (!hit) ++uncovered;
    }
    CHECK(uncovered == 0);
}

TEST_CASE("pair distance upper bounds at the square configuration") {
    const Cube6 point = square_cube(1);
    const auto r = pair_radicand_max(point);
    // AB, AC, BD, CD are sqrt2 apart at the optimum; AD and BC are diameters.
    CHECK(r[2] == 4);
    CHECK(r[3] == 4);
    CHECK(r[0] > 2);
    CHECK(pair_distance_upper(point, 2, 30) == 2);
    CHECK(pair_distance_upper(point, 0, 10) >= sqrt_upper(Rat(2), 10));
    CHECK_THROWS_AS(pair_distance_upper(point, 6, 10), std::out_of_range);
}

TEST_CASE("pair bounds dominate exact distances of contained configurations") {
    std::mt19937_64 rng(89);
    std::uniform_int_distribution<int> shift(3, 10);
    int violations = 0;
    for (int i = 0; i < 1000; ++i) {
        const std::int32_t edge = static_cast<std::int32_t>(kGridScale >> shift(rng));
        const Config anchor = random_config(rng);
        const Cube6 cube = cube_around(anchor, edge);
        const auto scaled = pair_distance_upper_scaled(cube, 30);
        std::array<Rat, kNumPairs> upper;
        for (int p = 0; p < kNumPairs; ++p) {
            upper[p] = pair_distance_upper(cube, p, 30);
            if (upper[p] != make_rat(scaled[p], Integer(1) << 30)) ++violations;
        }
        // 100 configurations near the anchor, kept if they fall in the cube.
        for (int j = 0; j < 100; ++j) {
            const Config c = random_config(rng);
            const Config mixed{j % 3 == 0 ? c.b : anchor.b, j % 3 == 1 ? c.c : anchor.c, j % 3 == 2 ? c.d : anchor.d};
            if (!cube.contains(mixed)) continue;
            const auto rad = config_radicands(mixed);
            for (int p = 0; p < kNumPairs; ++p)
                if (upper[p] * upper[p] < rad[p]) ++violations;
        }
        const auto rad = config_radicands(anchor);
        for (int p = 0; p < kNumPairs; ++p)
            if (upper[p] * upper[p] < rad[p]) ++violations;
        if (distance_sum_test(cube, 30).bound < distance_sum_exact_bounds(anchor, 30).lo) ++violations;
    }
    CHECK(violations == 0);
}

TEST_CASE("sum test eliminates a far cube") {
    // B, C and D all near (1, 0): the distances among them nearly vanish.
    const Cube6 far = make_cube({Rat(7, 8), Rat(0), Rat(7, 8), Rat(0), Rat(7, 8), Rat(0)}, make_rat(1, 8));
    const CubeVerdict v = distance_sum_test(far, 30);
    CHECK(v.verdict == Verdict::eliminated_by_sum_test);
    CHECK(Q2Number(v.bound) < optimum_value());
    CHECK(max_radicand_sqrt_sum(far) < 7.0);
    CHECK(distance_sum_test(square_cube(1024), 30).verdict == Verdict::subdivided);
}

TEST_CASE("sum test agrees with a floating estimate away from the threshold") {
    std::mt19937_64 rng(97);
    std::uniform_int_distribution<std::size_t> pick(0, cover().size() - 1);
    int disagreements = 0, decided = 0;
    for (int i = 0; i < 5000; ++i) {
        const Cube6& c = cover()[pick(rng)];
        const double est = max_radicand_sqrt_sum(c);
        if (std::abs(est - optimum_value().to_double()) < 1e-6) continue;
        ++decided;
        const bool eliminated = distance_sum_test(c, 30).verdict == Verdict::eliminated_by_sum_test;
        if (eliminated != (est < optimum_value().to_double())) ++disagreements;
    }
    CHECK(decided > 4000);
    CHECK(disagreements == 0);
}

TEST_CASE("distance bound filter examples") {
    const DistanceBoundTable t = DistanceBoundTable::standard();
    CHECK(passes_distance_bound_test(square_cube(1024), t, 30));
    // B next to A makes AB shorter than any optimal configuration allows.
    const Cube6 close = make_cube({Rat(0), Rat(-1), Rat(-1), Rat(0), Rat(0), Rat(7, 8)}, make_rat(1, 8));
    CHECK_FALSE(passes_distance_bound_test(close, t, 30));
}

TEST_CASE("cubes containing the square configuration are never eliminated") {
    const DistanceBoundTable t = DistanceBoundTable::standard();
    const Config sq = config_from_params({Rat(0), Rat(0), Rat(0), Rat(0)});
    for (int shift = 0; shift <= 11; ++shift) {
        const std::int32_t edge = std::int32_t{1} << shift;
        for (const Cube6& c : all_cubes_around(sq, edge)) {
            CHECK(distance_sum_test(c, 30).verdict == Verdict::subdivided);
            CHECK(passes_distance_bound_test(c, t, 30));
            CHECK(cube_meets_symmetry_chamber(c));
        }
    }
}

TEST_CASE("symmetry chamber examples") {
    CHECK(cube_meets_symmetry_chamber(square_cube(64)));
    // B and C swapped: ABC runs clockwise.
    Cube6 swapped = square_cube(64);
    swapped.lo[0] = static_cast<std::int32_t>(-kGridScale);
    swapped.lo[2] = static_cast<std::int32_t>(kGridScale - 64);
    CHECK_FALSE(cube_meets_symmetry_chamber(swapped));
}

TEST_CASE("bfs round on empty input") {
    const BfsResult r = bfs_round({}, make_rat(1, 32), trustless());
    CHECK(r.survivors.empty());
    CHECK(r.records.empty());
    CHECK(r.stats.input_cubes == 0);
    CHECK(r.stats.feasible == 0);
    CHECK_THROWS_AS(bfs_round({square_cube(64)}, make_rat(1, 32), trustless()), std::invalid_argument);
}

TEST_CASE("bfs round accounts for every feasible child") {
    std::mt19937_64 rng(101);
    std::vector<Cube6> input;
    std::vector<Config> configs;
    while (input.size() < 40) {
        const Config c = random_config(rng);
        const Cube6 cube = cube_around(c, static_cast<std::int32_t>(kGridScale / 8));
        if (!std::binary_search(cover().begin(), cover().end(), cube)) continue;
        input.push_back(cube);
        configs.push_back(c);
    }
    for (bool use_filter : {false, true}) {
        SearchConfig cfg = use_filter ? paper() : trustless();
        cfg.records = RecordLevel::all;
        const BfsResult r = bfs_round(input, make_rat(1, 32), cfg);
        CHECK(r.stats.input_cubes == input.size());
        CHECK(r.stats.raw_children == input.size() * 4096);
        CHECK(r.stats.survivors == r.survivors.size());
        const auto s = r.stats;
        CHECK(s.excluded + s.sum_eliminated + s.outside_chamber + s.survivors == s.bound_filter_passed);
        CHECK(r.survivors.size() + r.records.size() == s.feasible);
        if (!use_filter) CHECK(s.bound_filter_passed == s.feasible);
        std::vector<Cube6> all = r.survivors;
        for (const auto& rec : r.records) all.push_back(rec.cube);
        for (const Cube6& child : r.survivors) {
            CHECK(child.edge == edge_to_grid(make_rat(1, 32)));
            const bool inside = std::any_of(input.begin(), input.end(), [&](const Cube6& p) {
                for (int i = 0; i < 6; ++i)
                    if (child.lo[i] < p.lo[i] || child.lo[i] + child.edge > p.lo[i] + p.edge) return false;
                return true;
            });
            CHECK(inside);
        }
        for (const Config& c : configs) {
            const bool covered =
                std::any_of(all.begin(), all.end(), [&](const Cube6& cube) { return cube.contains(c); });
            CHECK(covered);
        }
    }
}

TEST_CASE("higher square-root precision only tightens the sum test") {
    std::mt19937_64 rng(103);
    std::uniform_int_distribution<std::size_t> pick(0, cover().size() - 1);
    int violations = 0;
    for (int i = 0; i < 5000; ++i) {
        const Cube6& c = cover()[pick(rng)];
        const CubeVerdict lo = distance_sum_test(c, 12), hi = distance_sum_test(c, 30);
        if (hi.bound > lo.bound) ++violations;
        if (lo.verdict == Verdict::eliminated_by_sum_test && hi.verdict != Verdict::eliminated_by_sum_test) ++violations;
    }
    CHECK(violations == 0);
}

TEST_CASE("higher square-root precision never increases round survivors") {
    const std::vector<Cube6> first = bfs_round({root_cube()}, make_rat(1, 8), trustless()).survivors;
    const std::vector<Cube6> input(first.begin(), first.begin() + 3000);
    std::uint64_t previous = 0;
    for (unsigned k : {2u, 8u, 16u, 30u}) {
        SearchConfig cfg;
        cfg.sqrt_precision = k;
        const std::uint64_t survivors = bfs_round(input, make_rat(1, 32), cfg).stats.survivors;
        if (k != 2) CHECK(survivors <= previous);
        previous = survivors;
    }
    CHECK(previous > 0);
}

TEST_CASE("dfs verification") {
    const GlobalCertificate& cert = default_run();
    REQUIRE(!cert.records.empty());
    const auto root = std::find_if(cert.records.begin(), cert.records.end(),
                                   [](const CubeRecord& r) { return r.verdict == Verdict::subdivided; });
    REQUIRE(root != cert.records.end());
    const DfsResult ok = dfs_verify(root->cube, trustless());
    CHECK(ok.ok);
    CHECK(ok.depth == root->dfs_depth);
    CHECK_FALSE(ok.witness);

    SearchConfig open = trustless();
    open.exclude_neighborhood = false;
    const DfsResult bad = dfs_verify(square_cube(256), open);
    CHECK_FALSE(bad.ok);
    REQUIRE(bad.witness);
    CHECK(bad.witness->edge_length() == make_rat(1, 512));
    CHECK(bad.witness->distance_to_optimum() <= make_rat(1, 32));

    CHECK_THROWS_AS(dfs_verify(square_cube(16), trustless()), std::invalid_argument);
}

TEST_CASE("default global run") {
    const GlobalCertificate& cert = default_run();
    CHECK(cert.valid);
    REQUIRE(cert.rounds.size() == 2);
    CHECK(cert.rounds[0].feasible == 806400);
    CHECK(cert.rounds[0].excluded == 0);
    CHECK(cert.rounds[1].excluded == 4096);
    CHECK(cert.dfs.failures == 0);
    CHECK(cert.witnesses.empty());
    CHECK(cert.dfs.roots == cert.rounds[1].survivors);
    std::uint64_t resolved = 0;
    for (const auto& [edge, n] : cert.dfs.resolved_at_edge) {
        CHECK(edge >= make_rat(1, 512));
        resolved += n;
    }
    CHECK(resolved == cert.dfs.roots);
}

TEST_CASE("results do not depend on the worker count") {
    SearchConfig cfg = paper();
    cfg.worker_count = 3;
    const GlobalCertificate many = run_global(cfg);
    cfg.worker_count = 1;
    const GlobalCertificate one = run_global(cfg);
    CHECK(one.same_content(many));
    CHECK(without_timings(serialize(one)) == without_timings(serialize(many)));
    CHECK(one.valid);
}

TEST_CASE("global certificate round trip") {
    const std::string text = serialize(default_run());
    CHECK(text.rfind("hemicert-global-certificate 1\n", 0) == 0);
    const GlobalCertificate back = parse_global_certificate(text);
    CHECK(back.same_content(default_run()));
    CHECK(serialize(back) == text);
}

TEST_CASE("global certificate parse errors carry line numbers") {
    CHECK_THROWS_WITH_AS(parse_global_certificate(""), doctest::Contains("line 1"), std::invalid_argument);
    CHECK_THROWS_WITH_AS(parse_global_certificate("hemicert-global-certificate 1\nbogus 1\n"),
                         doctest::Contains("line 2"), std::invalid_argument);
    CHECK_THROWS_WITH_AS(parse_global_certificate("hemicert-global-certificate 1\nconfig nope 3\n"),
                         doctest::Contains("unknown config key"), std::invalid_argument);
    CHECK_THROWS_AS(parse_global_certificate("hemicert-global-certificate 9\n"), std::invalid_argument);
}

TEST_CASE("search configuration validation") {
    CHECK_NOTHROW(trustless().validate());
    SearchConfig c = trustless();
    c.bfs_edges = {make_rat(1, 32), make_rat(1, 8)};
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c = trustless();
    c.dfs_max_edge = make_rat(1, 1024);
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c.dfs_max_edge = make_rat(1, 3);
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c = trustless();
    c.sqrt_precision = 0;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c = trustless();
    c.bfs_edges.clear();
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c = trustless();
    c.dfs_max_edge = make_rat(1, 2048);
    CHECK_NOTHROW(c.validate());
}

TEST_CASE("verdict and record level names") {
    for (Verdict v : {Verdict::eliminated_by_bound_filter, Verdict::eliminated_by_sum_test,
                      Verdict::excluded_neighborhood, Verdict::subdivided, Verdict::exhausted_depth,
                      Verdict::outside_symmetry_chamber})
        CHECK(parse_verdict(to_string(v)) == v);
    CHECK(parse_record_level("all") == RecordLevel::all);
    CHECK(parse_record_level("roots") == RecordLevel::roots);
    CHECK_THROWS(parse_record_level("some"));
    CHECK_THROWS(parse_verdict("maybe"));
}
