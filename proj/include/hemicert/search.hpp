// SPDX-License-Identifier: Apache-2.0
//
// Branch-and-bound over the cube cover of (S^1)^2 x D^2. Every cube that is
// not excluded as part of the neighbourhood of the square configuration is
// either eliminated by an exact distance-sum bound or subdivided further.

#pragma once

#include "hemicert/exact.hpp"
#include "hemicert/geometry.hpp"

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace hemicert {

/// Pair order used throughout: AB, AC, AD, BC, BD, CD.
inline constexpr int kNumPairs = 6;
inline constexpr std::array<const char*, kNumPairs> kPairNames = {"AB", "AC", "AD", "BC", "BD", "CD"};

/// Sorted lower bounds on the six distances of any optimal configuration.
struct DistanceBoundTable {
    std::array<Q2Number, kNumPairs> bounds;

    static DistanceBoundTable standard();
    /// ceil(b_i * 2^k) for each bound, computed exactly.
    std::array<std::int64_t, kNumPairs> scaled_thresholds(unsigned k) const;
};

enum class RecordLevel { roots, all };

std::string_view to_string(RecordLevel r);
RecordLevel parse_record_level(std::string_view text);

struct SearchConfig {
    std::vector<Rat> bfs_edges{make_rat(1, 8), make_rat(1, 32)};
    int dfs_subdivision = 4;
    Rat dfs_max_edge = make_rat(1, 512);
    bool use_bound_filter = false;
    bool exclude_neighborhood = true;
    /// Discard cubes with no configuration in the labelling chamber (see
    /// cube_meets_symmetry_chamber). Off leaves the relabelled optima in the
    /// search region.
    bool symmetry_reduction = true;
    unsigned sqrt_precision = kDefaultSqrtPrecision;
    unsigned worker_count = 1;
    RecordLevel records = RecordLevel::roots;
    NeighborhoodSpec neighborhood;

    /// Throws std::invalid_argument when edges are not strictly decreasing,
    /// not on the grid, or not reachable by the subdivision factors.
    void validate() const;
};

enum class Verdict {
    eliminated_by_bound_filter,
    eliminated_by_sum_test,
    excluded_neighborhood,
    subdivided,
    exhausted_depth,
    outside_symmetry_chamber,
};

std::string_view to_string(Verdict v);
Verdict parse_verdict(std::string_view text);

struct CubeVerdict {
    Cube6 cube;
    Verdict verdict = Verdict::subdivided;
    Rat bound;  // distance-sum upper bound; zero when no sum test ran
};

// ---------------------------------------------------------------------------
// Per-cube bounds.

/// Exact maximum of each pair radicand over the cube's boxes (corner
/// enumeration, the radicand being bilinear).
std::array<Rat, kNumPairs> pair_radicand_max(const Cube6& cube);

/// sqrt_upper of the pair's maximal radicand.
Rat pair_distance_upper(const Cube6& cube, int pair, unsigned k);

/// The six upper bounds as integers m with bound = m / 2^k; equal to
/// pair_distance_upper for every pair.
std::array<std::int64_t, kNumPairs> pair_distance_upper_scaled(const Cube6& cube, unsigned k);

/// False (eliminate) iff some sorted upper bound lies strictly below the
/// matching sorted lower bound.
bool passes_distance_bound_test(const Cube6& cube, const DistanceBoundTable& table, unsigned k);

/// Labelling chamber: ABC counterclockwise (oriented area >= 0) and BC the
/// longest side of triangle ABC. Any configuration with A, B, C on the
/// equator can be relabelled and rotated into it, and the square
/// configuration B=(1,0), C=(-1,0), D=(0,1) is its only optimum. False iff
/// one of the three defining inequalities fails on the whole cube (exact
/// corner maxima).
bool cube_meets_symmetry_chamber(const Cube6& cube);

/// Eliminated iff the sum of pair upper bounds is < 4 + 4 sqrt2, decided
/// exactly; otherwise subdivided.
CubeVerdict distance_sum_test(const Cube6& cube, unsigned k);

// ---------------------------------------------------------------------------
// Search.

/// Cube covering [-1,1]^6 used as the parent of the first round.
Cube6 root_cube();

/// Lower corners (grid units) of the edge-1/8 cells of the 16x16 grid on
/// [-1,1]^2 that meet the unit circle and the closed unit disk.
struct InitialCells {
    std::vector<std::pair<std::int32_t, std::int32_t>> circle;
    std::vector<std::pair<std::int32_t, std::int32_t>> disk;
};
InitialCells initial_cells();

/// All edge-1/8 cubes whose B and C boxes meet the circle and whose D box
/// meets the disk.
std::vector<Cube6> build_initial_cover();

struct RoundStats {
    Rat edge;
    std::uint64_t input_cubes = 0;
    std::uint64_t raw_children = 0;
    std::uint64_t feasible = 0;
    std::uint64_t bound_filter_passed = 0;
    std::uint64_t excluded = 0;
    std::uint64_t sum_eliminated = 0;
    std::uint64_t outside_chamber = 0;
    std::uint64_t survivors = 0;
    double seconds = 0;

    RoundStats& operator+=(const RoundStats& o);
    /// Counts only; timing is ignored.
    friend bool operator==(const RoundStats& a, const RoundStats& b) {
        return a.edge == b.edge && a.input_cubes == b.input_cubes && a.raw_children == b.raw_children &&
               a.feasible == b.feasible && a.bound_filter_passed == b.bound_filter_passed &&
               a.excluded == b.excluded && a.sum_eliminated == b.sum_eliminated &&
               a.outside_chamber == b.outside_chamber && a.survivors == b.survivors;
    }
};

struct BfsResult {
    std::vector<Cube6> survivors;
    RoundStats stats;
    std::vector<CubeVerdict> records;  // excluded cubes, plus eliminated ones at RecordLevel::all
};

/// Subdivides every cube to next_edge, keeps feasible children, then applies
/// the bound filter (if enabled), the neighbourhood exclusion (if enabled),
/// the sum test and the chamber test (if enabled), in that order. Survivors
/// are sorted.
BfsResult bfs_round(const std::vector<Cube6>& cubes, const Rat& next_edge, const SearchConfig& cfg);

struct DfsResult {
    bool ok = true;
    int depth = 0;           // subdivision levels below the root that were needed
    Rat finest_edge;         // edge of the smallest children tested
    std::uint64_t tested = 0;
    std::optional<Cube6> witness;  // first child at dfs_max_edge that failed
    Rat root_bound;
};

/// Depth-first refinement with the sum test (and the chamber test when
/// enabled); stops at the first child
/// that still fails at dfs_max_edge.
DfsResult dfs_verify(const Cube6& root, const SearchConfig& cfg);

struct DfsStats {
    std::uint64_t roots = 0;
    std::map<Rat, std::uint64_t> resolved_at_edge;  // finest child edge -> roots
    std::uint64_t failures = 0;
    std::uint64_t tested = 0;
    double seconds = 0;

    friend bool operator==(const DfsStats& a, const DfsStats& b) {
        return a.roots == b.roots && a.resolved_at_edge == b.resolved_at_edge && a.failures == b.failures &&
               a.tested == b.tested;
    }
};

struct CubeRecord {
    Cube6 cube;
    Verdict verdict = Verdict::subdivided;
    Rat bound;
    int dfs_depth = -1;  // for DFS roots

    friend bool operator==(const CubeRecord&, const CubeRecord&) = default;
};

struct GlobalCertificate {
    SearchConfig config;
    std::vector<RoundStats> rounds;
    DfsStats dfs;
    std::vector<CubeRecord> records;  // sorted by cube
    std::vector<Cube6> witnesses;
    bool valid = false;
    double total_seconds = 0;

    /// Compares everything except timings.
    bool same_content(const GlobalCertificate& o) const;
};

GlobalCertificate run_global(const SearchConfig& cfg);

std::string serialize(const GlobalCertificate& cert);
/// Throws std::invalid_argument with a line number on malformed input.
GlobalCertificate parse_global_certificate(std::string_view text);

/// Inverse of Cube6::to_string ("B=[..]x[..] C=[..]x[..] D=[..]x[..]");
/// depth is left at 0. Throws std::invalid_argument on off-grid or
/// non-cubic boxes.
Cube6 parse_cube(std::string_view text);

}  // namespace hemicert
