// SPDX-License-Identifier: Apache-2.0
//
// hemicert: verify-local, verify-global, oracle and report subcommands.
// Exit status: 0 success, 1 verification failure, 2 usage or parse error.

#include "hemicert/local.hpp"
#include "hemicert/oracle.hpp"
#include "hemicert/report.hpp"
#include "hemicert/search.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>

using namespace hemicert;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Numeric flags take exact rationals such as "1/7"; decimals are refused.
Rat flag_rat(const std::string& name, const std::string& text) {
    if (text.find_first_of(".eE") != std::string::npos)
        throw UsageError(name + " takes an exact rational like 1/7, got '" + text + "'");
    try {
        return parse_rat(text);
    } catch (const std::exception&) {
        throw UsageError(name + ": malformed rational '" + text + "'");
    }
}

bool flag_switch(const std::string& name, const std::string& text) {
    if (text == "on") return true;
    if (text == "off") return false;
    throw UsageError(name + " takes on or off, got '" + text + "'");
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UsageError("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out || !(out << text)) throw UsageError("cannot write " + path);
}

void emit(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-")
        std::cout << text;
    else
        write_file(path, text);
}

std::string point_text(const Point4& p) {
    std::string out = "(";
    for (int i = 0; i < kNumVars; ++i) out += (i ? ", " : "") + p[i].to_string();
    return out + ")";
}

// ---------------------------------------------------------------------------

struct LocalArgs {
    std::string r0 = "1/7";
    std::string majorizer = "paper";
    std::string output;
    std::uint64_t seed = 1;
    int samples = 20000;
};

int run_verify_local(const LocalArgs& a) {
    const Rat r0 = flag_rat("--r0", a.r0);
    if (sgn(r0) <= 0) throw UsageError("--r0 must be positive");
    const Majorizer majorizer = [&] {
        try {
            return parse_majorizer(a.majorizer);
        } catch (const std::exception& e) {
            throw UsageError(e.what());
        }
    }();
    if (r0 > make_rat(1, 7))
        std::cerr << "note: r0 = " << to_string(r0) << " exceeds 1/7; every stage is still checked exactly\n";

    const LocalCertificate cert = verify_local(r0, majorizer, a.seed, a.samples);
    if (!a.output.empty()) write_file(a.output, serialize(cert));
    for (const auto& s : cert.stages)
        std::cout << "stage " << s.name << ' ' << (s.ok ? "ok" : "FAILED") << ' ' << s.detail << '\n';
    if (cert.valid) {
        std::cout << "local certificate valid for r0 = " << to_string(r0) << '\n';
        return kExitOk;
    }
    std::cout << "local certificate invalid: stage " << cert.failing_stage() << " failed\n";
    if (cert.positivity_witness)
        std::cout << "witness J > 0 at (s, t, u, v) = " << point_text(*cert.positivity_witness)
                  << ", J ~ " << cert.J.eval(*cert.positivity_witness).to_double() << '\n';
    else
        std::cout << "no positivity witness found by sampling\n";
    return kExitFailure;
}

// ---------------------------------------------------------------------------

struct GlobalArgs {
    std::string mode = "trustless";
    unsigned precision = kDefaultSqrtPrecision;
    unsigned workers = 1;
    std::string dfs_max_edge = "1/512";
    std::string exclude = "on";
    std::string symmetry = "on";
    std::string records = "roots";
    std::string delta1 = "1/32";
    std::string delta2 = "1/4";
    std::string output;
    std::string report;
};

int run_verify_global(const GlobalArgs& a) {
    SearchConfig cfg;
    if (a.mode != "paper" && a.mode != "trustless") throw UsageError("--mode takes paper or trustless");
    cfg.use_bound_filter = a.mode == "paper";
    cfg.sqrt_precision = a.precision;
    cfg.worker_count = a.workers;
    cfg.dfs_max_edge = flag_rat("--dfs-max-edge", a.dfs_max_edge);
    cfg.exclude_neighborhood = flag_switch("--exclude-neighborhood", a.exclude);
    cfg.symmetry_reduction = flag_switch("--symmetry-reduction", a.symmetry);
    cfg.neighborhood.delta1 = flag_rat("--delta1", a.delta1);
    cfg.neighborhood.delta2 = flag_rat("--delta2", a.delta2);
    try {
        cfg.records = parse_record_level(a.records);
        cfg.validate();
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }

    const GlobalCertificate cert = run_global(cfg);
    if (!a.output.empty()) write_file(a.output, serialize(cert));
    for (std::size_t i = 0; i < cert.rounds.size(); ++i) {
        const RoundStats& r = cert.rounds[i];
        std::cerr << "round " << i + 1 << " edge " << to_string(r.edge) << ": " << r.feasible << " feasible, "
                  << r.survivors << " survivors\n";
    }
    std::cerr << "dfs: " << cert.dfs.roots << " roots, " << cert.dfs.failures << " failures\n";

    const RunReport report = build_report(nullptr, &cert);
    emit(a.report, report.to_text());
    if (!cert.valid) {
        std::cout << "global certificate invalid: " << cert.witnesses.size() << " witness cubes\n";
        for (const auto& w : cert.witnesses)
            std::cout << "witness " << w.to_string() << " distance_to_optimum=" << to_string(w.distance_to_optimum())
                      << '\n';
        return kExitFailure;
    }
    return report.has_failure() ? kExitFailure : kExitOk;
}

// ---------------------------------------------------------------------------

struct OracleArgs {
    int restarts = 100;
    std::uint64_t seed = 1;
    std::string v_min = "0";
    bool no_chamber = false;
    int majorization = 0;
    std::string r0 = "1/7";
};

int run_oracle(const OracleArgs& a) {
    if (a.restarts < 1) throw UsageError("--restarts must be at least 1");
    OracleDomain dom;
    dom.v_min = flag_rat("--v-min", a.v_min).get_d();
    dom.chamber = !a.no_chamber;
    const double optimum = 4 + 4 * std::sqrt(2.0);
    bool ok = true;

    const NumericMax best = numeric_max_search(a.restarts, a.seed, dom);
    std::printf("numeric maximum %.12f at (s, t, u, v) = (%.3e, %.3e, %.3e, %.3e)\n", best.value, best.params[0],
                best.params[1], best.params[2], best.params[3]);
    std::printf("4 + 4 sqrt2 = %.12f, gap %.3e\n", optimum, optimum - best.value);
    if (best.value > optimum + 1e-9) {
        std::printf("numeric maximum exceeds 4 + 4 sqrt2\n");
        ok = false;
    }
    const double e = 2 - std::sqrt(3.0);
    std::printf("equilateral with D at the pole %.12f (3 sqrt3 + 3 sqrt2 = %.12f)\n", objective(ParamsD{e, e, 0, 1}),
                3 * std::sqrt(3.0) + 3 * std::sqrt(2.0));
    const Criticality crit = criticality_check({0, 0, 0, 0}, 1e-5);
    std::printf("partials at the square configuration: %.3e %.3e %.3e %.3e (v one-sided)\n", crit.partials[0],
                crit.partials[1], crit.partials[2], crit.partials[3]);

    if (a.majorization > 0) {
        const Rat r0 = flag_rat("--r0", a.r0);
        const MajorizationSample m = majorization_sampling(build_J(), r0, a.majorization, a.seed);
        std::printf("majorization: %d samples, %d violations, max excess %.3e\n", m.samples, m.violations,
                    m.max_excess);
        ok = ok && m.violations == 0;
    }
    return ok ? kExitOk : kExitFailure;
}

// ---------------------------------------------------------------------------

struct ReportArgs {
    std::vector<std::string> paths;
    std::string output;
};

int run_report(const ReportArgs& a) {
    std::optional<LocalCertificate> local;
    std::optional<GlobalCertificate> global;
    for (const auto& path : a.paths) {
        const std::string text = read_file(path);
        const std::string head = text.substr(0, text.find('\n'));
        try {
            if (head.rfind("hemicert-local-certificate", 0) == 0)
                local = parse_local_certificate(text);
            else if (head.rfind("hemicert-global-certificate", 0) == 0)
                global = parse_global_certificate(text);
            else
                throw std::invalid_argument("line 1: unknown certificate header '" + head + "'");
        } catch (const std::invalid_argument& e) {
            throw UsageError(path + ": " + e.what());
        }
    }
    const RunReport report = build_report(local ? &*local : nullptr, global ? &*global : nullptr);
    emit(a.output, report.to_text());
    return report.has_failure() ? kExitFailure : kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Certified verification of the four-point hemisphere distance-sum bound"};
    app.require_subcommand(1);
    app.set_config("--config", "", "Configuration file (TOML or INI, one section per subcommand); flags win");

    LocalArgs local;
    auto* vl = app.add_subcommand("verify-local", "Exact local analysis around the square configuration");
    vl->add_option("--r0", local.r0, "Cube half-width, exact rational")->capture_default_str();
    vl->add_option("--majorizer", local.majorizer, "paper, lemma3 or literal-sd")->capture_default_str();
    vl->add_option("--output,-o", local.output, "Certificate path");
    vl->add_option("--seed", local.seed, "Seed for the positivity-witness search")->capture_default_str();
    vl->add_option("--samples", local.samples, "Witness search samples")->capture_default_str();

    GlobalArgs global;
    auto* vg = app.add_subcommand("verify-global", "Cube branch-and-bound outside the neighbourhood");
    vg->add_option("--mode", global.mode, "paper (distance bound filter on) or trustless")->capture_default_str();
    vg->add_option("--precision", global.precision, "Square-root precision bits")->capture_default_str();
    vg->add_option("--workers", global.workers, "Worker threads")->capture_default_str();
    vg->add_option("--dfs-max-edge", global.dfs_max_edge, "Finest DFS edge, exact rational")->capture_default_str();
    vg->add_option("--exclude-neighborhood", global.exclude, "on or off")->capture_default_str();
    vg->add_option("--symmetry-reduction", global.symmetry, "on or off")->capture_default_str();
    vg->add_option("--records", global.records, "roots or all")->capture_default_str();
    vg->add_option("--delta1", global.delta1, "Neighbourhood depth")->capture_default_str();
    vg->add_option("--delta2", global.delta2, "Neighbourhood half-width")->capture_default_str();
    vg->add_option("--output,-o", global.output, "Certificate path");
    vg->add_option("--report", global.report, "Report path (default stdout)");

    OracleArgs oracle;
    auto* oc = app.add_subcommand("oracle", "Floating-point cross-checks");
    oc->add_option("--restarts", oracle.restarts, "Local ascent restarts")->capture_default_str();
    oc->add_option("--seed", oracle.seed, "Seed")->capture_default_str();
    oc->add_option("--v-min", oracle.v_min, "Lower bound on v, exact rational")->capture_default_str();
    oc->add_flag("--no-chamber", oracle.no_chamber, "Search all labellings");
    oc->add_option("--majorization", oracle.majorization, "Majorization samples (0 skips)")->capture_default_str();
    oc->add_option("--r0", oracle.r0, "Majorization box half-width")->capture_default_str();

    ReportArgs report;
    auto* rp = app.add_subcommand("report", "Compare certificates with the reference values");
    rp->add_option("certificates", report.paths, "Local and/or global certificate files")->required();
    rp->add_option("--output,-o", report.output, "Report path (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (vl->parsed()) return run_verify_local(local);
        if (vg->parsed()) return run_verify_global(global);
        if (oc->parsed()) return run_oracle(oracle);
        if (rp->parsed()) return run_report(report);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    return kExitUsage;
}
