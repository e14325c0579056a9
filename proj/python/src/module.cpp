// SPDX-License-Identifier: Apache-2.0

#include "hemicert/local.hpp"
#include "hemicert/oracle.hpp"
#include "hemicert/report.hpp"
#include "hemicert/search.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>

namespace py = pybind11;
using namespace hemicert;

namespace {

std::vector<std::string> point_strings(const Point4& p) {
    std::vector<std::string> out;
    for (const auto& x : p) out.push_back(x.to_string());
    return out;
}

// Exact fractions only, as on the command line.
Rat exact_rat(const std::string& text) {
    if (text.find_first_of(".eE") != std::string::npos)
        throw py::value_error("'" + text + "' is not an exact fraction; write it as p/q");
    return parse_rat(text);
}

py::dict round_dict(const RoundStats& r) {
    py::dict d;
    d["edge"] = r.edge.get_str();
    d["input_cubes"] = r.input_cubes;
    d["raw_children"] = r.raw_children;
    d["feasible"] = r.feasible;
    d["bound_filter_passed"] = r.bound_filter_passed;
    d["excluded"] = r.excluded;
    d["sum_eliminated"] = r.sum_eliminated;
    d["outside_chamber"] = r.outside_chamber;
    d["survivors"] = r.survivors;
    d["seconds"] = r.seconds;
    return d;
}

GlobalCertificate run_global_py(const std::string& mode, const std::string& dfs_max_edge, bool exclude_neighborhood,
                                bool symmetry_reduction, unsigned workers, unsigned precision) {
    if (mode != "paper" && mode != "trustless") throw py::value_error("mode must be 'paper' or 'trustless'");
    SearchConfig cfg;
    cfg.use_bound_filter = mode == "paper";
    cfg.dfs_max_edge = exact_rat(dfs_max_edge);
    cfg.exclude_neighborhood = exclude_neighborhood;
    cfg.symmetry_reduction = symmetry_reduction;
    cfg.worker_count = workers;
    cfg.sqrt_precision = precision;
    py::gil_scoped_release release;
    return run_global(cfg);
}

}  // namespace

PYBIND11_MODULE(_hemicert, m) {
    m.doc() = "Exact certification of the hemisphere four-point distance-sum maximum";

    py::register_exception<std::invalid_argument>(m, "InvalidArgument", PyExc_ValueError);

    m.def("optimum_value", [] { return optimum_value().to_string(); }, "4 + 4 sqrt2 in canonical text form.");
    m.def("optimum_decimal", [] { return optimum_value().to_double(); });

    py::class_<LocalCertificate>(m, "LocalCertificate")
        .def_property_readonly("valid", [](const LocalCertificate& c) { return c.valid; })
        .def_property_readonly("r0", [](const LocalCertificate& c) { return c.r0.get_str(); })
        .def_property_readonly("majorizer", [](const LocalCertificate& c) { return std::string(to_string(c.majorizer)); })
        .def_property_readonly("failing_stage", &LocalCertificate::failing_stage)
        .def_property_readonly("j_terms", [](const LocalCertificate& c) { return c.J.term_count(); })
        .def_property_readonly("j_degrees",
                               [](const LocalCertificate& c) { return py::make_tuple(c.J.min_degree(), c.J.max_degree()); })
        .def_property_readonly("h_terms",
                               [](const LocalCertificate& c) {
                                   std::map<int, std::size_t> out;
                                   for (const auto& [d, p] : c.H) out[d] = p.term_count();
                                   return out;
                               })
        .def_property_readonly("theta_terms", [](const LocalCertificate& c) { return c.theta.term_count(); })
        .def_property_readonly("res5", [](const LocalCertificate& c) { return c.res5.to_string(); })
        .def_property_readonly("final_matrix", [](const LocalCertificate& c) { return c.final_matrix.to_string(); })
        .def_property_readonly("nsd", [](const LocalCertificate& c) { return c.nsd_verdict; })
        .def_property_readonly("stages",
                               [](const LocalCertificate& c) {
                                   std::vector<py::tuple> out;
                                   for (const auto& s : c.stages) out.push_back(py::make_tuple(s.name, s.ok, s.detail));
                                   return out;
                               })
        .def_property_readonly("positivity_witness",
                               [](const LocalCertificate& c) -> std::optional<std::vector<std::string>> {
                                   if (!c.positivity_witness) return std::nullopt;
                                   return point_strings(*c.positivity_witness);
                               })
        .def("to_text", [](const LocalCertificate& c) { return serialize(c); });

    m.def(
        "verify_local",
        [](const std::string& r0, const std::string& majorizer) {
            const Rat r = exact_rat(r0);
            const Majorizer mj = parse_majorizer(majorizer);
            py::gil_scoped_release release;
            return verify_local(r, mj);
        },
        py::arg("r0") = "1/7", py::arg("majorizer") = "paper", "Runs the exact local analysis on [-r0, r0]^4.");
    m.def("parse_local_certificate", [](const std::string& text) { return parse_local_certificate(text); });

    py::class_<GlobalCertificate>(m, "GlobalCertificate")
        .def_property_readonly("valid", [](const GlobalCertificate& c) { return c.valid; })
        .def_property_readonly("mode",
                               [](const GlobalCertificate& c) { return c.config.use_bound_filter ? "paper" : "trustless"; })
        .def_property_readonly("rounds",
                               [](const GlobalCertificate& c) {
                                   py::list out;
                                   for (const auto& r : c.rounds) out.append(round_dict(r));
                                   return out;
                               })
        .def_property_readonly("dfs_roots", [](const GlobalCertificate& c) { return c.dfs.roots; })
        .def_property_readonly("dfs_failures", [](const GlobalCertificate& c) { return c.dfs.failures; })
        .def_property_readonly("resolved_at_edge",
                               [](const GlobalCertificate& c) {
                                   std::map<std::string, std::uint64_t> out;
                                   for (const auto& [e, n] : c.dfs.resolved_at_edge) out[e.get_str()] = n;
                                   return out;
                               })
        .def_property_readonly("witnesses",
                               [](const GlobalCertificate& c) {
                                   std::vector<py::tuple> out;
                                   for (const auto& w : c.witnesses)
                                       out.push_back(py::make_tuple(w.to_string(), w.distance_to_optimum().get_str()));
                                   return out;
                               })
        .def_property_readonly("total_seconds", [](const GlobalCertificate& c) { return c.total_seconds; })
        .def("to_text", [](const GlobalCertificate& c) { return serialize(c); });

    m.def("verify_global", &run_global_py, py::arg("mode") = "trustless", py::arg("dfs_max_edge") = "1/512",
          py::arg("exclude_neighborhood") = true, py::arg("symmetry_reduction") = true, py::arg("workers") = 1,
          py::arg("precision") = kDefaultSqrtPrecision, "Runs the cube branch-and-bound over the whole feasible set.");
    m.def("parse_global_certificate", [](const std::string& text) { return parse_global_certificate(text); });

    m.def(
        "report",
        [](const LocalCertificate* local, const GlobalCertificate* global) {
            return build_report(local, global).to_text();
        },
        py::arg("local") = nullptr, py::arg("global_") = nullptr, "Compares certificates with the reference values.");

    m.def(
        "numeric_max_search",
        [](int restarts, std::uint64_t seed, double v_min, bool chamber) {
            OracleDomain d;
            d.v_min = v_min;
            d.chamber = chamber;
            const NumericMax r = numeric_max_search(restarts, seed, d);
            return py::make_tuple(r.value, py::make_tuple(r.params[0], r.params[1], r.params[2], r.params[3]));
        },
        py::arg("restarts") = 100, py::arg("seed") = 0, py::arg("v_min") = 0.0, py::arg("chamber") = true,
        "Floating-point multi-start ascent; returns (value, (s, t, u, v)).");
    m.def(
        "objective", [](double s, double t, double u, double v) { return objective(ParamsD{s, t, u, v}); },
        py::arg("s"), py::arg("t"), py::arg("u"), py::arg("v"));
    m.def(
        "majorization_sampling",
        [](const LocalCertificate& c, int n, std::uint64_t seed) {
            const MajorizationSample s = majorization_sampling(c.J, c.r0, n, seed);
            return py::make_tuple(s.samples, s.violations, s.max_excess);
        },
        py::arg("certificate"), py::arg("samples") = 10'000, py::arg("seed") = 0,
        "Returns (samples, violations, largest excess).");
}
