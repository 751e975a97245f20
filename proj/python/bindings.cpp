#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "causeway/cli.hpp"
#include "causeway/counterfactual_metrics.hpp"
#include "causeway/discover.hpp"
#include "causeway/errors.hpp"
#include "causeway/estimate.hpp"
#include "causeway/identify.hpp"
#include "causeway/mediation.hpp"
#include "causeway/recover.hpp"
#include "causeway/scm.hpp"

namespace py = pybind11;
using namespace causeway;

namespace {

Dataset table_from_text(const std::string& csv) {
    std::istringstream in(csv);
    return load_table(in);
}

// Estimand text, or None when the query is not identifiable.
py::object identify_text(const std::string& graph, const std::string& query) {
    const Admg g = parse_graph(graph);
    const auto r = identify(g, parse_query(query, g.names()));
    if (const auto* id = std::get_if<Identified>(&r)) return py::str(render(simplify(id->estimand)));
    return py::none();
}

std::string hedge_text(const std::string& graph, const std::string& query) {
    const Admg g = parse_graph(graph);
    const auto r = identify(g, parse_query(query, g.names()));
    if (const auto* n = std::get_if<NonIdentifiable>(&r)) return n->witness.to_string();
    return "";
}

double estimate_value(const std::string& graph, const std::string& csv, const std::string& query,
                      const Binding& binding) {
    const Admg g = parse_graph(graph);
    const auto r = identify(g, parse_query(query, g.names()));
    if (!std::holds_alternative<Identified>(r)) throw Error("query is not identifiable");
    return plug_in(std::get<Identified>(r).estimand, table_from_text(csv), binding).value;
}

py::dict pn_ps(const std::string& scm, const std::string& x, const std::string& y) {
    const auto r = pn_ps_exact(parse_scm(scm), x, y);
    py::dict out;
    out["pn"] = r.pn ? py::cast(*r.pn) : py::none();
    out["ps"] = r.ps ? py::cast(*r.ps) : py::none();
    out["pns"] = r.pns ? py::cast(*r.pns) : py::none();
    return out;
}

py::dict pn_ps_bounds(const std::string& csv, const std::string& x, const std::string& y, double px1, double px0) {
    const auto r = pnps_bounds(empirical_joint(table_from_text(csv), {x, y}), x, y, px1, px0);
    py::dict out;
    auto put = [&](const char* key, const std::optional<Bounds>& b) {
        out[key] = b ? py::cast(std::make_pair(b->low, b->high)) : py::none();
    };
    put("pn", r.pn_bounds);
    put("ps", r.ps_bounds);
    put("pns", r.pns_bounds);
    return out;
}

py::dict mediation(const std::string& scm, const std::string& x, const std::string& m, const std::string& y) {
    const auto r = mediation_effects(parse_scm(scm), MediationSpec{x, m, y});
    py::dict out;
    out["te"] = r.te;
    out["nde"] = r.nde;
    out["nie"] = r.nie;
    out["nie_reversed"] = r.nie_reversed;
    return out;
}

py::object recoverability_text(const std::string& mgraph, const std::vector<std::string>& target) {
    const auto r = recoverability(parse_mgraph(mgraph), target);
    if (const auto* rec = std::get_if<Recoverable>(&r))
        return py::make_tuple(criterion_name(rec->criterion), render(rec->estimand));
    return py::none();
}

py::tuple run(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    return py::make_tuple(code, out.str(), err.str());
}

}  // namespace

PYBIND11_MODULE(_causeway, m) {
    m.doc() = "Causal identification, estimation and counterfactual reasoning over discrete models";

    auto base = py::register_exception<Error>(m, "CausewayError");
    py::register_exception<ParseError>(m, "ParseError", base);
    py::register_exception<ConditioningOnZero>(m, "ConditioningOnZero", base);
    py::register_exception<NotRecoverable>(m, "NotRecoverable", base);

    m.def("identify", &identify_text, py::arg("graph"), py::arg("query"),
          "Estimand for the query, or None if it is not identifiable.");
    m.def("hedge", &hedge_text, py::arg("graph"), py::arg("query"),
          "Witness hedge of a non-identifiable query; empty when identifiable.");
    m.def("d_separated",
          py::overload_cast<const Admg&, const std::vector<std::string>&, const std::vector<std::string>&,
                            const std::vector<std::string>&>(&d_separated),
          py::arg("graph"), py::arg("a"), py::arg("b"), py::arg("given") = std::vector<std::string>{});
    m.def("estimate", &estimate_value, py::arg("graph"), py::arg("csv"), py::arg("query"),
          py::arg("binding") = Binding{});
    m.def("counterfactual",
          [](const std::string& scm, const std::string& query) {
              const auto model = parse_scm(scm);
              return counterfactual_query(model, parse_counterfactual(query, model.endogenous_names()));
          },
          py::arg("scm"), py::arg("query"));
    m.def("pn_ps", &pn_ps, py::arg("scm"), py::arg("exposure"), py::arg("outcome"));
    m.def("pn_ps_bounds", &pn_ps_bounds, py::arg("csv"), py::arg("exposure"), py::arg("outcome"), py::arg("px1"),
          py::arg("px0"));
    m.def("mediation", &mediation, py::arg("scm"), py::arg("exposure"), py::arg("mediator"), py::arg("outcome"));
    m.def("recoverability", &recoverability_text, py::arg("mgraph"), py::arg("target"),
          "(criterion, estimand), or None when no criterion applies.");
    m.def("discover", [](const std::string& graph) {
              const Admg g = parse_graph(graph);
              return serialize_cpdag(discover_cpdag(GraphOracle(g), g.names()));
          },
          py::arg("graph"), "CPDAG recovered by PC from the graph's own independencies.");
    m.def("run_cli", &run, py::arg("args"), "Runs a command-line invocation; returns (exit code, stdout, stderr).");

    py::class_<Admg>(m, "Graph")
        .def(py::init(&parse_graph), py::arg("text"))
        .def_property_readonly("nodes", &Admg::names)
        .def("__str__", [](const Admg& g) { return serialize(g); });
    py::implicitly_convertible<std::string, Admg>();
}
