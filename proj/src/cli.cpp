#include "causeway/cli.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "causeway/counterfactual_metrics.hpp"
#include "causeway/data.hpp"
#include "causeway/discover.hpp"
#include "causeway/errors.hpp"
#include "causeway/estimate.hpp"
#include "causeway/fitcheck.hpp"
#include "causeway/identify.hpp"
#include "causeway/mediation.hpp"
#include "causeway/recover.hpp"
#include "causeway/scm.hpp"
#include "causeway/values.hpp"

namespace causeway {

namespace {

struct Options {
    std::string graph, scm, data, query;
    double alpha = 0.05;
    std::size_t bootstrap = 0;
    double level = 0.95;
    std::uint64_t seed = 0;
    std::string x0 = "0", x1 = "1", y0 = "0", y1 = "1";
    std::string exposure, mediator, outcome;
    std::optional<double> px1, px0;
    std::string experimental;
    std::vector<std::string> target, vars;
    bool porcelain = false;
    bool bonferroni = false;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::string num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

void require(const std::string& value, const char* flag) {
    if (value.empty()) throw Error(std::string("missing required option ") + flag);
}

// Every assignment of domain values to the free symbols, in domain order.
std::vector<Binding> bindings_for(const std::map<std::string, std::string>& free, const Dataset& d) {
    std::vector<Binding> out{{}};
    for (const auto& [symbol, var] : free) {
        const auto& dom = d.domain(d.require_column(var));
        std::vector<Binding> next;
        for (const auto& b : out) {
            for (const auto& v : dom) {
                auto nb = b;
                nb[symbol] = v;
                next.push_back(std::move(nb));
            }
        }
        out = std::move(next);
    }
    return out;
}

std::vector<Assignment> substitute(std::vector<Assignment> terms, const Binding& b) {
    for (auto& a : terms) {
        if (!a.value.is_symbol()) continue;
        if (auto it = b.find(a.value.text); it != b.end()) a.value = ValueRef::literal(it->second);
    }
    return terms;
}

std::string describe_binding(const std::map<std::string, std::string>& free, const Binding& b) {
    std::vector<std::string> parts;
    for (const auto& [symbol, var] : free) parts.push_back(var + "=" + b.at(symbol));
    return join(parts, ",");
}

int cmd_identify(const Options& o, std::ostream& out, std::ostream& err) {
    require(o.graph, "--graph");
    require(o.query, "--query");
    const Admg g = parse_graph(read_file(o.graph));
    const auto result = identify(g, parse_query(o.query, g.names()));
    if (const auto* n = std::get_if<NonIdentifiable>(&result)) {
        err << "FAILURE: " << o.query << " is not identifiable; witness " << n->witness.to_string() << '\n';
        return kExitNonIdentifiable;
    }
    out << render(simplify(std::get<Identified>(result).estimand)) << '\n';
    return kExitOk;
}

int cmd_estimate(const Options& o, std::ostream& out, std::ostream& err) {
    require(o.graph, "--graph");
    require(o.data, "--data");
    require(o.query, "--query");
    const Admg g = parse_graph(read_file(o.graph));
    const CausalQuery q = parse_query(o.query, g.names());
    const auto result = identify(g, q);
    if (const auto* n = std::get_if<NonIdentifiable>(&result)) {
        err << "FAILURE: " << o.query << " is not identifiable; witness " << n->witness.to_string() << '\n';
        return kExitNonIdentifiable;
    }
    const Estimand e = std::get<Identified>(result).estimand;
    const Dataset d = load_table_file(o.data);
    const auto free = free_symbols(e);
    if (!o.porcelain) out << "estimand: " << render(simplify(e)) << '\n';
    for (const auto& b : bindings_for(free, d)) {
        CausalQuery bound = q;
        bound.outcome = substitute(q.outcome, b);
        bound.intervention = substitute(q.intervention, b);
        bound.condition = substitute(q.condition, b);
        Estimate est;
        if (o.bootstrap > 0) {
            est = bootstrap_interval(e, d, b, BootstrapOptions{o.bootstrap, o.level, o.seed});
        } else {
            est = plug_in(e, d, b);
        }
        if (est.dropped_resamples > 0)
            err << "warning: " << est.dropped_resamples << " resamples dropped for " << render_query(bound)
                << " (empty conditioning stratum)\n";
        if (o.porcelain) {
            out << render_query(bound) << '\t' << num(est.value);
            if (est.interval) out << '\t' << num(est.interval->low) << '\t' << num(est.interval->high);
            out << '\n';
        } else {
            out << render_query(bound) << " = " << num(est.value);
            if (est.interval) {
                out << "  [" << num(est.interval->low) << ", " << num(est.interval->high) << "] ("
                    << num(100 * est.interval->level).substr(0, 5) << "% percentile, B=" << o.bootstrap << ')';
            }
            out << "  n=" << est.n << '\n';
        }
    }
    return kExitOk;
}

int cmd_fit(const Options& o, std::ostream& out, std::ostream& err) {
    require(o.graph, "--graph");
    require(o.data, "--data");
    const Admg g = parse_graph(read_file(o.graph));
    const auto report = fit_indices(g, load_table_file(o.data), FitOptions{o.alpha, o.bonferroni});
    for (const auto& w : report.warnings) err << "warning: " << w << '\n';
    out << (o.porcelain ? render_report_lines(report) : render_report(report));
    return kExitOk;
}

int cmd_counterfactual(const Options& o, std::ostream& out, std::ostream&) {
    require(o.scm, "--scm");
    require(o.query, "--query");
    const DiscreteScm m = parse_scm(read_file(o.scm));
    const double p = counterfactual_query(m, parse_counterfactual(o.query, m.endogenous_names()));
    if (o.porcelain) out << num(p) << '\n';
    else out << o.query << " = " << num(p) << '\n';
    return kExitOk;
}

void print_metric(std::ostream& out, bool porcelain, const char* name, const std::optional<double>& value,
                  const std::optional<Bounds>& bounds, const std::string& error) {
    if (porcelain) {
        out << name;
        if (value) out << '\t' << num(*value);
        else if (bounds) out << '\t' << num(bounds->low) << '\t' << num(bounds->high);
        else out << "\tundefined";
        out << '\n';
        return;
    }
    out << name << ' ';
    if (value) out << "= " << num(*value);
    else if (bounds) out << "in [" << num(bounds->low) << ", " << num(bounds->high) << ']';
    else out << "undefined" << (error.empty() ? "" : ": " + error);
    out << '\n';
}

// Two lines, `px1 <p>` and `px0 <p>`, in either order; `#` starts a comment.
void read_experimental(const std::string& path, std::optional<double>& px1, std::optional<double>& px0) {
    std::istringstream in(read_file(path));
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        for (char& c : line)
            if (c == '=' || c == ':') c = ' ';
        std::istringstream fields(line);
        std::string key, rest;
        double value = 0;
        if (!(fields >> key)) continue;
        if (!(fields >> value) || (fields >> rest))
            throw ParseError("expected '<px1|px0> <probability>' in experimental summary", lineno, 1);
        if (key == "px1") px1 = value;
        else if (key == "px0") px0 = value;
        else throw ParseError("unknown key '" + key + "' in experimental summary", lineno, 1);
    }
}

int cmd_pnps(const Options& o, std::ostream& out, std::ostream&) {
    require(o.exposure, "--exposure");
    require(o.outcome, "--outcome");
    const Polarity pol{o.x1, o.x0, o.y1, o.y0};
    PnPsResult r;
    if (!o.scm.empty()) {
        r = pn_ps_exact(parse_scm(read_file(o.scm)), o.exposure, o.outcome, pol);
    } else {
        require(o.data, "--data or --scm");
        std::optional<double> px1 = o.px1, px0 = o.px0;
        if (!o.experimental.empty()) read_experimental(o.experimental, px1, px0);
        if (!px1 || !px0) throw Error("bounds need --px1 and --px0 (experimental P(y|do(x)) and P(y|do(x')))");
        r = pnps_bounds(empirical_joint(load_table_file(o.data), {o.exposure, o.outcome}), o.exposure, o.outcome,
                        *px1, *px0, pol);
    }
    print_metric(out, o.porcelain, "PN", r.pn, r.pn_bounds, r.pn_error);
    print_metric(out, o.porcelain, "PS", r.ps, r.ps_bounds, r.ps_error);
    print_metric(out, o.porcelain, "PNS", r.pns, r.pns_bounds, "");
    return kExitOk;
}

int cmd_mediate(const Options& o, std::ostream& out, std::ostream&) {
    require(o.exposure, "--exposure");
    require(o.mediator, "--mediator");
    require(o.outcome, "--outcome");
    MediationSpec spec{o.exposure, o.mediator, o.outcome, o.x0, o.x1, {}};
    MediationReport r;
    if (!o.scm.empty()) {
        r = mediation_effects(parse_scm(read_file(o.scm)), spec);
    } else {
        require(o.graph, "--graph or --scm");
        require(o.data, "--data");
        r = mediation_effects(load_table_file(o.data), parse_graph(read_file(o.graph)), spec);
    }
    const char* sep = o.porcelain ? "\t" : " = ";
    out << "TE" << sep << num(r.te) << '\n';
    out << "NDE" << sep << num(r.nde) << '\n';
    out << "NIE" << sep << num(r.nie) << '\n';
    out << "NIE_reversed" << sep << num(r.nie_reversed) << '\n';
    out << "mediated_fraction" << sep << (r.mediated_fraction ? num(*r.mediated_fraction) : "undefined") << '\n';
    out << "source" << sep << (r.source == MediationReport::Source::ScmExact ? "scm-exact" : "data-formula") << '\n';
    return kExitOk;
}

int cmd_recover(const Options& o, std::ostream& out, std::ostream& err) {
    require(o.graph, "--graph");
    if (o.target.empty()) throw Error("missing required option --target");
    const MGraph mg = parse_mgraph(read_file(o.graph));
    const auto result = recoverability(mg, o.target);
    if (const auto* u = std::get_if<Unrecoverable>(&result)) {
        err << "not recoverable: " << u->reason << '\n';
        return kExitInsufficientData;
    }
    const auto& rec = std::get<Recoverable>(result);
    if (o.porcelain) out << criterion_name(rec.criterion) << '\t' << render(rec.estimand) << '\n';
    else out << "criterion: " << criterion_name(rec.criterion) << "\nestimand: " << render(rec.estimand) << '\n';
    if (o.data.empty()) return kExitOk;
    const Dataset d = load_table_file(o.data);
    const auto free = free_symbols(rec.estimand);
    for (const auto& b : bindings_for(free, d)) {
        const auto est = recover_estimate(mg, d, o.target, b);
        out << "P(" << describe_binding(free, b) << ')' << (o.porcelain ? "\t" : " = ") << num(est.value) << '\n';
    }
    return kExitOk;
}

int cmd_discover(const Options& o, std::ostream& out, std::ostream&) {
    Cpdag c;
    if (!o.data.empty()) {
        const Dataset d = load_table_file(o.data);
        DataOracle oracle(d, o.alpha);
        c = discover_cpdag(oracle, o.vars.empty() ? d.columns() : o.vars);
    } else {
        require(o.graph, "--data or --graph");
        const Admg g = parse_graph(read_file(o.graph));
        if (!g.bidirected_edges().empty()) throw Error("discovery assumes no latent confounders; graph has bidirected edges");
        c = discover_cpdag(GraphOracle(g), o.vars.empty() ? g.names() : o.vars);
    }
    out << serialize_cpdag(c);
    return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"causeway: causal identification, estimation and model checking", "causeway"};
    app.require_subcommand(1);
    Options o;

    auto add_porcelain = [&](CLI::App* c) { c->add_flag("--porcelain", o.porcelain, "Tab-separated output"); };

    auto* identify_cmd = app.add_subcommand("identify", "Estimand for a query, or FAILURE with a hedge witness");
    identify_cmd->add_option("--graph", o.graph, "Graph file")->required();
    identify_cmd->add_option("--query", o.query, "Query, e.g. P(Y|do(X))")->required();
    add_porcelain(identify_cmd);

    auto* estimate_cmd = app.add_subcommand("estimate", "Identify, then plug in data");
    estimate_cmd->add_option("--graph", o.graph, "Graph file")->required();
    estimate_cmd->add_option("--data", o.data, "CSV data")->required();
    estimate_cmd->add_option("--query", o.query, "Query")->required();
    estimate_cmd->add_option("--bootstrap", o.bootstrap, "Bootstrap replicates (0 = none)");
    estimate_cmd->add_option("--level", o.level, "Confidence level");
    estimate_cmd->add_option("--seed", o.seed, "Bootstrap seed");
    add_porcelain(estimate_cmd);

    auto* fit_cmd = app.add_subcommand("fit", "Test the graph's implied independencies against data");
    fit_cmd->add_option("--graph", o.graph, "Graph file")->required();
    fit_cmd->add_option("--data", o.data, "CSV data")->required();
    fit_cmd->add_option("--alpha", o.alpha, "Significance level");
    fit_cmd->add_flag("--bonferroni", o.bonferroni, "Bonferroni-adjust across statements");
    add_porcelain(fit_cmd);

    auto* cf_cmd = app.add_subcommand("counterfactual", "Evaluate P(y_x | evidence) in an SCM");
    cf_cmd->add_option("--scm", o.scm, "SCM file")->required();
    cf_cmd->add_option("--query", o.query, "Counterfactual query, e.g. P(Y_{X=1}=1|X=0,Y=0)")->required();
    add_porcelain(cf_cmd);

    auto* pnps_cmd = app.add_subcommand("pnps", "Probabilities of necessity and sufficiency");
    pnps_cmd->add_option("--scm", o.scm, "SCM file (exact values)");
    pnps_cmd->add_option("--data", o.data, "Observational CSV (bounds)");
    pnps_cmd->add_option("--exposure", o.exposure, "Cause variable")->required();
    pnps_cmd->add_option("--outcome", o.outcome, "Effect variable")->required();
    pnps_cmd->add_option("--px1", o.px1, "P(y|do(x))");
    pnps_cmd->add_option("--px0", o.px0, "P(y|do(x'))");
    pnps_cmd->add_option("--experimental", o.experimental, "File with `px1 <p>` and `px0 <p>` lines");
    pnps_cmd->add_option("--x1", o.x1, "Treated value");
    pnps_cmd->add_option("--x0", o.x0, "Untreated value");
    pnps_cmd->add_option("--y1", o.y1, "Response value");
    pnps_cmd->add_option("--y0", o.y0, "Non-response value");
    add_porcelain(pnps_cmd);

    auto* med_cmd = app.add_subcommand("mediate", "Natural direct and indirect effects");
    med_cmd->add_option("--scm", o.scm, "SCM file (exact)");
    med_cmd->add_option("--graph", o.graph, "Graph file (data mode)");
    med_cmd->add_option("--data", o.data, "CSV data (data mode)");
    med_cmd->add_option("--exposure", o.exposure, "Exposure variable")->required();
    med_cmd->add_option("--mediator", o.mediator, "Mediator variable")->required();
    med_cmd->add_option("--outcome", o.outcome, "Outcome variable")->required();
    med_cmd->add_option("--x0", o.x0, "Baseline exposure value");
    med_cmd->add_option("--x1", o.x1, "Treated exposure value");
    add_porcelain(med_cmd);

    auto* rec_cmd = app.add_subcommand("recover", "Missing-data recoverability over an m-graph");
    rec_cmd->add_option("--graph", o.graph, "M-graph file")->required();
    rec_cmd->add_option("--target", o.target, "Target variables")->required()->delimiter(',');
    rec_cmd->add_option("--data", o.data, "CSV data with NA cells");
    add_porcelain(rec_cmd);

    auto* disc_cmd = app.add_subcommand("discover", "PC structure discovery");
    disc_cmd->add_option("--data", o.data, "CSV data (G-test oracle)");
    disc_cmd->add_option("--graph", o.graph, "DAG file (d-separation oracle)");
    disc_cmd->add_option("--alpha", o.alpha, "Test level for the data oracle");
    disc_cmd->add_option("--vars", o.vars, "Variables to include")->delimiter(',');

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kExitInput;
    }

    const auto* cmd = app.get_subcommands().front();
    const std::string name = cmd->get_name();
    try {
        if (name == "identify") return cmd_identify(o, out, err);
        if (name == "estimate") return cmd_estimate(o, out, err);
        if (name == "fit") return cmd_fit(o, out, err);
        if (name == "counterfactual") return cmd_counterfactual(o, out, err);
        if (name == "pnps") return cmd_pnps(o, out, err);
        if (name == "mediate") return cmd_mediate(o, out, err);
        if (name == "recover") return cmd_recover(o, out, err);
        return cmd_discover(o, out, err);
    } catch (const ConditioningOnZero& e) {
        err << "error: " << e.what() << '\n';
        return kExitInsufficientData;
    } catch (const MissingDataPresent& e) {
        err << "error: " << e.what() << '\n';
        return kExitInsufficientData;
    } catch (const TooManyDegenerateResamples& e) {
        err << "error: " << e.what() << '\n';
        return kExitInsufficientData;
    } catch (const NotRecoverable& e) {
        err << "error: " << e.what() << '\n';
        return kExitInsufficientData;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitInput;
    }
}

}  // namespace causeway
