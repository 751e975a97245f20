// One PASS/FAIL line per acceptance criterion; nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "causeway/cli.hpp"
#include "causeway/counterfactual_metrics.hpp"
#include "causeway/discover.hpp"
#include "causeway/errors.hpp"
#include "causeway/fitcheck.hpp"
#include "causeway/identify.hpp"
#include "causeway/mediation.hpp"
#include "causeway/recover.hpp"
#include "causeway/scm.hpp"
#include "test_util.hpp"

using namespace causeway;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

struct Criterion {
    int id;
    std::string name;
    double budget_seconds;
    std::function<Outcome()> run;
};

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

int cli(std::vector<std::string> args, std::string* out = nullptr, std::string* err = nullptr) {
    std::ostringstream o, e;
    const int code = run_cli(args, o, e);
    if (out) *out = o.str();
    if (err) *err = e.str();
    return code;
}

std::string data(const std::string& name) { return testutil::data_path(name); }

std::string write_temp(const std::string& name, const std::string& text) {
    const std::string path = std::string(CAUSEWAY_TEST_BINARY_DIR) + "/" + name;
    std::ofstream(path) << text;
    return path;
}

testutil::Assignment bind_terms(const std::vector<Assignment>& terms, const Binding& b) {
    testutil::Assignment out;
    for (const auto& a : terms) out[a.var] = a.value.is_symbol() ? b.at(a.value.text) : a.value.text;
    return out;
}

std::vector<Binding> binary_bindings(const std::map<std::string, std::string>& symbols) {
    std::vector<Binding> out{{}};
    for (const auto& entry : symbols) {
        std::vector<Binding> next;
        for (const auto& b : out)
            for (const char* v : {"0", "1"}) {
                auto nb = b;
                nb[entry.first] = v;
                next.push_back(nb);
            }
        out = next;
    }
    return out;
}

// Joint over the endogenous variables under do(forced), by enumeration.
std::map<testutil::Assignment, double> world_joint(const DiscreteScm& m, const testutil::Assignment& forced = {}) {
    std::map<testutil::Assignment, double> out;
    for (const auto& s : testutil::exo_states(m)) {
        auto w = testutil::evaluate(m, s.values, forced);
        testutil::Assignment endo;
        for (const auto& name : m.endogenous_names()) endo[name] = w[name];
        out[endo] += s.p;
    }
    return out;
}

double joint_gap(const std::map<testutil::Assignment, double>& a, const std::map<testutil::Assignment, double>& b) {
    double gap = 0;
    for (const auto& [k, p] : a) {
        auto it = b.find(k);
        gap = std::max(gap, std::abs(p - (it == b.end() ? 0.0 : it->second)));
    }
    for (const auto& [k, p] : b)
        if (!a.count(k)) gap = std::max(gap, p);
    return gap;
}

// Table text for a binary function given as bits over the input rows.
std::string table(const std::vector<std::vector<std::string>>& rows, unsigned bits) {
    std::string s = "{";
    for (std::size_t i = 0; i < rows.size(); ++i) {
        s += i ? ", (" : "(";
        for (std::size_t j = 0; j < rows[i].size(); ++j) s += (j ? "," : "") + rows[i][j];
        s += std::string(") -> ") + (((bits >> i) & 1U) ? "1" : "0");
    }
    return s + "}";
}

// --- criteria ---------------------------------------------------------------

Outcome golden_path() {
    Outcome o;
    std::string out;
    const int code = cli({"identify", "--graph", data("confounded.cg"), "--query", "P(Y|do(X))"}, &out);
    if (code != 0 || out != "sum_{z} P(y|x,z) * P(z)\n") return {false, "identify printed '" + out + "'"};
    std::ostringstream csv;
    write_table(csv, sample(parse_scm(testutil::read_file(data("confounded.scm"))), 1000, 1));
    const auto path = write_temp("acceptance_confounded.csv", csv.str());
    if (cli({"fit", "--graph", data("confounded.cg"), "--data", path}, &out) != 0 || out != "NULL\n")
        return {false, "fit printed '" + out + "'"};
    o.detail = "estimand and NULL fit index match";
    return o;
}

Outcome identification_sweep() {
    testutil::Rng rng(2024);
    std::size_t identified = 0, refused = 0, checked = 0;
    double worst = 0;
    while (identified < 1000) {
        const std::size_t n = 2 + testutil::below(rng, 5);
        auto g = testutil::random_admg(rng, n, testutil::uniform(rng, 0.2, 0.7), testutil::uniform(rng, 0.0, 0.4));
        auto names = g.names();
        std::shuffle(names.begin(), names.end(), rng);
        CausalQuery q;
        auto term = [](const std::string& v) { return Assignment{v, ValueRef::symbol(default_symbol(v))}; };
        std::size_t k = 0;
        q.outcome.push_back(term(names[k++]));
        q.intervention.push_back(term(names[k++]));
        if (k < n && testutil::below(rng, 3) == 0) q.outcome.push_back(term(names[k++]));
        if (k < n && testutil::below(rng, 3) == 0) q.intervention.push_back(term(names[k++]));
        if (k < n && testutil::below(rng, 3) == 0) q.condition.push_back(term(names[k++]));
        const auto r = identify(g, q);
        if (!std::holds_alternative<Identified>(r)) {
            ++refused;
            continue;
        }
        ++identified;
        const auto& e = std::get<Identified>(r).estimand;
        const auto m = testutil::random_positive_scm(rng, g);
        const auto obs = observational_joint(m);
        std::map<std::string, std::string> symbols;
        for (const auto* terms : {&q.outcome, &q.intervention, &q.condition})
            for (const auto& a : *terms) symbols[a.value.text] = a.var;
        for (const auto& b : binary_bindings(symbols)) {
            const auto y = bind_terms(q.outcome, b), x = bind_terms(q.intervention, b), z = bind_terms(q.condition, b);
            auto yz = y;
            yz.insert(z.begin(), z.end());
            const double truth =
                testutil::prob_do(m, yz, x) / (z.empty() ? 1.0 : testutil::prob_do(m, z, x));
            worst = std::max(worst, std::abs(eval_estimand(e, obs, b) - truth));
            ++checked;
        }
    }
    return {worst <= 1e-9, std::to_string(identified) + " identified (" + std::to_string(refused) + " refused), " +
                               std::to_string(checked) + " cells, max error " + fmt("%.2e", worst)};
}

Outcome witness() {
    std::string err;
    if (cli({"identify", "--graph", data("bow.cg"), "--query", "P(Y|do(X))"}, nullptr, &err) != 2 ||
        err.rfind("FAILURE", 0) != 0)
        return {false, "bow graph was not refused with exit 2"};
    const auto w = testutil::find_witness_pair(parse_graph(testutil::read_file(data("bow.cg"))), "X", "Y");
    if (!w.found) return {false, "no witness pair found"};
    // Re-measure with the engine.
    const auto a = parse_scm(w.first), b = parse_scm(w.second);
    const auto ja = observational_joint(a), jb = observational_joint(b);
    double obs_gap = 0, do_gap = 0;
    for (std::size_t c = 0; c < ja.cells(); ++c) obs_gap = std::max(obs_gap, std::abs(ja.mass(c) - jb.mass(c)));
    for (const char* x : {"0", "1"}) {
        const double pa = observational_joint(intervene(a, {{"X", x}})).probability({{"Y", "1"}});
        const double pb = observational_joint(intervene(b, {{"X", x}})).probability({{"Y", "1"}});
        do_gap = std::max(do_gap, std::abs(pa - pb));
    }
    return {obs_gap <= 1e-9 && do_gap >= 1e-3 && w.obs_gap <= 1e-9 && w.do_gap >= 1e-3,
            "observational gap " + fmt("%.1e", obs_gap) + ", interventional gap " + fmt("%.3f", do_gap)};
}

Outcome hierarchy() {
    const std::vector<std::vector<std::string>> unary{{"0"}, {"1"}};
    const std::vector<std::vector<std::string>> binary{{"0", "0"}, {"0", "1"}, {"1", "0"}, {"1", "1"}};

    // Layer 1 vs 2: X := g(U), Y := f(X, U) with one fair latent U.
    std::vector<DiscreteScm> confounded;
    for (unsigned gx = 0; gx < 4; ++gx)
        for (unsigned fy = 0; fy < 16; ++fy)
            confounded.push_back(parse_scm("exo U {0: 0.5, 1: 0.5}\nendo X (U) " + table(unary, gx) +
                                           "\nendo Y (X, U) " + table(binary, fy) + "\n"));
    bool found12 = false;
    std::string note12;
    for (std::size_t i = 0; i < confounded.size() && !found12; ++i)
        for (std::size_t j = i + 1; j < confounded.size() && !found12; ++j) {
            if (joint_gap(world_joint(confounded[i]), world_joint(confounded[j])) > 1e-12) continue;
            for (const char* x : {"0", "1"}) {
                const double a = testutil::prob_do(confounded[i], {{"Y", "1"}}, {{"X", x}});
                const double b = testutil::prob_do(confounded[j], {{"Y", "1"}}, {{"X", x}});
                const double ea = observational_joint(intervene(confounded[i], {{"X", x}})).probability({{"Y", "1"}});
                const double eb = observational_joint(intervene(confounded[j], {{"X", x}})).probability({{"Y", "1"}});
                if (std::abs(a - b) >= 1e-3 && std::abs(ea - a) < 1e-12 && std::abs(eb - b) < 1e-12) {
                    found12 = true;
                    note12 = "P(Y=1|do(X=" + std::string(x) + ")) " + fmt("%.2f", a) + " vs " + fmt("%.2f", b);
                    break;
                }
            }
        }

    // Layer 2 vs 3: X := U_X, Y := f(X, U_Y) with independent fair latents.
    std::vector<DiscreteScm> markovian;
    for (unsigned fy = 0; fy < 16; ++fy)
        markovian.push_back(parse_scm("exo UX {0: 0.5, 1: 0.5}\nexo UY {0: 0.5, 1: 0.5}\nendo X (UX) " +
                                      table(unary, 1 << 1) + "\nendo Y (X, UY) " + table(binary, fy) + "\n"));
    auto same_layer2 = [&](const DiscreteScm& a, const DiscreteScm& b) {
        if (joint_gap(world_joint(a), world_joint(b)) > 1e-12) return false;
        for (const char* var : {"X", "Y"})
            for (const char* v : {"0", "1"})
                if (joint_gap(world_joint(a, {{var, v}}), world_joint(b, {{var, v}})) > 1e-12) return false;
        return true;
    };
    bool found23 = false;
    std::string note23;
    for (std::size_t i = 0; i < markovian.size() && !found23; ++i)
        for (std::size_t j = i + 1; j < markovian.size() && !found23; ++j) {
            if (!same_layer2(markovian[i], markovian[j])) continue;
            for (const char* x : {"0", "1"})
                for (const char* y : {"0", "1"}) {
                    const std::string xp = x[0] == '0' ? "1" : "0";
                    const CounterfactualQuery q{{{"Y", "1"}}, {{"X", x}}, {{"X", xp}, {"Y", y}}};
                    const double oa = testutil::prob_counterfactual(markovian[i], q.target, q.antecedent, q.evidence);
                    const double ob = testutil::prob_counterfactual(markovian[j], q.target, q.antecedent, q.evidence);
                    if (oa < 0 || ob < 0) continue;  // evidence impossible in one of the models
                    const double a = counterfactual_query(markovian[i], q);
                    const double b = counterfactual_query(markovian[j], q);
                    if (!found23 && std::abs(a - b) >= 1e-3 && std::abs(a - oa) < 1e-12 && std::abs(b - ob) < 1e-12) {
                        found23 = true;
                        note23 = "P(Y_{X=" + std::string(x) + "}=1|X=" + xp + ",Y=" + y + ") " + fmt("%.2f", a) +
                                 " vs " + fmt("%.2f", b);
                    }
                }
        }
    return {found12 && found23, (found12 ? note12 : "no layer-1 pair") + "; " + (found23 ? note23 : "no layer-2 pair")};
}

Outcome counterfactual_engine() {
    testutil::Rng rng(5);
    double worst = 0;
    std::size_t zero = 0, consistency_failures = 0, evaluated = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t n = 2 + testutil::below(rng, 3);
        const auto g = testutil::random_admg(rng, n, 0.5, 0.3);
        const auto m = testutil::random_general_scm(rng, g);
        auto names = g.names();
        std::shuffle(names.begin(), names.end(), rng);
        auto bit = [&] { return std::string(testutil::below(rng, 2) ? "1" : "0"); };
        CounterfactualQuery q;
        q.target[names[0]] = bit();
        q.antecedent[names[1]] = bit();
        for (std::size_t i = 0; i < n; ++i)
            if (testutil::below(rng, 2)) q.evidence[names[i]] = bit();
        const double oracle = testutil::prob_counterfactual(m, q.target, q.antecedent, q.evidence);
        try {
            const double v = counterfactual_query(m, q);
            if (oracle < 0) return {false, "engine answered a zero-evidence query"};
            worst = std::max(worst, std::abs(v - oracle));
            ++evaluated;
        } catch (const ZeroEvidence&) {
            if (oracle >= 0) return {false, "engine refused a query with positive evidence"};
            ++zero;
        }
        // Consistency: Y_x = y whenever X = x and Y = y were observed.
        const auto world = testutil::evaluate(m, testutil::exo_states(m).front().values);
        const CounterfactualQuery c{{{names[0], world.at(names[0])}},
                                    {{names[1], world.at(names[1])}},
                                    {{names[1], world.at(names[1])}, {names[0], world.at(names[0])}}};
        if (std::abs(counterfactual_query(m, c) - 1.0) > 1e-12) ++consistency_failures;
    }
    return {worst <= 1e-12 && consistency_failures == 0,
            std::to_string(evaluated) + " queries (" + std::to_string(zero) + " zero-evidence), max error " +
                fmt("%.2e", worst) + ", consistency failures " + std::to_string(consistency_failures)};
}

Outcome dsep_equivalence() {
    testutil::Rng rng(6);
    std::size_t mismatches = 0, separated = 0;
    for (int trial = 0; trial < 10000; ++trial) {
        const std::size_t n = 3 + testutil::below(rng, 6);
        const auto g = testutil::random_admg(rng, n, testutil::uniform(rng, 0.1, 0.5), testutil::uniform(rng, 0.0, 0.2));
        std::vector<std::string> a, b, z;
        for (const auto& v : g.names()) {
            switch (testutil::below(rng, 5)) {
            case 0: a.push_back(v); break;
            case 1: b.push_back(v); break;
            case 2: z.push_back(v); break;
            default: break;
            }
        }
        if (a.empty() || b.empty()) {
            a = {g.names()[0]};
            b = {g.names()[1]};
            z.erase(std::remove_if(z.begin(), z.end(), [&](const std::string& v) { return v == a[0] || v == b[0]; }),
                    z.end());
        }
        const bool fast = d_separated(g, a, b, z);
        separated += fast ? 1 : 0;
        if (fast != testutil::path_dsep(g, a, b, z)) ++mismatches;
    }
    return {mismatches == 0, "10000 instances, " + std::to_string(separated) + " separated, " +
                                 std::to_string(mismatches) + " mismatches"};
}

Outcome pnps_containment() {
    testutil::Rng rng(7);
    const std::vector<Admg> graphs{parse_graph("var X\nvar Y\nX -> Y\nX <-> Y"),
                                   parse_graph("var X\nvar Y\nvar Z\nX -> Z\nZ -> Y\nX <-> Y"),
                                   parse_graph("var X\nvar Y\nvar W\nW -> X\nW -> Y\nX -> Y")};
    std::size_t outside = 0, checked = 0;
    auto inside = [](const std::optional<Bounds>& b, double v) {
        return b && b->low - 1e-9 <= v && v <= b->high + 1e-9;
    };
    for (int trial = 0; trial < 1000; ++trial) {
        const auto m = testutil::random_general_scm(rng, graphs[static_cast<std::size_t>(trial) % graphs.size()]);
        const auto exact = pn_ps_exact(m, "X", "Y");
        const double px1 = observational_joint(intervene(m, {{"X", "1"}})).probability({{"Y", "1"}});
        const double px0 = observational_joint(intervene(m, {{"X", "0"}})).probability({{"Y", "1"}});
        const auto b = pnps_bounds(observational_joint(m).marginal({"X", "Y"}), "X", "Y", px1, px0);
        bool ok = inside(b.pns_bounds, *exact.pns);
        if (exact.pn) ok = ok && inside(b.pn_bounds, *exact.pn);
        if (exact.ps) ok = ok && inside(b.ps_bounds, *exact.ps);
        outside += ok ? 0 : 1;
        ++checked;
    }
    // Monotone outcome Y = X or U: PNS equals the risk difference.
    double worst = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const double pu = testutil::uniform(rng, 0.05, 0.95), pv = testutil::uniform(rng, 0.05, 0.95);
        const auto m = parse_scm("exo U {0: " + fmt("%.17g", 1 - pu) + ", 1: " + fmt("%.17g", pu) + "}\n" +
                                 "exo V {0: " + fmt("%.17g", 1 - pv) + ", 1: " + fmt("%.17g", pv) + "}\n" +
                                 "endo X (V) {(0) -> 0, (1) -> 1}\n" +
                                 "endo Y (X, U) {(0,0) -> 0, (0,1) -> 1, (1,0) -> 1, (1,1) -> 1}\n");
        const double px1 = testutil::prob_do(m, {{"Y", "1"}}, {{"X", "1"}});
        const double px0 = testutil::prob_do(m, {{"Y", "1"}}, {{"X", "0"}});
        worst = std::max(worst, std::abs(*pn_ps_exact(m, "X", "Y").pns - (px1 - px0)));
    }
    return {outside == 0 && worst <= 1e-9, std::to_string(checked) + " models, " + std::to_string(outside) +
                                               " outside bounds; monotone PNS max error " + fmt("%.2e", worst)};
}

Outcome mediation_identity() {
    testutil::Rng rng(8);
    const MediationSpec spec{"X", "M", "Y"};
    const auto triangle = parse_graph("var X\nvar M\nvar Y\nX -> M\nM -> Y\nX -> Y");
    const auto confounded = parse_graph("var X\nvar M\nvar Y\nX -> M\nM -> Y\nX -> Y\nM <-> Y\nX <-> M");
    double identity = 0, formula = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const auto m = testutil::random_general_scm(rng, trial % 2 ? confounded : triangle);
        const auto r = mediation_effects(m, spec);
        identity = std::max(identity, std::abs(r.te - (r.nde - r.nie_reversed)));

        const auto p = testutil::random_positive_scm(rng, triangle);
        const auto exact = mediation_effects(p, spec);
        const auto f = mediation_formula(observational_joint(p), spec);
        formula = std::max({formula, std::abs(exact.te - f.te), std::abs(exact.nde - f.nde),
                            std::abs(exact.nie - f.nie), std::abs(exact.nie_reversed - f.nie_reversed)});
    }
    return {identity <= 1e-9 && formula <= 1e-9,
            "identity max error " + fmt("%.2e", identity) + ", formula max error " + fmt("%.2e", formula)};
}

Outcome missing_data() {
    const auto m = parse_scm(testutil::read_file(data("mar.scm")));
    const auto d = testutil::mask_column(sample(m, 100000, 2024), "Y", "R_Y", "miss");
    const double truth = testutil::prob_do(m, {{"Y", "1"}});
    const auto mg = parse_mgraph(testutil::read_file(data("mar.mg")));
    const double recovered = recover_estimate(mg, d, {"Y"}, {{"y", "1"}}).value;
    const auto y = d.require_column("Y");
    double seen = 0, hits = 0;
    for (std::size_t r = 0; r < d.num_rows(); ++r) {
        if (d.missing(r, y)) continue;
        ++seen;
        hits += d.domain(y)[static_cast<std::size_t>(d.cell(r, y))] == "1" ? 1 : 0;
    }
    const double naive = hits / seen;
    bool refused = false;
    try {
        recover_estimate(parse_mgraph(testutil::read_file(data("selfmask.mg"))), d, {"Y"}, {{"y", "1"}});
    } catch (const NotRecoverable&) {
        refused = true;
    }
    const bool cli_refused = cli({"recover", "--graph", data("selfmask.mg"), "--target", "Y"}) == 3;
    const double err = std::abs(recovered - truth), bias = std::abs(naive - truth);
    return {err < 0.015 && bias > 0.05 && refused && cli_refused,
            "recovered error " + fmt("%.4f", err) + ", complete-case bias " + fmt("%.4f", bias) +
                (refused && cli_refused ? ", self-masking refused" : ", self-masking NOT refused")};
}

Outcome discovery() {
    std::size_t dags = 0, wrong = 0;
    for (std::size_t n = 2; n <= 5; ++n) {
        const auto nodes = testutil::letters(n);
        const testutil::CpdagOracle oracle(nodes);
        for (const auto& dag : oracle.dags()) {
            ++dags;
            if (discover_cpdag(GraphOracle(dag), nodes) != oracle.cpdag_of(dag)) ++wrong;
        }
    }
    return {wrong == 0, std::to_string(dags) + " DAGs on 2-5 nodes, " + std::to_string(wrong) + " wrong"};
}

Outcome fit_calibration() {
    // Fork-and-chain graph with several implied independencies.
    const auto g = parse_graph("var A\nvar B\nvar C\nvar D\nA -> B\nB -> C\nB -> D");
    testutil::Rng rng(11);
    const auto m = testutil::random_positive_scm(rng, g);
    std::vector<std::size_t> rejections;
    std::vector<std::string> statements;
    const int sims = 500;
    for (int s = 0; s < sims; ++s) {
        const auto report = fit_indices(g, sample(m, 2000, 7000 + static_cast<std::uint64_t>(s)), {0.05, false});
        if (rejections.empty()) {
            rejections.assign(report.entries.size(), 0);
            for (const auto& e : report.entries) statements.push_back(e.statement.to_string());
        }
        for (std::size_t i = 0; i < report.entries.size(); ++i) rejections[i] += report.entries[i].rejected ? 1 : 0;
    }
    bool ok = !rejections.empty();
    std::string detail;
    for (std::size_t i = 0; i < rejections.size(); ++i) {
        const double rate = static_cast<double>(rejections[i]) / sims;
        ok = ok && rate >= 0.01 && rate <= 0.10;
        detail += (i ? ", " : "") + statements[i] + ": " + fmt("%.3f", rate);
    }
    return {ok, detail};
}

}  // namespace

int main() {
    const std::vector<Criterion> criteria{
        {1, "golden path", 1, golden_path},
        {2, "identification soundness", 300, identification_sweep},
        {3, "non-identifiability witness", 30, witness},
        {4, "hierarchy directionality", 120, hierarchy},
        {5, "counterfactual engine", 120, counterfactual_engine},
        {6, "d-separation equivalence", 60, dsep_equivalence},
        {7, "PN/PS containment", 120, pnps_containment},
        {8, "mediation identity", 120, mediation_identity},
        {9, "missing data", 60, missing_data},
        {10, "discovery", 600, discovery},
        {11, "fit calibration", 300, fit_calibration},
    };
    int failures = 0;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (seconds > c.budget_seconds) {
            o.pass = false;
            o.detail += "; over time budget of " + fmt("%.0f", c.budget_seconds) + " s";
        }
        failures += o.pass ? 0 : 1;
        std::cout << (o.pass ? "PASS" : "FAIL") << "  criterion " << c.id << " (" << c.name << "): " << o.detail
                  << " [" << fmt("%.2f", seconds) << " s]" << std::endl;
    }
    return failures == 0 ? 0 : 1;
}
