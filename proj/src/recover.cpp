#include "causeway/recover.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <sstream>

#include "causeway/errors.hpp"
#include "causeway/values.hpp"
#include "line_format.hpp"

namespace causeway {

std::string indicator_name(std::string_view var) { return "R_" + std::string(var); }

MGraph::MGraph(Admg combined, std::vector<std::string> partially_observed)
    : graph_(std::move(combined)), partial_(std::move(partially_observed)) {
    std::sort(partial_.begin(), partial_.end());
    if (std::adjacent_find(partial_.begin(), partial_.end()) != partial_.end())
        throw ModelError("variable declared missing twice");
    std::set<std::string> indicators;
    for (const auto& v : partial_) {
        if (!graph_.find(v)) throw ModelError("missing variable '" + v + "' is not in the graph");
        if (!graph_.find(indicator_name(v))) throw ModelError("indicator '" + indicator_name(v) + "' is not in the graph");
        indicators.insert(indicator_name(v));
    }
    for (const auto& n : graph_.names()) {
        if (indicators.count(n)) continue;
        if (n.rfind("R_", 0) == 0) throw ModelError("'" + n + "' looks like an indicator but no 'missing' line declares it");
        substantive_.push_back(n);
    }
    for (const auto& v : partial_) {
        if (indicators.count(v)) throw ModelError("indicators cannot themselves be missing");
    }
    const NodeSet ind = graph_.ids({indicators.begin(), indicators.end()});
    for (auto r : ind) {
        if (graph_.children(r) - ind != NodeSet{})
            throw ModelError("indicator '" + graph_.name(r) + "' must not be a parent of a substantive variable");
    }
}

Admg MGraph::base() const { return graph_.induced(graph_.ids(substantive_)); }

bool MGraph::is_partially_observed(std::string_view var) const {
    return std::binary_search(partial_.begin(), partial_.end(), var);
}

bool MGraph::is_substantive(std::string_view var) const {
    return std::binary_search(substantive_.begin(), substantive_.end(), var);
}

MGraph parse_mgraph(std::string_view text) {
    std::vector<std::string> raw;
    {
        std::string line;
        std::istringstream in{std::string(text)};
        while (std::getline(in, line)) raw.push_back(line);
    }
    std::vector<std::string> missing;
    for (const auto& line : detail::tokenize_lines(text)) {
        const auto& t = line.tokens;
        if (t[0].text != "missing") continue;
        if (t.size() != 2) line.fail("expected 'missing NAME'", t.size() < 2 ? 1 : 2);
        if (!is_identifier(t[1].text)) line.fail("invalid variable name '" + t[1].text + "'", 1);
        if (std::find(missing.begin(), missing.end(), t[1].text) != missing.end())
            line.fail("'" + t[1].text + "' already declared missing", 1);
        missing.push_back(t[1].text);
        raw[line.number - 1] = "var " + indicator_name(t[1].text);
    }
    std::string rewritten;
    for (const auto& line : raw) rewritten += line + '\n';
    return MGraph(parse_graph(rewritten), std::move(missing));
}

std::string serialize_mgraph(const MGraph& mg) {
    std::ostringstream out;
    const auto& g = mg.graph();
    for (const auto& n : mg.substantive()) out << "var " << n << '\n';
    for (const auto& v : mg.partially_observed()) out << "missing " << v << '\n';
    for (auto [a, b] : g.directed_edges()) out << g.name(a) << " -> " << g.name(b) << '\n';
    for (auto [a, b] : g.bidirected_edges()) out << g.name(a) << " <-> " << g.name(b) << '\n';
    return out.str();
}

std::string criterion_name(Recoverable::Criterion c) {
    switch (c) {
    case Recoverable::Criterion::FullyObserved: return "fully-observed";
    case Recoverable::Criterion::Mcar: return "mcar";
    case Recoverable::Criterion::Mar: return "mar";
    case Recoverable::Criterion::OrderedFactorization: return "ordered-factorization";
    }
    return "";
}

namespace {

Assignment sym(const std::string& var) { return {var, ValueRef::symbol(default_symbol(var))}; }

std::vector<Assignment> syms(const std::vector<std::string>& vars) {
    std::vector<Assignment> out;
    for (const auto& v : vars) out.push_back(sym(v));
    return out;
}

std::vector<Assignment> observed(const std::vector<std::string>& vars) {
    std::vector<Assignment> out;
    for (const auto& v : vars) out.push_back({indicator_name(v), ValueRef::literal(std::string(kObserved))});
    return out;
}

template <class T>
std::vector<T> concat(std::vector<T> a, const std::vector<T>& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
}

}  // namespace

RecoverResult recoverability(const MGraph& mg, const std::vector<std::string>& target_in) {
    if (target_in.empty()) throw Error("recoverability needs a nonempty target");
    std::vector<std::string> target = target_in;
    std::sort(target.begin(), target.end());
    if (std::adjacent_find(target.begin(), target.end()) != target.end()) throw Error("target lists a variable twice");
    for (const auto& t : target) {
        if (!mg.graph().find(t)) throw UnknownVariable(t);
        if (!mg.is_substantive(t)) throw Error("target '" + t + "' is a missingness indicator");
    }
    const Admg& g = mg.graph();
    std::vector<std::string> t_miss, t_obs;
    for (const auto& t : target) (mg.is_partially_observed(t) ? t_miss : t_obs).push_back(t);

    if (t_miss.empty()) return Recoverable{Estimand::prob(syms(target)), Recoverable::Criterion::FullyObserved};

    std::vector<std::string> r_miss;
    for (const auto& v : t_miss) r_miss.push_back(indicator_name(v));
    const NodeSet rs = g.ids(r_miss);

    // (i) indicators independent of the whole target.
    if (d_separated(g, rs, g.ids(target), NodeSet{}))
        return Recoverable{Estimand::prob(syms(target), observed(t_miss)), Recoverable::Criterion::Mcar};

    // (ii) stratify on fully observed variables outside the target.
    std::vector<std::string> pool;
    for (const auto& v : mg.substantive()) {
        if (!mg.is_partially_observed(v) && !std::binary_search(target.begin(), target.end(), v)) pool.push_back(v);
    }
    const NodeSet pool_ids = g.ids(pool);
    const NodeSet tm = g.ids(t_miss);
    const NodeSet to = g.ids(t_obs);
    std::vector<NodeSet> candidates;
    for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << pool.size()); ++bits) {
        NodeSet s;
        std::size_t i = 0;
        for (auto v : pool_ids) {
            if ((bits >> i++) & 1U) s.insert(v);
        }
        candidates.push_back(s);
    }
    std::stable_sort(candidates.begin(), candidates.end(), [](NodeSet a, NodeSet b) {
        return a.size() != b.size() ? a.size() < b.size() : lex_less(a, b);
    });
    for (NodeSet s : candidates) {
        if (!d_separated(g, rs, tm, s | to)) continue;
        const auto s_names = g.names_of(s);
        Estimand body = Estimand::product(
            {Estimand::prob(syms(t_miss), concat(syms(concat(t_obs, s_names)), observed(t_miss))),
             Estimand::prob(syms(concat(t_obs, s_names)))});
        if (s_names.empty() && t_obs.empty()) body = body.factors().front();
        for (auto it = s_names.rbegin(); it != s_names.rend(); ++it) body = Estimand::sum(default_symbol(*it), *it, body);
        return Recoverable{body, Recoverable::Criterion::Mar};
    }

    // (iii) sequential factorization in some order of the target.
    std::vector<std::string> order = target;
    do {
        std::vector<Estimand> factors;
        bool ok = true;
        for (std::size_t i = 0; i < order.size() && ok; ++i) {
            std::vector<std::string> prefix(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(i));
            std::vector<std::string> need;
            for (std::size_t j = 0; j <= i; ++j) {
                if (mg.is_partially_observed(order[j])) need.push_back(order[j]);
            }
            std::vector<std::string> r_need;
            for (const auto& v : need) r_need.push_back(indicator_name(v));
            if (!r_need.empty() && !d_separated(g, g.ids(r_need), g.ids({order[i]}), g.ids(prefix))) ok = false;
            factors.push_back(Estimand::prob({sym(order[i])}, concat(syms(prefix), observed(need))));
        }
        if (ok) return Recoverable{Estimand::product(factors), Recoverable::Criterion::OrderedFactorization};
    } while (std::next_permutation(order.begin(), order.end()));

    return Unrecoverable{"no implemented criterion applies (MCAR, MAR stratification, ordered factorization); "
                         "this is not a proof that the target is unrecoverable"};
}

JointTable augmented_joint(const MGraph& mg, const Dataset& d, const std::vector<std::string>& columns) {
    for (std::size_t c = 0; c < d.num_columns(); ++c) {
        if (d.has_missing(c) && !mg.is_partially_observed(d.columns()[c]))
            throw Error("column '" + d.columns()[c] + "' has missing cells but the m-graph declares no " +
                        indicator_name(d.columns()[c]));
    }
    std::vector<std::string> vars;
    std::vector<std::vector<std::string>> domains;
    std::vector<std::size_t> cols;
    std::vector<bool> is_indicator;
    for (const auto& c : columns) {
        cols.push_back(d.require_column(c));
        vars.push_back(c);
        auto dom = d.domain(cols.back());
        if (mg.is_partially_observed(c)) dom.push_back(std::string(kMissingToken));
        domains.push_back(std::move(dom));
        is_indicator.push_back(false);
    }
    for (const auto& c : columns) {
        if (!mg.is_partially_observed(c)) continue;
        cols.push_back(d.require_column(c));
        vars.push_back(indicator_name(c));
        domains.push_back({std::string(kMissing), std::string(kObserved)});
        is_indicator.push_back(true);
    }
    std::vector<std::size_t> strides(vars.size(), 1);
    std::size_t cells = 1;
    for (std::size_t i = vars.size(); i-- > 0;) {
        strides[i] = cells;
        cells *= domains[i].size();
    }
    std::vector<double> mass(cells, 0.0);
    for (std::size_t r = 0; r < d.num_rows(); ++r) {
        std::size_t o = 0;
        for (std::size_t i = 0; i < vars.size(); ++i) {
            const auto v = d.cell(r, cols[i]);
            std::size_t k;
            if (is_indicator[i]) k = v == Dataset::kMissing ? 0 : 1;
            else k = v == Dataset::kMissing ? domains[i].size() - 1 : static_cast<std::size_t>(v);
            o += k * strides[i];
        }
        mass[o] += 1.0;
    }
    const double n = static_cast<double>(d.num_rows());
    for (auto& m : mass) m /= n;
    return JointTable(std::move(vars), std::move(domains), std::move(mass));
}

Estimate recover_estimate(const MGraph& mg, const Dataset& d, const std::vector<std::string>& target,
                          const Binding& binding) {
    const auto result = recoverability(mg, target);
    if (const auto* u = std::get_if<Unrecoverable>(&result)) throw NotRecoverable(u->reason);
    const auto& e = std::get<Recoverable>(result).estimand;
    std::vector<std::string> substantive;
    for (const auto& v : estimand_variables(e)) {
        if (mg.is_substantive(v)) substantive.push_back(v);
    }
    if (d.num_rows() == 0) throw Error("dataset has no rows");
    const auto joint = augmented_joint(mg, d, substantive);
    return Estimate{eval_estimand(e, joint, binding), d.num_rows(), std::nullopt, 0};
}

}  // namespace causeway
