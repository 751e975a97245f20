#include "causeway/identify.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <memory>
#include <optional>
#include <set>

#include "causeway/errors.hpp"
#include "causeway/values.hpp"
#include "query_syntax.hpp"

namespace causeway {

// ---------------------------------------------------------------------------
// Queries

namespace {

Assignment to_assignment(const detail::QueryItem& item, const std::vector<std::string>& known) {
    if (item.is_do) throw ParseError("nested do()", 1, item.column);
    const bool exact = std::find(known.begin(), known.end(), item.name) != known.end();
    if (exact || std::isupper(static_cast<unsigned char>(item.name.front()))) {
        std::string var = item.name;
        if (!exact) {
            for (const auto& k : known)
                if (to_lower(k) == to_lower(var)) var = k;
        }
        if (item.value) return {var, ValueRef::literal(*item.value)};
        return {var, ValueRef::symbol(default_symbol(var))};
    }
    if (item.value) throw ParseError("value symbol '" + item.name + "' cannot take '='", 1, item.column);
    return {resolve_symbol(item.name, known), ValueRef::symbol(item.name)};
}

std::string render_assignments(const std::vector<Assignment>& terms) {
    std::vector<std::string> parts;
    for (const auto& a : terms) {
        if (a.value.is_symbol() && a.value.text == default_symbol(a.var)) parts.push_back(a.value.text);
        else if (a.value.is_symbol()) parts.push_back(a.value.text);
        else parts.push_back(a.var + "=" + a.value.text);
    }
    return join(parts, ",");
}

}  // namespace

CausalQuery parse_query(std::string_view text, const std::vector<std::string>& known) {
    auto syntax = detail::parse_query_syntax(text, known);
    CausalQuery q;
    std::optional<std::vector<Assignment>> antecedent;
    for (const auto& item : syntax.outcome) {
        std::vector<Assignment> sub;
        for (const auto& s : item.subscript) sub.push_back(to_assignment(s, known));
        if (antecedent && *antecedent != sub)
            throw ParseError("all outcomes must share one antecedent", 1, item.column);
        antecedent = sub;
        q.outcome.push_back(to_assignment(item, known));
    }
    q.antecedent = antecedent.value_or(std::vector<Assignment>{});
    for (const auto& item : syntax.given) {
        if (item.is_do) {
            for (const auto& d : item.do_items) q.intervention.push_back(to_assignment(d, known));
        } else {
            if (!item.subscript.empty()) throw ParseError("subscripts are only allowed on outcomes", 1, item.column);
            q.condition.push_back(to_assignment(item, known));
        }
    }
    return q;
}

std::string render_query(const CausalQuery& q) {
    std::string out = "P(";
    std::vector<std::string> outcomes;
    for (const auto& a : q.outcome) {
        std::string s = render_assignments({a});
        if (!q.antecedent.empty()) s += "_{" + render_assignments(q.antecedent) + "}";
        outcomes.push_back(s);
    }
    out += join(outcomes, ",");
    std::vector<std::string> given;
    if (!q.intervention.empty()) given.push_back("do(" + render_assignments(q.intervention) + ")");
    if (!q.condition.empty()) given.push_back(render_assignments(q.condition));
    if (!given.empty()) out += "|" + join(given, ",");
    return out + ")";
}

int query_layer(const CausalQuery& q) {
    if (!q.antecedent.empty()) return 3;
    return q.intervention.empty() ? 1 : 2;
}

std::string Hedge::to_string() const {
    return "hedge F={" + join(forest, ",") + "} F'={" + join(subforest, ",") + "}";
}

// ---------------------------------------------------------------------------
// Back-door

std::vector<std::vector<std::string>> backdoor_sets(const Admg& g, const std::string& x, const std::string& y,
                                                    std::size_t max_size) {
    const NodeId xi = g.id(x);
    const NodeId yi = g.id(y);
    if (xi == yi) throw Error("back-door search needs distinct treatment and outcome");
    const NodeSet xs = NodeSet::single(xi);
    const NodeSet ys = NodeSet::single(yi);
    const Admg cut = g.without_edges({}, xs);
    const auto candidates = (g.all() - g.descendants(xs) - ys).to_vector();

    std::vector<NodeSet> found;
    for (std::size_t k = 0; k <= std::min(max_size, candidates.size()); ++k) {
        std::vector<std::size_t> idx(k);
        for (std::size_t i = 0; i < k; ++i) idx[i] = i;
        while (true) {
            NodeSet z;
            for (auto i : idx) z.insert(candidates[i]);
            bool minimal = std::none_of(found.begin(), found.end(), [&](NodeSet f) { return f.subset_of(z); });
            if (minimal && d_separated(cut, xs, ys, z)) found.push_back(z);
            std::size_t i = k;
            while (i > 0 && idx[i - 1] == candidates.size() - k + i - 1) --i;
            if (i == 0) break;
            ++idx[i - 1];
            for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
        }
    }
    std::vector<std::vector<std::string>> out;
    for (auto z : found) out.push_back(g.names_of(z));
    return out;
}

Estimand adjustment_estimand(const std::string& x, const std::string& y, const std::vector<std::string>& z) {
    auto sym = [](const std::string& v) { return Assignment{v, ValueRef::symbol(default_symbol(v))}; };
    std::vector<std::string> given_vars = z;
    given_vars.push_back(x);
    std::sort(given_vars.begin(), given_vars.end());
    std::vector<Assignment> given;
    for (const auto& v : given_vars) given.push_back(sym(v));
    std::vector<std::string> zs = z;
    std::sort(zs.begin(), zs.end());
    std::vector<Assignment> zjoint;
    for (const auto& v : zs) zjoint.push_back(sym(v));

    Estimand body = zs.empty() ? Estimand::prob({sym(y)}, std::move(given))
                               : Estimand::product({Estimand::prob({sym(y)}, std::move(given)), Estimand::prob(zjoint)});
    for (auto it = zs.rbegin(); it != zs.rend(); ++it) body = Estimand::sum(default_symbol(*it), *it, std::move(body));
    return body;
}

// ---------------------------------------------------------------------------
// Identification

namespace {

struct HedgeFound {
    NodeSet forest;
    NodeSet subforest;
};

// A distribution known symbolically: either the observational joint, or a
// product of conditionals of a parent distribution over `own` variables.
struct Dist {
    struct Factor {
        NodeId var;
        NodeSet cond;
    };
    bool base = true;
    NodeSet own;
    std::vector<Factor> factors;
    std::shared_ptr<const Dist> parent;
};
using DistPtr = std::shared_ptr<const Dist>;

using Scope = std::map<NodeId, ValueRef>;

class Identifier {
public:
    Identifier(const Admg& g, std::set<std::string> reserved) : g_(g), reserved_(std::move(reserved)) {
        root_ = std::make_shared<Dist>();
        auto order = g_.topological_order();
        rank_.assign(g_.size(), 0);
        for (std::size_t i = 0; i < order.size(); ++i) rank_[order[i]] = i;
    }

    const DistPtr& root() const { return root_; }

    Estimand id(NodeSet y, NodeSet x, const DistPtr& p, NodeSet v, const Scope& scope,
                const std::set<std::string>& used) {
        if (x.empty()) return marginal(p, y, scope, used);

        const NodeSet an_y = g_.ancestors_within(y, v);
        if (an_y != v) return id(y, x & an_y, p, an_y, scope, used);

        const NodeSet w = (v - x) - ancestors_cutting_into(y, v, x);
        if (!w.empty()) {
            // P_x(y) = sum_w P(w) P_{x,w}(y): the inner term does not depend on w.
            auto [inner_scope, inner_used, bound] = bind(w, scope, used);
            auto body = id(y, x | w, p, v, inner_scope, inner_used);
            auto weight = Estimand::prob(assignments(w, inner_scope));
            return wrap_sums(bound, Estimand::product({std::move(weight), std::move(body)}));
        }

        const auto comps = c_components(g_, v - x);
        if (comps.size() > 1) {
            auto [inner_scope, inner_used, bound] = bind(v - (y | x), scope, used);
            std::vector<Estimand> factors;
            for (auto s : comps) factors.push_back(id(s, v - s, p, v, inner_scope, inner_used));
            return wrap_sums(bound, Estimand::product(std::move(factors)));
        }

        const NodeSet s = comps.front();
        const auto whole = c_components(g_, v);
        if (whole.size() == 1) throw HedgeFound{v, s};

        if (std::find(whole.begin(), whole.end(), s) != whole.end()) {
            auto [inner_scope, inner_used, bound] = bind(s - y, scope, used);
            std::vector<Estimand> factors;
            for (auto vi : ordered(s)) factors.push_back(conditional(p, vi, predecessors(vi, v), inner_scope, inner_used));
            return wrap_sums(bound, Estimand::product(std::move(factors)));
        }

        const NodeSet s_prime = *std::find_if(whole.begin(), whole.end(), [&](NodeSet c) { return s.subset_of(c); });
        auto next = std::make_shared<Dist>();
        next->base = false;
        next->own = s_prime;
        next->parent = p;
        for (auto vi : ordered(s_prime)) next->factors.push_back({vi, predecessors(vi, v)});
        return id(y, x & s_prime, next, s_prime, scope, used);
    }

    std::vector<Assignment> assignments(NodeSet vars, const Scope& scope) const {
        std::vector<Assignment> out;
        for (auto v : vars) out.push_back({g_.name(v), scope.at(v)});
        return out;
    }

private:
    struct Bound {
        Scope scope;
        std::set<std::string> used;
        std::vector<std::pair<std::string, std::string>> sums;  // (symbol, variable)
    };

    Bound bind(NodeSet vars, const Scope& scope, const std::set<std::string>& used) const {
        Bound b{scope, used, {}};
        for (auto v : vars) {
            std::string base = default_symbol(g_.name(v));
            std::string sym = base;
            for (int k = 2; b.used.count(sym) || reserved_.count(sym); ++k) sym = base + std::to_string(k);
            b.used.insert(sym);
            b.scope[v] = ValueRef::symbol(sym);
            b.sums.emplace_back(sym, g_.name(v));
        }
        return b;
    }

    static Estimand wrap_sums(const std::vector<std::pair<std::string, std::string>>& sums, Estimand body) {
        for (auto it = sums.rbegin(); it != sums.rend(); ++it) body = Estimand::sum(it->first, it->second, std::move(body));
        return body;
    }

    std::vector<NodeId> ordered(NodeSet s) const {
        auto out = s.to_vector();
        std::sort(out.begin(), out.end(), [&](NodeId a, NodeId b) { return rank_[a] < rank_[b]; });
        return out;
    }

    NodeSet predecessors(NodeId vi, NodeSet v) const {
        NodeSet out;
        for (auto u : v)
            if (rank_[u] < rank_[vi]) out.insert(u);
        return out;
    }

    NodeSet ancestors_cutting_into(NodeSet y, NodeSet within, NodeSet cut) const {
        NodeSet result = y & within;
        NodeSet frontier = result;
        while (!frontier.empty()) {
            NodeSet next;
            for (auto u : frontier)
                if (!cut.contains(u)) next |= g_.parents(u) & within;
            frontier = next - result;
            result |= next;
        }
        return result;
    }

    Estimand marginal(const DistPtr& p, NodeSet a, const Scope& scope, const std::set<std::string>& used) {
        if (p->base) return Estimand::prob(assignments(a, scope));
        auto [inner_scope, inner_used, bound] = bind(p->own - a, scope, used);
        std::vector<Estimand> factors;
        for (const auto& f : p->factors)
            factors.push_back(conditional(p->parent, f.var, f.cond, inner_scope, inner_used));
        return wrap_sums(bound, Estimand::product(std::move(factors)));
    }

    Estimand conditional(const DistPtr& p, NodeId vi, NodeSet cond, const Scope& scope,
                         const std::set<std::string>& used) {
        if (p->base) return Estimand::prob(assignments(NodeSet::single(vi), scope), assignments(cond, scope));
        auto joint = marginal(p, cond | NodeSet::single(vi), scope, used);
        if (cond.empty()) return joint;
        return Estimand::quotient(std::move(joint), marginal(p, cond, scope, used));
    }

    const Admg& g_;
    std::set<std::string> reserved_;
    DistPtr root_;
    std::vector<std::size_t> rank_;
};

NodeSet vars_of(const Admg& g, const std::vector<Assignment>& terms) {
    NodeSet s;
    for (const auto& a : terms) {
        auto v = g.id(a.var);
        if (s.contains(v)) throw Error("variable '" + a.var + "' appears twice in one query slot");
        s.insert(v);
    }
    return s;
}

}  // namespace

IdentifyResult identify(const Admg& g, const CausalQuery& q) {
    if (query_layer(q) == 3)
        throw Error("counterfactual (layer 3) queries are not identified from the graph here; use an SCM");
    if (q.outcome.empty()) throw Error("query has no outcome");
    const NodeSet y = vars_of(g, q.outcome);
    NodeSet x = vars_of(g, q.intervention);
    NodeSet z = vars_of(g, q.condition);
    if (y.intersects(x) || y.intersects(z) || x.intersects(z))
        throw Error("outcome, intervention and conditioning variables must be disjoint");

    if (query_layer(q) == 1) return Identified{Estimand::prob(q.outcome, q.condition)};

    Scope scope;
    std::set<std::string> used;
    for (const auto* slot : {&q.outcome, &q.intervention, &q.condition}) {
        for (const auto& a : *slot) {
            scope[g.id(a.var)] = a.value;
            if (a.value.is_symbol()) used.insert(a.value.text);
        }
    }

    // Move conditioning variables into the intervention while the second
    // do-calculus rule allows it.
    for (bool moved = true; moved && !z.empty();) {
        moved = false;
        for (auto zi : z) {
            const NodeSet zs = NodeSet::single(zi);
            const Admg cut = g.without_edges(x, zs);
            if (d_separated(cut, y, zs, x | (z - zs))) {
                x |= zs;
                z -= zs;
                moved = true;
                break;
            }
        }
    }

    Identifier engine(g, used);
    try {
        if (z.empty()) return Identified{engine.id(y, x, engine.root(), g.all(), scope, used)};
        auto joint = engine.id(y | z, x, engine.root(), g.all(), scope, used);
        auto norm = engine.id(z, x, engine.root(), g.all(), scope, used);
        return Identified{Estimand::quotient(std::move(joint), std::move(norm))};
    } catch (const HedgeFound& h) {
        return NonIdentifiable{Hedge{g.names_of(h.forest), g.names_of(h.subforest)}};
    }
}

}  // namespace causeway
