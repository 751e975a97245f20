#include "causeway/graph.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "causeway/errors.hpp"
#include "causeway/values.hpp"
#include "line_format.hpp"

namespace causeway {

bool lex_less(NodeSet a, NodeSet b) {
    auto x = a.begin();
    auto y = b.begin();
    for (; x != a.end() && y != b.end(); ++x, ++y) {
        if (*x != *y) return *x < *y;
    }
    return x == a.end() && y != b.end();
}

namespace {

bool has_cycle(const std::vector<NodeSet>& children) {
    // Kahn's algorithm on in-degrees.
    std::size_t n = children.size();
    std::vector<std::size_t> indegree(n, 0);
    for (std::size_t v = 0; v < n; ++v)
        for (auto c : children[v]) ++indegree[c];
    std::vector<NodeId> ready;
    for (std::size_t v = 0; v < n; ++v)
        if (indegree[v] == 0) ready.push_back(v);
    std::size_t seen = 0;
    while (!ready.empty()) {
        auto v = ready.back();
        ready.pop_back();
        ++seen;
        for (auto c : children[v])
            if (--indegree[c] == 0) ready.push_back(c);
    }
    return seen != n;
}

}  // namespace

Admg::Admg(std::vector<std::string> nodes, const std::vector<Edge>& directed, const std::vector<Edge>& bidirected) {
    for (const auto& n : nodes) {
        if (!is_identifier(n)) throw ModelError("invalid variable name '" + n + "'");
    }
    std::sort(nodes.begin(), nodes.end());
    if (auto dup = std::adjacent_find(nodes.begin(), nodes.end()); dup != nodes.end())
        throw ModelError("duplicate declaration of '" + *dup + "'");
    if (nodes.size() > kMaxNodes) throw ModelError("graphs are limited to 64 nodes");
    names_ = std::move(nodes);
    parents_.assign(names_.size(), {});
    children_.assign(names_.size(), {});
    siblings_.assign(names_.size(), {});

    auto endpoint = [&](const std::string& n) {
        auto v = find(n);
        if (!v) throw ModelError("edge endpoint '" + n + "' is not declared");
        return *v;
    };
    for (const auto& [from, to] : directed) {
        auto a = endpoint(from);
        auto b = endpoint(to);
        if (a == b) throw ModelError("self-loop on '" + from + "'");
        children_[a].insert(b);
        parents_[b].insert(a);
    }
    for (const auto& [x, y] : bidirected) {
        auto a = endpoint(x);
        auto b = endpoint(y);
        if (a == b) throw ModelError("bidirected self-loop on '" + x + "'");
        siblings_[a].insert(b);
        siblings_[b].insert(a);
    }
    if (has_cycle(children_)) throw ModelError("cycle detected among directed edges");
}

std::optional<NodeId> Admg::find(std::string_view name) const {
    auto it = std::lower_bound(names_.begin(), names_.end(), name);
    if (it == names_.end() || *it != name) return std::nullopt;
    return static_cast<NodeId>(it - names_.begin());
}

NodeId Admg::id(std::string_view name) const {
    if (auto v = find(name)) return *v;
    throw UnknownVariable(std::string(name));
}

NodeSet Admg::ids(const std::vector<std::string>& names) const {
    NodeSet s;
    for (const auto& n : names) s.insert(id(n));
    return s;
}

std::vector<std::string> Admg::names_of(NodeSet s) const {
    std::vector<std::string> out;
    for (auto v : s) out.push_back(names_[v]);
    return out;
}

std::vector<std::pair<NodeId, NodeId>> Admg::directed_edges() const {
    std::vector<std::pair<NodeId, NodeId>> out;
    for (NodeId v = 0; v < size(); ++v)
        for (auto c : children_[v]) out.emplace_back(v, c);
    return out;
}

std::vector<std::pair<NodeId, NodeId>> Admg::bidirected_edges() const {
    std::vector<std::pair<NodeId, NodeId>> out;
    for (NodeId v = 0; v < size(); ++v)
        for (auto s : siblings_[v])
            if (v < s) out.emplace_back(v, s);
    return out;
}

NodeSet Admg::ancestors(NodeSet s) const { return ancestors_within(s, all()); }

NodeSet Admg::ancestors_within(NodeSet s, NodeSet within) const {
    NodeSet result = s & within;
    NodeSet frontier = result;
    while (!frontier.empty()) {
        NodeSet next;
        for (auto v : frontier) next |= parents_[v] & within;
        frontier = next - result;
        result |= next;
    }
    return result;
}

NodeSet Admg::descendants(NodeSet s) const {
    NodeSet result = s;
    NodeSet frontier = s;
    while (!frontier.empty()) {
        NodeSet next;
        for (auto v : frontier) next |= children_[v];
        frontier = next - result;
        result |= next;
    }
    return result;
}

std::vector<NodeId> Admg::topological_order() const {
    std::vector<NodeId> order;
    NodeSet placed;
    while (order.size() < size()) {
        for (NodeId v = 0; v < size(); ++v) {
            if (!placed.contains(v) && parents_[v].subset_of(placed)) {
                order.push_back(v);
                placed.insert(v);
                break;
            }
        }
    }
    return order;
}

Admg Admg::without_edges(NodeSet into, NodeSet out_of) const {
    Admg g = *this;
    for (NodeId v = 0; v < size(); ++v) {
        if (into.contains(v)) {
            for (auto p : g.parents_[v]) g.children_[p].erase(v);
            g.parents_[v] = {};
            for (auto s : g.siblings_[v]) g.siblings_[s].erase(v);
            g.siblings_[v] = {};
        }
    }
    for (auto v : out_of) {
        for (auto c : g.children_[v]) g.parents_[c].erase(v);
        g.children_[v] = {};
    }
    return g;
}

Admg Admg::induced(NodeSet keep) const {
    std::vector<std::string> nodes;
    std::vector<Edge> directed;
    std::vector<Edge> bidirected;
    for (auto v : keep) nodes.push_back(names_[v]);
    for (auto [a, b] : directed_edges())
        if (keep.contains(a) && keep.contains(b)) directed.emplace_back(names_[a], names_[b]);
    for (auto [a, b] : bidirected_edges())
        if (keep.contains(a) && keep.contains(b)) bidirected.emplace_back(names_[a], names_[b]);
    return Admg(std::move(nodes), directed, bidirected);
}

std::string CiStatement::to_string() const {
    std::string out = join(left, ",") + " _||_ " + join(right, ",");
    if (!given.empty()) out += " | " + join(given, ",");
    return out;
}

Admg parse_graph(std::string_view text) {
    std::vector<std::string> nodes;
    std::map<std::string, std::pair<std::size_t, std::size_t>> declared_at;
    std::vector<Admg::Edge> directed;
    std::vector<Admg::Edge> bidirected;
    std::map<std::string, std::pair<std::size_t, std::size_t>> first_use;

    for (const auto& line : detail::tokenize_lines(text)) {
        const auto& t = line.tokens;
        if (t[0].text == "var") {
            if (t.size() != 2) line.fail("expected 'var NAME'", t.size() < 2 ? 1 : 2);
            if (!is_identifier(t[1].text)) line.fail("invalid variable name '" + t[1].text + "'", 1);
            if (declared_at.count(t[1].text)) line.fail("duplicate declaration of '" + t[1].text + "'", 1);
            declared_at[t[1].text] = {line.number, t[1].column};
            nodes.push_back(t[1].text);
            continue;
        }
        if (t.size() != 3) line.fail("expected 'var NAME', 'A -> B' or 'A <-> B'", std::min<std::size_t>(t.size(), 1));
        const auto& op = t[1].text;
        if (op == "--") line.fail("undirected edges are only valid in discovery output", 1);
        if (op != "->" && op != "<->") line.fail("unknown edge operator '" + op + "'", 1);
        for (std::size_t i : {0U, 2U}) {
            if (!is_identifier(t[i].text)) line.fail("invalid variable name '" + t[i].text + "'", i);
            first_use.emplace(t[i].text, std::pair{line.number, t[i].column});
        }
        if (t[0].text == t[2].text) line.fail("self-loop on '" + t[0].text + "'", 2);
        (op == "->" ? directed : bidirected).emplace_back(t[0].text, t[2].text);
    }
    for (const auto& [name, pos] : first_use) {
        if (!declared_at.count(name))
            throw ParseError("undeclared endpoint '" + name + "'", pos.first, pos.second);
    }
    return Admg(std::move(nodes), directed, bidirected);
}

std::string serialize(const Admg& g) {
    std::ostringstream out;
    for (const auto& n : g.names()) out << "var " << n << '\n';
    for (auto [a, b] : g.directed_edges()) out << g.name(a) << " -> " << g.name(b) << '\n';
    for (auto [a, b] : g.bidirected_edges()) out << g.name(a) << " <-> " << g.name(b) << '\n';
    return out.str();
}

bool d_separated(const Admg& g, NodeSet a, NodeSet b, NodeSet z) {
    if (a.intersects(b) || a.intersects(z) || b.intersects(z))
        throw Error("d-separation sets must be pairwise disjoint");
    if (!(a | b | z).subset_of(g.all())) throw Error("d-separation set mentions a node outside the graph");
    if (a.empty() || b.empty()) return true;

    const NodeSet an_z = g.ancestors(z);
    // State (v, head): reached v through an edge with an arrowhead at v.
    NodeSet seen_tail;
    NodeSet seen_head;
    std::vector<std::pair<NodeId, bool>> stack;
    for (auto v : a) stack.emplace_back(v, false);

    while (!stack.empty()) {
        auto [v, head] = stack.back();
        stack.pop_back();
        NodeSet& seen = head ? seen_head : seen_tail;
        if (seen.contains(v)) continue;
        seen.insert(v);
        if (b.contains(v)) return false;

        const bool blocked_noncollider = z.contains(v);
        if (!head) {
            if (blocked_noncollider && !a.contains(v)) continue;
            for (auto p : g.parents(v)) stack.emplace_back(p, false);
            for (auto c : g.children(v)) stack.emplace_back(c, true);
            for (auto s : g.siblings(v)) stack.emplace_back(s, true);
        } else {
            if (!blocked_noncollider)
                for (auto c : g.children(v)) stack.emplace_back(c, true);
            if (an_z.contains(v)) {
                for (auto p : g.parents(v)) stack.emplace_back(p, false);
                for (auto s : g.siblings(v)) stack.emplace_back(s, true);
            }
        }
    }
    return true;
}

bool d_separated(const Admg& g, const std::vector<std::string>& a, const std::vector<std::string>& b,
                 const std::vector<std::string>& z) {
    return d_separated(g, g.ids(a), g.ids(b), g.ids(z));
}

std::vector<NodeSet> c_components(const Admg& g, NodeSet within) {
    std::vector<NodeSet> out;
    NodeSet left = within;
    while (!left.empty()) {
        NodeSet comp = NodeSet::single(left.min());
        NodeSet frontier = comp;
        while (!frontier.empty()) {
            NodeSet next;
            for (auto v : frontier) next |= g.siblings(v) & within;
            frontier = next - comp;
            comp |= next;
        }
        out.push_back(comp);
        left -= comp;
    }
    return out;
}

std::vector<NodeSet> c_components(const Admg& g) { return c_components(g, g.all()); }

namespace {

// Visits k-subsets of `items` in lexicographic order until `visit` returns true.
template <typename F>
bool for_each_subset_of_size(const std::vector<NodeId>& items, std::size_t k, F&& visit) {
    if (k > items.size()) return false;
    std::vector<std::size_t> idx(k);
    for (std::size_t i = 0; i < k; ++i) idx[i] = i;
    while (true) {
        NodeSet s;
        for (auto i : idx) s.insert(items[i]);
        if (visit(s)) return true;
        std::size_t i = k;
        while (i > 0 && idx[i - 1] == items.size() - k + i - 1) --i;
        if (i == 0) return false;
        ++idx[i - 1];
        for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
}

}  // namespace

std::vector<CiStatement> testable_implications(const Admg& g) {
    std::vector<CiStatement> out;
    for (NodeId x = 0; x < g.size(); ++x) {
        for (NodeId y = x + 1; y < g.size(); ++y) {
            if (g.adjacent(x, y)) continue;
            NodeSet pair = NodeSet::single(x) | NodeSet::single(y);
            auto candidates = (g.ancestors(pair) - pair).to_vector();
            std::optional<NodeSet> separator;
            for (std::size_t k = 0; k <= candidates.size() && !separator; ++k) {
                for_each_subset_of_size(candidates, k, [&](NodeSet s) {
                    if (d_separated(g, NodeSet::single(x), NodeSet::single(y), s)) {
                        separator = s;
                        return true;
                    }
                    return false;
                });
            }
            if (separator) out.push_back({{g.name(x)}, {g.name(y)}, g.names_of(*separator)});
        }
    }
    return out;
}

}  // namespace causeway
