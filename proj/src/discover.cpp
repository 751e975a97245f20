#include "causeway/discover.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <sstream>

#include "causeway/errors.hpp"
#include "causeway/fitcheck.hpp"
#include "causeway/values.hpp"
#include "line_format.hpp"

namespace causeway {

bool GraphOracle::independent(const std::string& a, const std::string& b, const std::vector<std::string>& given) const {
    return d_separated(g_, {a}, {b}, given);
}

DataOracle::DataOracle(const Dataset& d, double alpha) : d_(d), alpha_(alpha) {
    if (!(alpha > 0 && alpha < 1)) throw Error("alpha must lie strictly between 0 and 1");
    if (d.has_missing()) throw MissingDataPresent(d.columns().front());
}

bool DataOracle::independent(const std::string& a, const std::string& b, const std::vector<std::string>& given) const {
    return g_test(d_, {a}, {b}, given).p_value > alpha_;
}

namespace {

// mark[i][j]: edge endpoint at j. 0 none, 1 tail/undetermined, 2 arrowhead.
// An undirected edge has mark 1 at both ends; i -> j has mark[i][j] = 2 and mark[j][i] = 1.
struct Pattern {
    std::size_t n;
    std::vector<std::vector<int>> mark;

    explicit Pattern(std::size_t size) : n(size), mark(size, std::vector<int>(size, 1)) {
        for (std::size_t i = 0; i < n; ++i) mark[i][i] = 0;
    }
    bool adjacent(std::size_t a, std::size_t b) const { return mark[a][b] != 0; }
    bool directed(std::size_t a, std::size_t b) const { return mark[a][b] == 2 && mark[b][a] == 1; }
    bool undirected(std::size_t a, std::size_t b) const { return mark[a][b] == 1 && mark[b][a] == 1; }
    void remove(std::size_t a, std::size_t b) { mark[a][b] = mark[b][a] = 0; }
    void orient(std::size_t a, std::size_t b) { mark[a][b] = 2; }
};

bool meek_pass(Pattern& p) {
    bool changed = false;
    const std::size_t n = p.n;
    for (std::size_t b = 0; b < n; ++b) {
        for (std::size_t c = 0; c < n; ++c) {
            if (!p.undirected(b, c)) continue;
            bool orient = false;
            // R1: a -> b - c, a and c nonadjacent.
            for (std::size_t a = 0; a < n && !orient; ++a) {
                if (a != c && p.directed(a, b) && !p.adjacent(a, c)) orient = true;
            }
            // R2: b -> a -> c with b - c.
            for (std::size_t a = 0; a < n && !orient; ++a) {
                if (p.directed(b, a) && p.directed(a, c)) orient = true;
            }
            // R3: b - d1 -> c, b - d2 -> c, d1 and d2 nonadjacent.
            for (std::size_t d1 = 0; d1 < n && !orient; ++d1) {
                if (!p.undirected(b, d1) || !p.directed(d1, c)) continue;
                for (std::size_t d2 = d1 + 1; d2 < n && !orient; ++d2) {
                    if (p.undirected(b, d2) && p.directed(d2, c) && !p.adjacent(d1, d2)) orient = true;
                }
            }
            if (orient) {
                p.orient(b, c);
                changed = true;
            }
        }
    }
    return changed;
}

}  // namespace

Cpdag discover_cpdag(const CiOracle& oracle, std::vector<std::string> vars) {
    std::sort(vars.begin(), vars.end());
    if (vars.empty()) throw Error("discovery needs at least one variable");
    if (std::adjacent_find(vars.begin(), vars.end()) != vars.end()) throw Error("variable listed twice");
    const std::size_t n = vars.size();
    Pattern p(n);
    std::map<std::pair<std::size_t, std::size_t>, std::vector<std::size_t>> sepset;

    for (std::size_t level = 0;; ++level) {
        // Neighbourhoods frozen for the whole level (order independence).
        std::vector<std::vector<std::size_t>> adj(n);
        bool any = false;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                if (p.adjacent(i, j)) adj[i].push_back(j);
            }
            if (adj[i].size() > level) any = true;
        }
        if (!any) break;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                if (!p.adjacent(i, j)) continue;
                bool removed = false;
                for (std::size_t side : {i, j}) {
                    const std::size_t other = side == i ? j : i;
                    std::vector<std::size_t> pool;
                    for (auto k : adj[side]) {
                        if (k != other) pool.push_back(k);
                    }
                    if (pool.size() < level) continue;
                    // Subsets of size `level` in lexicographic order.
                    std::vector<std::size_t> pick(level);
                    std::iota(pick.begin(), pick.end(), 0);
                    while (true) {
                        std::vector<std::string> given;
                        std::vector<std::size_t> ids;
                        for (auto k : pick) {
                            given.push_back(vars[pool[k]]);
                            ids.push_back(pool[k]);
                        }
                        if (oracle.independent(vars[i], vars[j], given)) {
                            p.remove(i, j);
                            sepset[{i, j}] = ids;
                            removed = true;
                            break;
                        }
                        std::size_t k = level;
                        while (k > 0 && pick[k - 1] == pool.size() - level + k - 1) --k;
                        if (k == 0) break;
                        ++pick[k - 1];
                        for (std::size_t m = k; m < level; ++m) pick[m] = pick[m - 1] + 1;
                    }
                    if (removed) break;
                }
            }
        }
    }

    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                if (i == k || j == k || p.adjacent(i, j) || !p.adjacent(i, k) || !p.adjacent(j, k)) continue;
                const auto& s = sepset[{i, j}];
                if (std::find(s.begin(), s.end(), k) != s.end()) continue;
                // Keep the first orientation when colliders conflict.
                if (!p.directed(k, i)) p.orient(i, k);
                if (!p.directed(k, j)) p.orient(j, k);
            }
        }
    }
    while (meek_pass(p)) {
    }

    Cpdag out;
    out.nodes = vars;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (p.directed(i, j)) out.directed.emplace_back(vars[i], vars[j]);
            else if (i < j && p.undirected(i, j)) out.undirected.emplace_back(vars[i], vars[j]);
            else if (i < j && p.mark[i][j] == 2 && p.mark[j][i] == 2) {
                // Conflicting colliders (possible only with an imperfect oracle): report undirected.
                out.undirected.emplace_back(vars[i], vars[j]);
            }
        }
    }
    std::sort(out.directed.begin(), out.directed.end());
    return out;
}

std::string serialize_cpdag(const Cpdag& c) {
    std::ostringstream out;
    for (const auto& n : c.nodes) out << "var " << n << '\n';
    for (const auto& [a, b] : c.directed) out << a << " -> " << b << '\n';
    for (const auto& [a, b] : c.undirected) out << a << " -- " << b << '\n';
    return out.str();
}

Cpdag parse_cpdag(std::string_view text) {
    Cpdag c;
    std::vector<std::pair<detail::Line, Cpdag::Edge>> edges;
    for (const auto& line : detail::tokenize_lines(text)) {
        const auto& t = line.tokens;
        if (t[0].text == "var") {
            if (t.size() != 2 || !is_identifier(t[1].text)) line.fail("expected 'var NAME'", 1);
            c.nodes.push_back(t[1].text);
            continue;
        }
        if (t.size() != 3 || (t[1].text != "->" && t[1].text != "--"))
            line.fail("expected 'A -> B' or 'A -- B'", std::min<std::size_t>(t.size(), 1));
        if (t[0].text == t[2].text) line.fail("self-loop on '" + t[0].text + "'", 2);
        auto e = std::pair{t[0].text, t[2].text};
        if (t[1].text == "--") {
            if (e.second < e.first) std::swap(e.first, e.second);
            c.undirected.push_back(e);
        } else {
            c.directed.push_back(e);
        }
        edges.emplace_back(line, e);
    }
    std::sort(c.nodes.begin(), c.nodes.end());
    if (std::adjacent_find(c.nodes.begin(), c.nodes.end()) != c.nodes.end()) throw ModelError("duplicate node");
    for (const auto& [line, e] : edges) {
        for (std::size_t i : {0U, 2U}) {
            if (!std::binary_search(c.nodes.begin(), c.nodes.end(), line.tokens[i].text))
                line.fail("undeclared endpoint '" + line.tokens[i].text + "'", i);
        }
    }
    std::sort(c.directed.begin(), c.directed.end());
    std::sort(c.undirected.begin(), c.undirected.end());
    return c;
}

}  // namespace causeway
