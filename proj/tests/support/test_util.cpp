#include "test_util.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace testutil {

using causeway::EndogenousVar;
using causeway::ExogenousVar;

double uniform(Rng& rng, double lo, double hi) {
    return lo + (hi - lo) * static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::size_t below(Rng& rng, std::size_t n) { return static_cast<std::size_t>(uniform(rng) * static_cast<double>(n)) % n; }

std::vector<std::string> letters(std::size_t n) {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < n; ++i) out.push_back(std::string(1, static_cast<char>('A' + i)));
    return out;
}

namespace {

Admg random_graph(Rng& rng, std::size_t n, double pd, double pb, std::size_t max_bi) {
    auto names = letters(n);
    auto order = names;
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<Admg::Edge> directed, bidirected;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (uniform(rng) < pd) directed.emplace_back(order[i], order[j]);
            if (bidirected.size() < max_bi && uniform(rng) < pb) bidirected.emplace_back(order[i], order[j]);
        }
    }
    return Admg(names, directed, bidirected);
}

std::vector<std::string> latents_of(const Admg& g, causeway::NodeId v) {
    std::vector<std::string> out;
    for (auto [a, b] : g.bidirected_edges()) {
        if (a == v || b == v) out.push_back("U_" + g.name(a) + "_" + g.name(b));
    }
    return out;
}

std::vector<ExogenousVar> latent_coins(Rng& rng, const Admg& g) {
    std::vector<ExogenousVar> exo;
    for (auto [a, b] : g.bidirected_edges()) {
        double p = uniform(rng, 0.2, 0.8);
        exo.push_back({"U_" + g.name(a) + "_" + g.name(b), {"0", "1"}, {1 - p, p}});
    }
    return exo;
}

}  // namespace

Admg random_admg(Rng& rng, std::size_t n, double pd, double pb) { return random_graph(rng, n, pd, pb, 6); }

Admg random_dag(Rng& rng, std::size_t n, double pd) { return random_graph(rng, n, pd, 0.0, 0); }

DiscreteScm random_positive_scm(Rng& rng, const Admg& g) {
    auto exo = latent_coins(rng, g);
    std::vector<EndogenousVar> endo;
    for (causeway::NodeId v = 0; v < g.size(); ++v) {
        const std::string noise = "E_" + g.name(v);
        double p = uniform(rng, 0.15, 0.85);
        exo.push_back({noise, {"0", "1"}, {1 - p, p}});
        EndogenousVar var;
        var.name = g.name(v);
        var.parents = g.names_of(g.parents(v));
        for (const auto& l : latents_of(g, v)) var.parents.push_back(l);
        const std::size_t k = var.parents.size();
        var.parents.push_back(noise);
        for (std::size_t bits = 0; bits < (std::size_t{1} << k); ++bits) {
            const std::size_t r = below(rng, 2);
            std::vector<std::string> key;
            for (std::size_t i = 0; i < k; ++i) key.push_back(((bits >> i) & 1U) ? "1" : "0");
            for (std::size_t e = 0; e < 2; ++e) {
                auto full = key;
                full.push_back(e ? "1" : "0");
                var.table[full] = (r ^ e) ? "1" : "0";
            }
        }
        var.domain = {"0", "1"};
        endo.push_back(std::move(var));
    }
    return DiscreteScm(std::move(exo), std::move(endo));
}

DiscreteScm random_general_scm(Rng& rng, const Admg& g) {
    auto exo = latent_coins(rng, g);
    std::vector<EndogenousVar> endo;
    for (causeway::NodeId v = 0; v < g.size(); ++v) {
        const std::string noise = "E_" + g.name(v);
        const std::size_t card = 2 + below(rng, 2);
        ExogenousVar u{noise, {}, {}};
        double total = 0;
        for (std::size_t i = 0; i < card; ++i) {
            u.domain.push_back(std::to_string(i));
            u.probs.push_back(uniform(rng, 0.05, 1.0));
            total += u.probs.back();
        }
        double rest = 1.0;
        for (std::size_t i = 0; i + 1 < card; ++i) {
            u.probs[i] /= total;
            rest -= u.probs[i];
        }
        u.probs.back() = rest;
        exo.push_back(u);

        EndogenousVar var;
        var.name = g.name(v);
        var.parents = g.names_of(g.parents(v));
        for (const auto& l : latents_of(g, v)) var.parents.push_back(l);
        const std::size_t k = var.parents.size();
        var.parents.push_back(noise);
        for (std::size_t bits = 0; bits < (std::size_t{1} << k); ++bits) {
            std::vector<std::string> key;
            for (std::size_t i = 0; i < k; ++i) key.push_back(((bits >> i) & 1U) ? "1" : "0");
            for (std::size_t e = 0; e < card; ++e) {
                auto full = key;
                full.push_back(std::to_string(e));
                var.table[full] = below(rng, 2) ? "1" : "0";
            }
        }
        var.domain = {"0", "1"};
        endo.push_back(std::move(var));
    }
    return DiscreteScm(std::move(exo), std::move(endo));
}

// ---------------------------------------------------------------------------

namespace {

struct Step {
    std::size_t to;
    bool head_here;   // arrowhead at the current node
    bool head_there;  // arrowhead at `to`
};

std::vector<std::vector<Step>> steps_of(const Admg& g) {
    std::vector<std::vector<Step>> out(g.size());
    for (auto [a, b] : g.directed_edges()) {
        out[a].push_back({b, false, true});
        out[b].push_back({a, true, false});
    }
    for (auto [a, b] : g.bidirected_edges()) {
        out[a].push_back({b, true, true});
        out[b].push_back({a, true, true});
    }
    return out;
}

std::set<std::size_t> ancestors_of(const Admg& g, const std::set<std::size_t>& z) {
    std::set<std::size_t> seen = z;
    std::vector<std::size_t> stack(z.begin(), z.end());
    while (!stack.empty()) {
        auto v = stack.back();
        stack.pop_back();
        for (auto [a, b] : g.directed_edges()) {
            if (b == v && seen.insert(a).second) stack.push_back(a);
        }
    }
    return seen;
}

}  // namespace

bool path_dsep(const Admg& g, const std::vector<std::string>& a, const std::vector<std::string>& b,
               const std::vector<std::string>& z) {
    std::set<std::size_t> as, bs, zs;
    for (const auto& n : a) as.insert(g.id(n));
    for (const auto& n : b) bs.insert(g.id(n));
    for (const auto& n : z) zs.insert(g.id(n));
    const auto anz = ancestors_of(g, zs);
    const auto steps = steps_of(g);

    std::vector<bool> on_path(g.size(), false);
    bool connected = false;
    // DFS over simple paths; `arrived_head` says whether the edge we came in
    // on has an arrowhead at v.
    std::function<void(std::size_t, bool, bool)> walk = [&](std::size_t v, bool first, bool arrived_head) {
        if (connected) return;
        if (!first && bs.count(v)) {
            connected = true;
            return;
        }
        on_path[v] = true;
        for (const auto& s : steps[v]) {
            if (on_path[s.to]) continue;
            if (!first) {
                const bool collider = arrived_head && s.head_here;
                const bool open = collider ? anz.count(v) > 0 : zs.count(v) == 0;
                if (!open) continue;
            }
            walk(s.to, false, s.head_there);
            if (connected) break;
        }
        on_path[v] = false;
    };
    for (auto s : as) {
        if (bs.count(s)) return false;
        walk(s, true, false);
        if (connected) return false;
    }
    return true;
}

std::vector<ExoState> exo_states(const DiscreteScm& m) {
    const auto& exo = m.exogenous();
    std::vector<ExoState> out;
    std::vector<std::size_t> idx(exo.size(), 0);
    while (true) {
        ExoState s{{}, 1.0};
        for (std::size_t i = 0; i < exo.size(); ++i) {
            s.values[exo[i].name] = exo[i].domain[idx[i]];
            s.p *= exo[i].probs[idx[i]];
        }
        out.push_back(std::move(s));
        std::size_t k = 0;
        while (k < exo.size() && ++idx[k] == exo[k].domain.size()) idx[k++] = 0;
        if (k == exo.size()) break;
    }
    return out;
}

Assignment evaluate(const DiscreteScm& m, const Assignment& exo, const Assignment& forced) {
    Assignment world = exo;
    for (const auto& [k, v] : forced) world[k] = v;
    for (bool progress = true; progress;) {
        progress = false;
        for (const auto& var : m.endogenous()) {
            if (world.count(var.name)) continue;
            std::vector<std::string> key;
            bool ready = true;
            for (const auto& p : var.parents) {
                auto it = world.find(p);
                if (it == world.end()) {
                    ready = false;
                    break;
                }
                key.push_back(it->second);
            }
            if (!ready) continue;
            world[var.name] = var.table.at(key);
            progress = true;
        }
    }
    return world;
}

bool holds(const Assignment& world, const Assignment& event) {
    for (const auto& [k, v] : event) {
        auto it = world.find(k);
        if (it == world.end() || it->second != v) return false;
    }
    return true;
}

double prob_do(const DiscreteScm& m, const Assignment& event, const Assignment& forced) {
    double total = 0;
    for (const auto& s : exo_states(m)) {
        if (holds(evaluate(m, s.values, forced), event)) total += s.p;
    }
    return total;
}

double prob_counterfactual(const DiscreteScm& m, const Assignment& target, const Assignment& antecedent,
                           const Assignment& evidence) {
    double num = 0, den = 0;
    for (const auto& s : exo_states(m)) {
        if (!holds(evaluate(m, s.values), evidence)) continue;
        den += s.p;
        if (holds(evaluate(m, s.values, antecedent), target)) num += s.p;
    }
    return den == 0 ? -1.0 : num / den;
}

double nested_mean(const DiscreteScm& m, const std::string& x, const std::string& med, const std::string& y,
                   const std::string& x_outer, const std::string& x_inner,
                   const std::function<double(const std::string&)>& score) {
    double total = 0;
    for (const auto& s : exo_states(m)) {
        const auto inner = evaluate(m, s.values, {{x, x_inner}}).at(med);
        total += s.p * score(evaluate(m, s.values, {{x, x_outer}, {med, inner}}).at(y));
    }
    return total;
}

// ---------------------------------------------------------------------------

std::vector<Admg> all_dags(const std::vector<std::string>& nodes) {
    const std::size_t n = nodes.size();
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
    std::vector<Admg> out;
    std::size_t total = 1;
    for (std::size_t k = 0; k < pairs.size(); ++k) total *= 3;
    for (std::size_t code = 0; code < total; ++code) {
        std::vector<std::uint32_t> parents(n, 0);
        std::vector<Admg::Edge> edges;
        std::size_t c = code;
        for (auto [i, j] : pairs) {
            switch (c % 3) {
            case 1:
                parents[j] |= 1U << i;
                edges.emplace_back(nodes[i], nodes[j]);
                break;
            case 2:
                parents[i] |= 1U << j;
                edges.emplace_back(nodes[j], nodes[i]);
                break;
            default:
                break;
            }
            c /= 3;
        }
        // Acyclic iff repeatedly peeling parentless nodes empties the graph.
        std::uint32_t left = (1U << n) - 1;
        bool peeled = true;
        while (left && peeled) {
            peeled = false;
            for (std::size_t v = 0; v < n; ++v) {
                if ((left >> v & 1U) && (parents[v] & left) == 0) {
                    left &= ~(1U << v);
                    peeled = true;
                }
            }
        }
        if (left == 0) out.emplace_back(nodes, edges, std::vector<Admg::Edge>{});
    }
    return out;
}

CpdagOracle::CpdagOracle(std::vector<std::string> nodes) : nodes_(std::move(nodes)) {
    std::sort(nodes_.begin(), nodes_.end());
    dags_ = all_dags(nodes_);
    for (std::size_t i = 0; i < dags_.size(); ++i) by_signature_[signature(dags_[i])].push_back(i);
}

std::vector<bool> CpdagOracle::signature(const Admg& dag) const {
    std::vector<bool> sig;
    const std::size_t n = nodes_.size();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            std::vector<std::string> rest;
            for (std::size_t k = 0; k < n; ++k)
                if (k != i && k != j) rest.push_back(nodes_[k]);
            for (std::size_t bits = 0; bits < (std::size_t{1} << rest.size()); ++bits) {
                std::vector<std::string> z;
                for (std::size_t k = 0; k < rest.size(); ++k)
                    if (bits >> k & 1U) z.push_back(rest[k]);
                sig.push_back(path_dsep(dag, {nodes_[i]}, {nodes_[j]}, z));
            }
        }
    }
    return sig;
}

causeway::Cpdag CpdagOracle::cpdag_of(const Admg& dag) const {
    const auto& members = by_signature_.at(signature(dag));
    causeway::Cpdag out;
    out.nodes = nodes_;
    for (auto [a, b] : dag.directed_edges()) {
        bool same = true;
        for (auto idx : members) same = same && dags_[idx].has_directed(a, b);
        if (same) out.directed.emplace_back(dag.name(a), dag.name(b));
        else out.undirected.emplace_back(std::min(dag.name(a), dag.name(b)), std::max(dag.name(a), dag.name(b)));
    }
    std::sort(out.directed.begin(), out.directed.end());
    std::sort(out.undirected.begin(), out.undirected.end());
    return out;
}

// ---------------------------------------------------------------------------

namespace {

struct ParityModel {
    std::vector<std::size_t> masks;     // per node: bit k<n endogenous parent k, bit n+l latent l
    std::vector<int> constants;         // per node
    std::vector<double> latent_probs;   // P(latent = 1)
};

// Observational cells over all endogenous bit patterns, plus P(Y=1 | do(X=x)) for x = 0, 1.
void evaluate_parity(const ParityModel& pm, const std::vector<causeway::NodeId>& order, std::size_t n, std::size_t x,
                     std::size_t y, std::vector<double>& obs, double (&do_y)[2]) {
    const std::size_t L = pm.latent_probs.size();
    obs.assign(std::size_t{1} << n, 0.0);
    do_y[0] = do_y[1] = 0;
    for (std::size_t lat = 0; lat < (std::size_t{1} << L); ++lat) {
        double p = 1;
        for (std::size_t l = 0; l < L; ++l) p *= (lat >> l & 1U) ? pm.latent_probs[l] : 1 - pm.latent_probs[l];
        for (int forced = -1; forced <= 1; ++forced) {
            std::size_t state = 0;
            for (auto v : order) {
                int bit;
                if (forced >= 0 && v == x) {
                    bit = forced;
                } else {
                    const std::size_t inputs = (state & pm.masks[v]) | ((lat << n) & pm.masks[v]);
                    bit = (std::popcount(inputs) + pm.constants[v]) & 1;
                }
                if (bit) state |= std::size_t{1} << v;
            }
            if (forced < 0) obs[state] += p;
            else if (state >> y & 1U) do_y[forced] += p;
        }
    }
}

DiscreteScm build_parity(const Admg& g, const ParityModel& pm) {
    const std::size_t n = g.size();
    std::vector<ExogenousVar> exo;
    const auto bi = g.bidirected_edges();
    std::vector<std::string> latent_names;
    for (std::size_t l = 0; l < bi.size(); ++l) {
        latent_names.push_back("U_" + g.name(bi[l].first) + "_" + g.name(bi[l].second));
        const double p = pm.latent_probs[l];
        exo.push_back({latent_names.back(), {"0", "1"}, {1 - p, p}});
    }
    std::vector<EndogenousVar> endo;
    for (causeway::NodeId v = 0; v < n; ++v) {
        EndogenousVar var;
        var.name = g.name(v);
        std::vector<std::size_t> bits;
        for (auto p : g.parents(v)) {
            var.parents.push_back(g.name(p));
            bits.push_back(p);
        }
        for (std::size_t l = 0; l < bi.size(); ++l) {
            if (bi[l].first == v || bi[l].second == v) {
                var.parents.push_back(latent_names[l]);
                bits.push_back(n + l);
            }
        }
        for (std::size_t row = 0; row < (std::size_t{1} << bits.size()); ++row) {
            std::vector<std::string> key;
            int parity = pm.constants[v];
            for (std::size_t k = 0; k < bits.size(); ++k) {
                const bool on = row >> k & 1U;
                key.push_back(on ? "1" : "0");
                if (on && (pm.masks[v] >> bits[k] & 1U)) parity ^= 1;
            }
            var.table[key] = parity ? "1" : "0";
        }
        var.domain = {"0", "1"};
        endo.push_back(std::move(var));
    }
    return DiscreteScm(std::move(exo), std::move(endo));
}

}  // namespace

WitnessPair find_witness_pair(const Admg& g, const std::string& x_name, const std::string& y_name,
                              std::size_t max_models) {
    const std::size_t n = g.size();
    const auto bi = g.bidirected_edges();
    const std::size_t L = bi.size();
    const std::size_t x = g.id(x_name), y = g.id(y_name);
    const auto order = g.topological_order();

    // Allowed inputs per node and the size of the search space.
    std::vector<std::vector<std::size_t>> allowed(n);
    for (causeway::NodeId v = 0; v < n; ++v) {
        for (auto p : g.parents(v)) allowed[v].push_back(p);
        for (std::size_t l = 0; l < L; ++l)
            if (bi[l].first == v || bi[l].second == v) allowed[v].push_back(n + l);
    }
    const std::vector<double> prob_choices{0.5, 0.25};

    std::map<std::vector<long long>, std::vector<std::pair<ParityModel, std::array<double, 2>>>> seen;
    ParityModel pm;
    pm.masks.assign(n, 0);
    pm.constants.assign(n, 0);
    pm.latent_probs.assign(L, 0.5);

    // Odometer over (constant, subset) per node and probability choice per latent.
    std::vector<std::size_t> digit(n + L, 0);
    std::vector<std::size_t> radix;
    for (causeway::NodeId v = 0; v < n; ++v) radix.push_back(std::size_t{2} << allowed[v].size());
    for (std::size_t l = 0; l < L; ++l) radix.push_back(prob_choices.size());

    WitnessPair result;
    std::vector<double> obs;
    for (std::size_t count = 0; count < max_models; ++count) {
        for (causeway::NodeId v = 0; v < n; ++v) {
            pm.constants[v] = static_cast<int>(digit[v] & 1U);
            pm.masks[v] = 0;
            for (std::size_t k = 0; k < allowed[v].size(); ++k)
                if (digit[v] >> (k + 1) & 1U) pm.masks[v] |= std::size_t{1} << allowed[v][k];
        }
        for (std::size_t l = 0; l < L; ++l) pm.latent_probs[l] = prob_choices[digit[n + l]];

        double do_y[2];
        evaluate_parity(pm, order, n, x, y, obs, do_y);
        std::vector<long long> key;
        for (double c : obs) key.push_back(std::llround(c * 1e12));
        auto& bucket = seen[key];
        for (const auto& [other, other_do] : bucket) {
            const double gap = std::max(std::abs(other_do[0] - do_y[0]), std::abs(other_do[1] - do_y[1]));
            if (gap >= 1e-3) {
                const auto a = build_parity(g, other);
                const auto b = build_parity(g, pm);
                result.found = true;
                result.first = causeway::serialize_scm(a);
                result.second = causeway::serialize_scm(b);
                // Re-measure both with the slow oracle.
                const auto nodes = g.names();
                for (std::size_t cell = 0; cell < (std::size_t{1} << n); ++cell) {
                    Assignment event;
                    for (std::size_t v = 0; v < n; ++v) event[nodes[v]] = (cell >> v & 1U) ? "1" : "0";
                    result.obs_gap = std::max(result.obs_gap, std::abs(prob_do(a, event) - prob_do(b, event)));
                }
                for (const char* xv : {"0", "1"}) {
                    result.do_gap = std::max(result.do_gap, std::abs(prob_do(a, {{y_name, "1"}}, {{x_name, xv}}) -
                                                                     prob_do(b, {{y_name, "1"}}, {{x_name, xv}})));
                }
                return result;
            }
        }
        if (bucket.size() < 4) bucket.push_back({pm, {do_y[0], do_y[1]}});

        std::size_t k = 0;
        while (k < digit.size() && ++digit[k] == radix[k]) digit[k++] = 0;
        if (k == digit.size()) break;
    }
    return result;
}

causeway::Dataset mask_column(const causeway::Dataset& d, const std::string& column, const std::string& indicator,
                              const std::string& miss_value) {
    const auto ci = d.require_column(column);
    const auto ri = d.require_column(indicator);
    std::ostringstream csv;
    bool first = true;
    for (std::size_t c = 0; c < d.num_columns(); ++c) {
        if (c == ri) continue;
        csv << (first ? "" : ",") << d.columns()[c];
        first = false;
    }
    csv << '\n';
    for (std::size_t r = 0; r < d.num_rows(); ++r) {
        first = true;
        const bool masked = d.domain(ri)[static_cast<std::size_t>(d.cell(r, ri))] == miss_value;
        for (std::size_t c = 0; c < d.num_columns(); ++c) {
            if (c == ri) continue;
            csv << (first ? "" : ",");
            first = false;
            if ((c == ci && masked) || d.missing(r, c)) csv << "NA";
            else csv << d.domain(c)[static_cast<std::size_t>(d.cell(r, c))];
        }
        csv << '\n';
    }
    std::istringstream in(csv.str());
    return causeway::load_table(in);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::string data_path(const std::string& name) { return std::string(CAUSEWAY_TEST_DATA_DIR) + "/" + name; }

}  // namespace testutil
