#include "causeway/scm.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <random>
#include <set>
#include <sstream>

#include "causeway/errors.hpp"
#include "causeway/values.hpp"
#include "line_format.hpp"
#include "query_syntax.hpp"

namespace causeway {

DiscreteScm::DiscreteScm(std::vector<ExogenousVar> exogenous, std::vector<EndogenousVar> endogenous,
                         std::size_t state_cap)
    : exo_(std::move(exogenous)), endo_(std::move(endogenous)), state_cap_(state_cap) {
    std::map<std::string, ParentRef> refs;
    for (std::size_t i = 0; i < exo_.size(); ++i) {
        auto& u = exo_[i];
        if (!is_identifier(u.name)) throw ModelError("invalid variable name '" + u.name + "'");
        if (!refs.emplace(u.name, ParentRef{true, i}).second) throw ModelError("duplicate variable '" + u.name + "'");
        if (u.domain.empty() || u.domain.size() != u.probs.size())
            throw ModelError("exogenous '" + u.name + "' needs one probability per domain value");
        if (std::set<std::string>(u.domain.begin(), u.domain.end()).size() != u.domain.size())
            throw ModelError("exogenous '" + u.name + "' repeats a domain value");
        double total = 0;
        for (double p : u.probs) {
            if (!(p >= 0)) throw ModelError("exogenous '" + u.name + "' has a negative probability");
            total += p;
        }
        if (std::abs(total - 1.0) > 1e-12) throw ModelError("probabilities of '" + u.name + "' do not sum to 1");
        if (exo_states_ > state_cap_ / u.domain.size() + 1)
            throw StateSpaceOverflow("exogenous state space exceeds the cap of " + std::to_string(state_cap_));
        exo_states_ *= u.domain.size();
    }
    if (exo_states_ > state_cap_)
        throw StateSpaceOverflow("exogenous state space exceeds the cap of " + std::to_string(state_cap_));

    for (std::size_t i = 0; i < endo_.size(); ++i) {
        const auto& v = endo_[i];
        if (!is_identifier(v.name)) throw ModelError("invalid variable name '" + v.name + "'");
        if (!refs.emplace(v.name, ParentRef{false, i}).second) throw ModelError("duplicate variable '" + v.name + "'");
    }

    // Endogenous domains: declared values, table outputs, and values children use.
    for (auto& v : endo_)
        for (const auto& [key, out] : v.table) v.domain.push_back(out);
    for (const auto& child : endo_) {
        for (std::size_t k = 0; k < child.parents.size(); ++k) {
            auto it = refs.find(child.parents[k]);
            if (it == refs.end()) throw ModelError("'" + child.name + "' has undeclared parent '" + child.parents[k] + "'");
            if (it->second.exogenous) continue;
            for (const auto& [key, out] : child.table) {
                if (key.size() != child.parents.size())
                    throw ModelError("table row of '" + child.name + "' has the wrong arity");
                endo_[it->second.index].domain.push_back(key[k]);
            }
        }
    }
    for (auto& v : endo_) {
        sort_values(v.domain);
        if (v.domain.empty()) throw ModelError("endogenous '" + v.name + "' has an empty table");
    }

    auto domain_of = [&](const ParentRef& r) -> const std::vector<std::string>& {
        return r.exogenous ? exo_[r.index].domain : endo_[r.index].domain;
    };

    std::size_t joint_states = 1;
    compiled_.resize(endo_.size());
    for (std::size_t i = 0; i < endo_.size(); ++i) {
        const auto& v = endo_[i];
        auto& c = compiled_[i];
        joint_states = joint_states > state_cap_ / v.domain.size() + 1 ? state_cap_ + 1 : joint_states * v.domain.size();
        std::set<std::string> seen_parents;
        for (const auto& p : v.parents) {
            if (p == v.name) throw ModelError("'" + v.name + "' lists itself as a parent");
            if (!seen_parents.insert(p).second) throw ModelError("'" + v.name + "' repeats parent '" + p + "'");
            c.parents.push_back(refs.at(p));
        }
        std::size_t rows = 1;
        c.strides.assign(c.parents.size(), 1);
        for (std::size_t k = c.parents.size(); k-- > 0;) {
            c.strides[k] = rows;
            rows *= domain_of(c.parents[k]).size();
            if (rows > state_cap_) throw StateSpaceOverflow("function table of '" + v.name + "' is too large");
        }
        const std::size_t unset = std::numeric_limits<std::size_t>::max();
        c.table.assign(rows, unset);
        for (const auto& [key, out] : v.table) {
            std::size_t offset = 0;
            for (std::size_t k = 0; k < key.size(); ++k) {
                const auto& dom = domain_of(c.parents[k]);
                auto it = std::find(dom.begin(), dom.end(), key[k]);
                if (it == dom.end())
                    throw ModelError("table of '" + v.name + "' uses value '" + key[k] + "' outside the domain of '" +
                                     v.parents[k] + "'");
                offset += static_cast<std::size_t>(it - dom.begin()) * c.strides[k];
            }
            c.table[offset] = value_index(i, out);
        }
        if (std::find(c.table.begin(), c.table.end(), unset) != c.table.end())
            throw ModelError("function table of '" + v.name + "' is not total over its parent domains");
    }
    if (joint_states > state_cap_)
        throw StateSpaceOverflow("endogenous joint state space exceeds the cap of " + std::to_string(state_cap_));

    // Topological order of endogenous variables.
    std::vector<bool> placed(endo_.size(), false);
    while (topo_.size() < endo_.size()) {
        bool progress = false;
        for (std::size_t i = 0; i < endo_.size(); ++i) {
            if (placed[i]) continue;
            bool ready = std::all_of(compiled_[i].parents.begin(), compiled_[i].parents.end(),
                                     [&](const ParentRef& r) { return r.exogenous || placed[r.index]; });
            if (ready) {
                topo_.push_back(i);
                placed[i] = true;
                progress = true;
            }
        }
        if (!progress) throw ModelError("structural equations are cyclic");
    }
}

std::vector<std::string> DiscreteScm::endogenous_names() const {
    std::vector<std::string> out;
    for (const auto& v : endo_) out.push_back(v.name);
    return out;
}

bool DiscreteScm::is_endogenous(std::string_view name) const {
    return std::any_of(endo_.begin(), endo_.end(), [&](const EndogenousVar& v) { return v.name == name; });
}

std::size_t DiscreteScm::endogenous_index(std::string_view name) const {
    for (std::size_t i = 0; i < endo_.size(); ++i)
        if (endo_[i].name == name) return i;
    throw UnknownVariable(std::string(name));
}

const std::vector<std::string>& DiscreteScm::domain(std::string_view name) const {
    for (const auto& u : exo_)
        if (u.name == name) return u.domain;
    return endo_[endogenous_index(name)].domain;
}

std::size_t DiscreteScm::value_index(std::size_t endo, std::string_view value) const {
    const auto& d = endo_.at(endo).domain;
    auto it = std::find(d.begin(), d.end(), value);
    if (it == d.end()) throw Error("value '" + std::string(value) + "' is outside the domain of '" + endo_[endo].name + "'");
    return static_cast<std::size_t>(it - d.begin());
}

void DiscreteScm::for_each_exogenous_state(
    const std::function<void(const std::vector<std::size_t>&, double)>& visit) const {
    std::vector<std::size_t> state(exo_.size(), 0);
    while (true) {
        double p = 1.0;
        for (std::size_t i = 0; i < exo_.size(); ++i) p *= exo_[i].probs[state[i]];
        if (p > 0) visit(state, p);
        std::size_t k = exo_.size();
        while (k > 0) {
            if (++state[k - 1] < exo_[k - 1].domain.size()) break;
            state[k - 1] = 0;
            --k;
        }
        if (k == 0) return;
    }
}

std::vector<std::size_t> DiscreteScm::solve(const std::vector<std::size_t>& exo_state,
                                            const std::vector<int>& forced) const {
    std::vector<std::size_t> values(endo_.size(), 0);
    for (auto i : topo_) {
        if (!forced.empty() && forced[i] >= 0) {
            values[i] = static_cast<std::size_t>(forced[i]);
            continue;
        }
        const auto& c = compiled_[i];
        std::size_t offset = 0;
        for (std::size_t k = 0; k < c.parents.size(); ++k) {
            const auto& r = c.parents[k];
            offset += (r.exogenous ? exo_state[r.index] : values[r.index]) * c.strides[k];
        }
        values[i] = c.table[offset];
    }
    return values;
}

JointTable observational_joint(const DiscreteScm& m) {
    std::vector<std::vector<std::string>> domains;
    std::vector<std::size_t> strides(m.endogenous().size(), 1);
    std::size_t cells = 1;
    for (const auto& v : m.endogenous()) domains.push_back(v.domain);
    for (std::size_t i = domains.size(); i-- > 0;) {
        strides[i] = cells;
        cells *= domains[i].size();
    }
    std::vector<double> mass(cells, 0.0);
    m.for_each_exogenous_state([&](const std::vector<std::size_t>& u, double p) {
        auto values = m.solve(u);
        std::size_t o = 0;
        for (std::size_t i = 0; i < values.size(); ++i) o += values[i] * strides[i];
        mass[o] += p;
    });
    return JointTable(m.endogenous_names(), std::move(domains), std::move(mass));
}

DiscreteScm intervene(const DiscreteScm& m, const Intervention& assignment) {
    auto endo = m.endogenous();
    for (const auto& [var, value] : assignment) {
        auto i = m.endogenous_index(var);
        m.value_index(i, value);
        endo[i].parents.clear();
        endo[i].table = {{{}, value}};
        endo[i].domain = m.endogenous()[i].domain;
    }
    return DiscreteScm(m.exogenous(), std::move(endo), m.state_cap());
}

namespace {

std::vector<std::pair<std::size_t, std::size_t>> index_event(const DiscreteScm& m, const Event& e) {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (const auto& [var, value] : e) {
        auto i = m.endogenous_index(var);
        out.emplace_back(i, m.value_index(i, value));
    }
    return out;
}

bool holds(const std::vector<std::size_t>& values, const std::vector<std::pair<std::size_t, std::size_t>>& event) {
    return std::all_of(event.begin(), event.end(), [&](const auto& kv) { return values[kv.first] == kv.second; });
}

std::string describe(const Event& e) {
    std::vector<std::string> parts;
    for (const auto& [k, v] : e) parts.push_back(k + "=" + v);
    return join(parts, ", ");
}

}  // namespace

double counterfactual_query(const DiscreteScm& m, const CounterfactualQuery& q) {
    const auto evidence = index_event(m, q.evidence);

    // Abduction: posterior over full exogenous states given the evidence.
    std::vector<std::pair<std::vector<std::size_t>, double>> posterior;
    double evidence_mass = 0;
    m.for_each_exogenous_state([&](const std::vector<std::size_t>& u, double p) {
        if (!holds(m.solve(u), evidence)) return;
        posterior.emplace_back(u, p);
        evidence_mass += p;
    });
    if (evidence_mass <= 0) throw ZeroEvidence(describe(q.evidence));

    // Action.
    const DiscreteScm surgered = intervene(m, q.antecedent);
    const auto target = index_event(surgered, q.target);

    // Prediction.
    double hit = 0;
    for (const auto& [u, p] : posterior)
        if (holds(surgered.solve(u), target)) hit += p;
    return hit / evidence_mass;
}

Dataset sample(const DiscreteScm& m, std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    auto uniform = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
    const auto& exo = m.exogenous();
    std::vector<std::vector<double>> cumulative;
    for (const auto& u : exo) {
        std::vector<double> c;
        double acc = 0;
        for (double p : u.probs) c.push_back(acc += p);
        cumulative.push_back(std::move(c));
    }
    std::vector<std::int32_t> cells;
    cells.reserve(n * m.endogenous().size());
    std::vector<std::size_t> state(exo.size());
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t i = 0; i < exo.size(); ++i) {
            double x = uniform() * cumulative[i].back();
            std::size_t k = 0;
            while (k + 1 < cumulative[i].size() && (x >= cumulative[i][k] || exo[i].probs[k] == 0)) ++k;
            state[i] = k;
        }
        for (auto v : m.solve(state)) cells.push_back(static_cast<std::int32_t>(v));
    }
    std::vector<std::vector<std::string>> domains;
    for (const auto& v : m.endogenous()) domains.push_back(v.domain);
    return Dataset(m.endogenous_names(), std::move(domains), std::move(cells));
}

Admg latent_projection(const DiscreteScm& m) {
    std::vector<Admg::Edge> directed;
    std::vector<Admg::Edge> bidirected;
    std::map<std::string, std::vector<std::string>> exo_children;
    for (const auto& v : m.endogenous()) {
        for (const auto& p : v.parents) {
            if (m.is_endogenous(p)) directed.emplace_back(p, v.name);
            else exo_children[p].push_back(v.name);
        }
    }
    for (const auto& [u, kids] : exo_children)
        for (std::size_t i = 0; i < kids.size(); ++i)
            for (std::size_t j = i + 1; j < kids.size(); ++j) bidirected.emplace_back(kids[i], kids[j]);
    return Admg(m.endogenous_names(), directed, bidirected);
}

// ---------------------------------------------------------------------------
// Text format

namespace {

double parse_probability(const detail::Line& line, std::size_t i) {
    const auto& s = line.tokens[i].text;
    double v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) line.fail("expected a probability, got '" + s + "'", i);
    return v;
}

class LineCursor {
public:
    explicit LineCursor(const detail::Line& line) : line_(line) {}

    bool done() const { return i_ >= line_.tokens.size(); }
    const std::string& peek() const {
        static const std::string end;
        return done() ? end : line_.tokens[i_].text;
    }
    std::size_t index() const { return i_; }
    const std::string& next(const char* what) {
        if (done()) line_.fail(std::string("expected ") + what, i_);
        return line_.tokens[i_++].text;
    }
    void expect(const std::string& s) {
        if (peek() != s) line_.fail("expected '" + s + "'", i_);
        ++i_;
    }
    bool accept(const std::string& s) {
        if (peek() != s) return false;
        ++i_;
        return true;
    }
    [[noreturn]] void fail(const std::string& what) const { line_.fail(what, i_); }

    // `(a, b, c)` possibly empty.
    std::vector<std::string> tuple(const char* what) {
        std::vector<std::string> out;
        expect("(");
        if (accept(")")) return out;
        do {
            out.push_back(next(what));
        } while (accept(","));
        expect(")");
        return out;
    }

private:
    const detail::Line& line_;
    std::size_t i_ = 0;
};

}  // namespace

DiscreteScm parse_scm(std::string_view text, std::size_t state_cap) {
    std::vector<ExogenousVar> exo;
    std::vector<EndogenousVar> endo;
    for (const auto& line : detail::tokenize_lines(text)) {
        LineCursor cur(line);
        const auto& kw = cur.next("'exo' or 'endo'");
        if (kw == "exo") {
            ExogenousVar u;
            u.name = cur.next("a variable name");
            if (!is_identifier(u.name)) line.fail("invalid variable name '" + u.name + "'", 1);
            cur.expect("{");
            do {
                u.domain.push_back(cur.next("a value"));
                cur.expect(":");
                u.probs.push_back(parse_probability(line, cur.index()));
                cur.next("a probability");
            } while (cur.accept(","));
            cur.expect("}");
            if (!cur.done()) cur.fail("unexpected token");
            exo.push_back(std::move(u));
        } else if (kw == "endo") {
            EndogenousVar v;
            v.name = cur.next("a variable name");
            if (!is_identifier(v.name)) line.fail("invalid variable name '" + v.name + "'", 1);
            v.parents = cur.tuple("a parent name");
            cur.expect("{");
            if (!cur.accept("}")) {
                do {
                    auto key_at = cur.index();
                    auto key = cur.tuple("a parent value");
                    if (key.size() != v.parents.size()) line.fail("table row has the wrong number of values", key_at);
                    cur.expect("->");
                    auto out = cur.next("an output value");
                    if (!v.table.emplace(std::move(key), out).second) line.fail("duplicate table row", key_at);
                } while (cur.accept(","));
                cur.expect("}");
            }
            if (!cur.done()) cur.fail("unexpected token");
            endo.push_back(std::move(v));
        } else {
            line.fail("expected 'exo' or 'endo', got '" + kw + "'", 0);
        }
    }
    return DiscreteScm(std::move(exo), std::move(endo), state_cap);
}

std::string serialize_scm(const DiscreteScm& m) {
    std::ostringstream out;
    out.precision(17);
    for (const auto& u : m.exogenous()) {
        out << "exo " << u.name << " {";
        for (std::size_t i = 0; i < u.domain.size(); ++i) out << (i ? ", " : "") << u.domain[i] << ": " << u.probs[i];
        out << "}\n";
    }
    for (const auto& v : m.endogenous()) {
        out << "endo " << v.name << " (" << join(v.parents, ",") << ") {";
        bool first = true;
        for (const auto& [key, value] : v.table) {
            out << (first ? "" : ", ") << "(" << join(key, ",") << ") -> " << value;
            first = false;
        }
        out << "}\n";
    }
    return out.str();
}

CounterfactualQuery parse_counterfactual(std::string_view text, const std::vector<std::string>& known) {
    auto syntax = detail::parse_query_syntax(text, known);
    auto resolve = [&](const detail::QueryItem& item) {
        if (!item.value) throw ParseError("counterfactual queries need concrete values ('" + item.name + "=...')", 1, item.column);
        if (item.is_do) throw ParseError("do() is not part of counterfactual syntax; use subscripts", 1, item.column);
        return std::pair{item.name, *item.value};
    };
    CounterfactualQuery q;
    bool first = true;
    for (const auto& item : syntax.outcome) {
        Intervention sub;
        for (const auto& s : item.subscript) sub.insert(resolve(s));
        if (!first && sub != q.antecedent)
            throw ParseError("all outcomes must share one antecedent", 1, item.column);
        q.antecedent = sub;
        first = false;
        q.target.insert(resolve(item));
    }
    for (const auto& item : syntax.given) q.evidence.insert(resolve(item));
    return q;
}

}  // namespace causeway
