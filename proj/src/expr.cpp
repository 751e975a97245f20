#include "causeway/expr.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>

#include "causeway/errors.hpp"
#include "causeway/values.hpp"

namespace causeway {

std::string default_symbol(std::string_view var) { return to_lower(var); }

std::string resolve_symbol(std::string_view symbol, const std::vector<std::string>& known) {
    auto match = [&](std::string_view s) -> std::optional<std::string> {
        for (const auto& v : known)
            if (v == s) return v;
        for (const auto& v : known)
            if (to_lower(v) == s) return v;
        return std::nullopt;
    };
    if (auto v = match(symbol)) return *v;
    std::string_view stripped = symbol;
    while (!stripped.empty() && (std::isdigit(static_cast<unsigned char>(stripped.back())) || stripped.back() == '\''))
        stripped.remove_suffix(1);
    if (!stripped.empty()) {
        if (auto v = match(stripped)) return *v;
    }
    std::string_view no_primes = symbol;
    while (!no_primes.empty() && no_primes.back() == '\'') no_primes.remove_suffix(1);
    return to_upper(no_primes);
}

// ---------------------------------------------------------------------------
// AST construction

Estimand Estimand::prob(std::vector<Assignment> joint, std::vector<Assignment> given) {
    Estimand e;
    e.kind_ = Kind::Prob;
    e.joint_ = std::move(joint);
    e.given_ = std::move(given);
    return e;
}

Estimand Estimand::sum(std::string symbol, std::string var, Estimand body) {
    Estimand e;
    e.kind_ = Kind::Sum;
    e.symbol_ = std::move(symbol);
    e.var_ = std::move(var);
    e.children_.push_back(std::move(body));
    return e;
}

Estimand Estimand::product(std::vector<Estimand> factors) {
    if (factors.empty()) return one();
    if (factors.size() == 1) return std::move(factors.front());
    Estimand e;
    e.kind_ = Kind::Product;
    e.children_ = std::move(factors);
    return e;
}

Estimand Estimand::quotient(Estimand numerator, Estimand denominator) {
    Estimand e;
    e.kind_ = Kind::Quotient;
    e.children_.push_back(std::move(numerator));
    e.children_.push_back(std::move(denominator));
    return e;
}

// ---------------------------------------------------------------------------
// JointTable

JointTable::JointTable(std::vector<std::string> variables, std::vector<std::vector<std::string>> domains,
                       std::vector<double> mass)
    : variables_(std::move(variables)), domains_(std::move(domains)), mass_(std::move(mass)) {
    if (variables_.size() != domains_.size()) throw Error("joint table: one domain per variable required");
    std::size_t cells = 1;
    strides_.assign(variables_.size(), 1);
    for (std::size_t i = variables_.size(); i-- > 0;) {
        if (domains_[i].empty()) throw Error("joint table: empty domain for '" + variables_[i] + "'");
        strides_[i] = cells;
        cells *= domains_[i].size();
    }
    if (mass_.size() != cells) throw Error("joint table: mass vector does not match the domain product");
    double total = 0;
    for (double m : mass_) {
        if (!(m >= 0)) throw Error("joint table: negative or NaN mass");
        total += m;
    }
    if (std::abs(total - 1.0) > 1e-9) throw Error("joint table: total mass is " + std::to_string(total));
}

std::optional<std::size_t> JointTable::var_index(std::string_view name) const {
    for (std::size_t i = 0; i < variables_.size(); ++i)
        if (variables_[i] == name) return i;
    return std::nullopt;
}

std::optional<std::size_t> JointTable::value_index(std::size_t var, std::string_view value) const {
    const auto& d = domains_.at(var);
    for (std::size_t i = 0; i < d.size(); ++i)
        if (d[i] == value) return i;
    return std::nullopt;
}

double JointTable::probability(const std::vector<std::pair<std::size_t, std::size_t>>& fixed) const {
    std::vector<int> pinned(variables_.size(), -1);
    std::size_t base = 0;
    for (auto [var, value] : fixed) {
        if (pinned[var] >= 0) {
            if (static_cast<std::size_t>(pinned[var]) != value) return 0.0;
            continue;
        }
        pinned[var] = static_cast<int>(value);
        base += value * strides_[var];
    }
    std::vector<std::size_t> free;
    for (std::size_t i = 0; i < variables_.size(); ++i)
        if (pinned[i] < 0) free.push_back(i);

    std::vector<std::size_t> counter(free.size(), 0);
    double total = 0;
    std::size_t offset = base;
    while (true) {
        total += mass_[offset];
        std::size_t k = free.size();
        while (k > 0) {
            auto v = free[k - 1];
            offset += strides_[v];
            if (++counter[k - 1] < domains_[v].size()) break;
            offset -= strides_[v] * domains_[v].size();
            counter[k - 1] = 0;
            --k;
        }
        if (k == 0) break;
    }
    return total;
}

double JointTable::probability(const std::map<std::string, std::string>& event) const {
    std::vector<std::pair<std::size_t, std::size_t>> fixed;
    for (const auto& [var, value] : event) {
        auto v = var_index(var);
        if (!v) throw UnknownVariable(var);
        auto x = value_index(*v, value);
        if (!x) return 0.0;
        fixed.emplace_back(*v, *x);
    }
    return probability(fixed);
}

JointTable JointTable::marginal(const std::vector<std::string>& keep) const {
    std::vector<std::size_t> idx;
    std::vector<std::vector<std::string>> doms;
    for (const auto& k : keep) {
        auto v = var_index(k);
        if (!v) throw UnknownVariable(k);
        idx.push_back(*v);
        doms.push_back(domains_[*v]);
    }
    std::vector<std::size_t> out_strides(idx.size(), 1);
    std::size_t out_cells = 1;
    for (std::size_t i = idx.size(); i-- > 0;) {
        out_strides[i] = out_cells;
        out_cells *= doms[i].size();
    }
    std::vector<double> out(out_cells, 0.0);
    for (std::size_t c = 0; c < mass_.size(); ++c) {
        std::size_t o = 0;
        for (std::size_t i = 0; i < idx.size(); ++i) o += value_at(c, idx[i]) * out_strides[i];
        out[o] += mass_[c];
    }
    return JointTable(keep, std::move(doms), std::move(out));
}

// ---------------------------------------------------------------------------
// Evaluation

namespace {

std::string render_event(const std::vector<std::pair<std::string, std::string>>& event) {
    std::vector<std::string> parts;
    for (const auto& [var, value] : event) parts.push_back(var + "=" + value);
    return "P(" + join(parts, ",") + ")";
}

class Evaluator {
public:
    Evaluator(const JointTable& table, Binding binding) : table_(table), binding_(std::move(binding)) {}

    double eval(const Estimand& e) {
        switch (e.kind()) {
        case Estimand::Kind::One:
            return 1.0;
        case Estimand::Kind::Prob:
            return eval_prob(e);
        case Estimand::Kind::Product: {
            double p = 1.0;
            for (const auto& f : e.factors()) p *= eval(f);
            return p;
        }
        case Estimand::Kind::Quotient: {
            double num = eval(e.numerator());
            double den = eval(e.denominator());
            if (den == 0.0) throw ConditioningOnZero(render(e.denominator()) + " evaluates to 0");
            return num / den;
        }
        case Estimand::Kind::Sum: {
            auto v = table_.var_index(e.bound_var());
            if (!v) throw UnknownVariable(e.bound_var());
            auto saved = binding_.find(e.symbol()) != binding_.end() ? std::optional(binding_[e.symbol()]) : std::nullopt;
            double total = 0;
            for (const auto& value : table_.domain(*v)) {
                binding_[e.symbol()] = value;
                total += eval(e.body());
            }
            if (saved) binding_[e.symbol()] = *saved;
            else binding_.erase(e.symbol());
            return total;
        }
        }
        return 0.0;
    }

private:
    std::string value_of(const Assignment& a) const {
        if (!a.value.is_symbol()) return a.value.text;
        auto it = binding_.find(a.value.text);
        if (it == binding_.end()) throw Error("unbound value symbol '" + a.value.text + "'");
        return it->second;
    }

    // Returns false when some value lies outside its domain (a null event).
    bool collect(const std::vector<Assignment>& terms, std::vector<std::pair<std::size_t, std::size_t>>& fixed,
                 std::vector<std::pair<std::string, std::string>>& shown) const {
        bool possible = true;
        for (const auto& a : terms) {
            auto v = table_.var_index(a.var);
            if (!v) throw UnknownVariable(a.var);
            auto value = value_of(a);
            shown.emplace_back(a.var, value);
            auto x = table_.value_index(*v, value);
            if (!x) possible = false;
            else fixed.emplace_back(*v, *x);
        }
        return possible;
    }

    double eval_prob(const Estimand& e) const {
        std::vector<std::pair<std::size_t, std::size_t>> fixed;
        std::vector<std::pair<std::string, std::string>> shown;
        bool given_possible = collect(e.given(), fixed, shown);
        double denominator = 1.0;
        if (!e.given().empty()) {
            denominator = given_possible ? table_.probability(fixed) : 0.0;
            if (denominator == 0.0) throw ConditioningOnZero(render_event(shown));
        }
        bool joint_possible = collect(e.joint(), fixed, shown);
        if (!joint_possible) return 0.0;
        return table_.probability(fixed) / denominator;
    }

    const JointTable& table_;
    Binding binding_;
};

}  // namespace

double eval_estimand(const Estimand& e, const JointTable& table, const Binding& binding) {
    return Evaluator(table, binding).eval(e);
}

// ---------------------------------------------------------------------------
// Free symbols

namespace {

void collect_free(const Estimand& e, std::vector<std::string>& bound, std::map<std::string, std::string>& out) {
    auto visit = [&](const std::vector<Assignment>& terms) {
        for (const auto& a : terms) {
            if (!a.value.is_symbol()) continue;
            if (std::find(bound.begin(), bound.end(), a.value.text) != bound.end()) continue;
            out.emplace(a.value.text, a.var);
        }
    };
    switch (e.kind()) {
    case Estimand::Kind::Prob:
        visit(e.joint());
        visit(e.given());
        break;
    case Estimand::Kind::Sum:
        bound.push_back(e.symbol());
        collect_free(e.body(), bound, out);
        bound.pop_back();
        break;
    case Estimand::Kind::Product:
    case Estimand::Kind::Quotient:
        for (const auto& c : e.factors()) collect_free(c, bound, out);
        break;
    case Estimand::Kind::One:
        break;
    }
}

}  // namespace

std::map<std::string, std::string> free_symbols(const Estimand& e) {
    std::vector<std::string> bound;
    std::map<std::string, std::string> out;
    collect_free(e, bound, out);
    return out;
}

// ---------------------------------------------------------------------------
// Simplification

namespace {

bool mentions_symbol(const Estimand& e, const std::string& sym) {
    auto in = [&](const std::vector<Assignment>& terms) {
        return std::any_of(terms.begin(), terms.end(),
                           [&](const Assignment& a) { return a.value.is_symbol() && a.value.text == sym; });
    };
    switch (e.kind()) {
    case Estimand::Kind::Prob:
        return in(e.joint()) || in(e.given());
    case Estimand::Kind::Sum:
        return e.symbol() != sym && mentions_symbol(e.body(), sym);
    case Estimand::Kind::Product:
    case Estimand::Kind::Quotient:
        return std::any_of(e.factors().begin(), e.factors().end(),
                           [&](const Estimand& c) { return mentions_symbol(c, sym); });
    case Estimand::Kind::One:
        return false;
    }
    return false;
}

bool contains_all(const std::vector<Assignment>& haystack, const std::vector<Assignment>& needles) {
    return std::all_of(needles.begin(), needles.end(), [&](const Assignment& a) {
        return std::find(haystack.begin(), haystack.end(), a) != haystack.end();
    });
}

bool same_set(const std::vector<Assignment>& a, const std::vector<Assignment>& b) {
    return contains_all(a, b) && contains_all(b, a);
}

std::vector<Assignment> minus(const std::vector<Assignment>& a, const std::vector<Assignment>& b) {
    std::vector<Assignment> out;
    for (const auto& x : a)
        if (std::find(b.begin(), b.end(), x) == b.end()) out.push_back(x);
    return out;
}

std::vector<Estimand> flatten_factors(const Estimand& e) {
    std::vector<Estimand> out;
    if (e.kind() == Estimand::Kind::Product) {
        for (const auto& f : e.factors()) {
            auto inner = flatten_factors(f);
            out.insert(out.end(), inner.begin(), inner.end());
        }
    } else if (e.kind() != Estimand::Kind::One) {
        out.push_back(e);
    }
    return out;
}

// P(a|b,C) * P(b|C) -> P(a,b|C)
bool merge_chain_rule(std::vector<Estimand>& factors) {
    for (std::size_t i = 0; i < factors.size(); ++i) {
        const auto& fi = factors[i];
        if (fi.kind() != Estimand::Kind::Prob) continue;
        for (std::size_t j = 0; j < factors.size(); ++j) {
            const auto& fj = factors[j];
            if (i == j || fj.kind() != Estimand::Kind::Prob || fj.joint().empty()) continue;
            if (!contains_all(fi.given(), fj.joint())) continue;
            if (!same_set(minus(fi.given(), fj.joint()), fj.given())) continue;
            auto joint = fi.joint();
            joint.insert(joint.end(), fj.joint().begin(), fj.joint().end());
            factors[i] = Estimand::prob(std::move(joint), fj.given());
            factors.erase(factors.begin() + static_cast<std::ptrdiff_t>(j));
            return true;
        }
    }
    return false;
}

// sum_{s} P(s,A|C) * rest, with s nowhere else -> P(A|C) * rest
std::optional<Estimand> collapse_sum(const Estimand& sum) {
    const auto& sym = sum.symbol();
    auto factors = flatten_factors(sum.body());
    for (std::size_t k = 0; k < factors.size(); ++k) {
        const auto& f = factors[k];
        if (f.kind() != Estimand::Kind::Prob) continue;
        auto hit = std::find_if(f.joint().begin(), f.joint().end(), [&](const Assignment& a) {
            return a.value.is_symbol() && a.value.text == sym && a.var == sum.bound_var();
        });
        if (hit == f.joint().end()) continue;
        std::vector<Assignment> joint;
        bool clean = true;
        for (const auto& a : f.joint()) {
            if (&a == &*hit) continue;
            if (a.var == sum.bound_var() || (a.value.is_symbol() && a.value.text == sym)) clean = false;
            joint.push_back(a);
        }
        for (const auto& a : f.given())
            if (a.var == sum.bound_var() || (a.value.is_symbol() && a.value.text == sym)) clean = false;
        for (std::size_t o = 0; o < factors.size() && clean; ++o)
            if (o != k && mentions_symbol(factors[o], sym)) clean = false;
        if (!clean) continue;
        factors[k] = joint.empty() ? Estimand::one() : Estimand::prob(std::move(joint), f.given());
        return Estimand::product(std::move(factors));
    }
    return std::nullopt;
}

Estimand simplify_once(const Estimand& e) {
    switch (e.kind()) {
    case Estimand::Kind::Prob:
    case Estimand::Kind::One:
        return e;
    case Estimand::Kind::Sum: {
        auto s = Estimand::sum(e.symbol(), e.bound_var(), simplify_once(e.body()));
        if (auto collapsed = collapse_sum(s)) return *collapsed;
        return s;
    }
    case Estimand::Kind::Product: {
        std::vector<Estimand> factors;
        for (const auto& f : e.factors()) {
            auto inner = flatten_factors(simplify_once(f));
            factors.insert(factors.end(), inner.begin(), inner.end());
        }
        while (merge_chain_rule(factors)) {
        }
        return Estimand::product(std::move(factors));
    }
    case Estimand::Kind::Quotient: {
        auto num = simplify_once(e.numerator());
        auto den = simplify_once(e.denominator());
        if (den.kind() == Estimand::Kind::One) return num;
        if (num == den) return Estimand::one();
        auto nf = flatten_factors(num);
        auto df = flatten_factors(den);
        bool changed = false;
        for (auto it = df.begin(); it != df.end();) {
            auto match = std::find(nf.begin(), nf.end(), *it);
            if (match != nf.end()) {
                nf.erase(match);
                it = df.erase(it);
                changed = true;
            } else {
                ++it;
            }
        }
        if (!changed) return Estimand::quotient(std::move(num), std::move(den));
        auto new_num = Estimand::product(std::move(nf));
        if (df.empty()) return new_num;
        return Estimand::quotient(std::move(new_num), Estimand::product(std::move(df)));
    }
    }
    return e;
}

}  // namespace

Estimand simplify(const Estimand& e) {
    Estimand current = e;
    while (true) {
        auto next = simplify_once(current);
        if (next == current) return current;
        current = std::move(next);
    }
}

// ---------------------------------------------------------------------------
// Rendering

namespace {

std::string render_assignment(const Assignment& a) {
    if (a.value.is_symbol() && a.value.text == default_symbol(a.var)) return a.value.text;
    return a.var + "=" + a.value.text;
}

std::string render_terms(const std::vector<Assignment>& terms) {
    std::vector<std::string> parts;
    for (const auto& a : terms) parts.push_back(render_assignment(a));
    return join(parts, ",");
}

std::string render_node(const Estimand& e);

std::string parens(const std::string& s) { return "(" + s + ")"; }

// True when the rendering ends in an unparenthesized sum body, which would
// swallow a following operator.
bool ends_open(const Estimand& e) {
    if (e.kind() == Estimand::Kind::Sum) return true;
    if (e.kind() == Estimand::Kind::Product) return e.factors().back().kind() == Estimand::Kind::Sum;
    return false;
}

std::string render_node(const Estimand& e) {
    using K = Estimand::Kind;
    switch (e.kind()) {
    case K::One:
        return "1";
    case K::Prob: {
        std::string out = "P(" + render_terms(e.joint());
        if (!e.given().empty()) out += "|" + render_terms(e.given());
        return out + ")";
    }
    case K::Sum: {
        std::vector<std::string> symbols{e.symbol()};
        const Estimand* body = &e.body();
        while (body->kind() == K::Sum) {
            symbols.push_back(body->symbol());
            body = &body->body();
        }
        return "sum_{" + join(symbols, ",") + "} " + render_node(*body);
    }
    case K::Product: {
        std::vector<std::string> parts;
        const auto& fs = e.factors();
        for (std::size_t i = 0; i < fs.size(); ++i) {
            auto s = render_node(fs[i]);
            bool wrap = fs[i].kind() == K::Product || (fs[i].kind() == K::Sum && i + 1 < fs.size()) ||
                        (fs[i].kind() == K::Quotient && i > 0);
            parts.push_back(wrap ? parens(s) : s);
        }
        return join(parts, " * ");
    }
    case K::Quotient: {
        auto num = render_node(e.numerator());
        auto den = render_node(e.denominator());
        if (ends_open(e.numerator())) num = parens(num);
        auto dk = e.denominator().kind();
        if (dk != K::Prob && dk != K::One) den = parens(den);
        return num + " / " + den;
    }
    }
    return {};
}

}  // namespace

std::string render(const Estimand& e) { return render_node(e); }

// ---------------------------------------------------------------------------
// Parsing

namespace {

class EstimandParser {
public:
    EstimandParser(std::string_view text, const std::vector<std::string>& known) : text_(text), known_(known) {}

    Estimand parse() {
        auto e = parse_expr();
        skip_ws();
        if (pos_ != text_.size()) fail("unexpected trailing input");
        return e;
    }

private:
    [[noreturn]] void fail(const std::string& what) const { throw ParseError(what, 1, pos_ + 1); }

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool accept(std::string_view s) {
        skip_ws();
        if (text_.substr(pos_).starts_with(s)) {
            pos_ += s.size();
            return true;
        }
        return false;
    }

    void expect(std::string_view s) {
        if (!accept(s)) fail("expected '" + std::string(s) + "'");
    }

    static bool word_char(char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'' || c == '.' || c == '-' ||
               c == '+';
    }

    std::string word() {
        skip_ws();
        std::size_t start = pos_;
        while (pos_ < text_.size() && word_char(text_[pos_])) ++pos_;
        if (start == pos_) fail("expected a name or value");
        return std::string(text_.substr(start, pos_ - start));
    }

    bool is_bound(const std::string& sym) const {
        return std::find(bound_.begin(), bound_.end(), sym) != bound_.end();
    }

    Estimand parse_expr() {
        Estimand acc = parse_factor();
        bool open_product = false;
        std::vector<Estimand> factors;
        while (true) {
            skip_ws();
            if (accept("*")) {
                auto f = parse_factor();
                if (!open_product) {
                    factors = {std::move(acc)};
                    open_product = true;
                }
                factors.push_back(std::move(f));
                acc = Estimand::product(factors);
            } else if (accept("/")) {
                auto f = parse_factor();
                acc = Estimand::quotient(std::move(acc), std::move(f));
                open_product = false;
                factors.clear();
            } else {
                return acc;
            }
        }
    }

    Estimand parse_factor() {
        skip_ws();
        if (accept("sum_{")) return parse_sum();
        if (accept("P(")) return parse_prob();
        if (accept("(")) {
            auto e = parse_expr();
            expect(")");
            return e;
        }
        if (pos_ < text_.size() && text_[pos_] == '1' &&
            (pos_ + 1 == text_.size() || !word_char(text_[pos_ + 1]))) {
            ++pos_;
            return Estimand::one();
        }
        fail("expected 'P(', 'sum_{' or '('");
    }

    Estimand parse_sum() {
        std::vector<std::pair<std::string, std::size_t>> symbols;
        do {
            auto at = (skip_ws(), pos_);
            auto s = word();
            if (!std::islower(static_cast<unsigned char>(s.front())))
                throw ParseError("bound symbol must start with a lowercase letter", 1, at + 1);
            if (is_bound(s)) throw ParseError("duplicate bound variable '" + s + "'", 1, at + 1);
            for (const auto& [prev, _] : symbols)
                if (prev == s) throw ParseError("duplicate bound variable '" + s + "'", 1, at + 1);
            symbols.emplace_back(s, at);
        } while (accept(","));
        expect("}");
        for (const auto& [s, _] : symbols) bound_.push_back(s);
        Estimand body = parse_expr();
        for (std::size_t i = 0; i < symbols.size(); ++i) bound_.pop_back();
        for (auto it = symbols.rbegin(); it != symbols.rend(); ++it) {
            auto var = variable_of(body, it->first);
            body = Estimand::sum(it->first, var ? *var : resolve_symbol(it->first, known_), std::move(body));
        }
        return body;
    }

    static std::optional<std::string> variable_of(const Estimand& e, const std::string& sym) {
        auto in = [&](const std::vector<Assignment>& terms) -> std::optional<std::string> {
            for (const auto& a : terms)
                if (a.value.is_symbol() && a.value.text == sym) return a.var;
            return std::nullopt;
        };
        switch (e.kind()) {
        case Estimand::Kind::Prob:
            if (auto v = in(e.joint())) return v;
            return in(e.given());
        case Estimand::Kind::Sum:
            return variable_of(e.body(), sym);
        case Estimand::Kind::Product:
        case Estimand::Kind::Quotient:
            for (const auto& c : e.factors())
                if (auto v = variable_of(c, sym)) return v;
            return std::nullopt;
        case Estimand::Kind::One:
            return std::nullopt;
        }
        return std::nullopt;
    }

    std::vector<Assignment> parse_terms() {
        std::vector<Assignment> out;
        do {
            auto at = (skip_ws(), pos_);
            auto name = word();
            if (accept("=")) {
                if (!is_identifier(name)) throw ParseError("invalid variable name '" + name + "'", 1, at + 1);
                auto value = word();
                out.push_back({name, is_bound(value) ? ValueRef::symbol(value) : ValueRef::literal(value)});
            } else {
                if (!std::islower(static_cast<unsigned char>(name.front())))
                    throw ParseError("expected a lowercase value symbol or VAR=VALUE", 1, at + 1);
                out.push_back({resolve_symbol(name, known_), ValueRef::symbol(name)});
            }
        } while (accept(","));
        return out;
    }

    Estimand parse_prob() {
        auto joint = parse_terms();
        std::vector<Assignment> given;
        if (accept("|")) given = parse_terms();
        expect(")");
        return Estimand::prob(std::move(joint), std::move(given));
    }

    std::string_view text_;
    const std::vector<std::string>& known_;
    std::size_t pos_ = 0;
    std::vector<std::string> bound_;
};

}  // namespace

Estimand parse_estimand(std::string_view text, const std::vector<std::string>& known_vars) {
    return EstimandParser(text, known_vars).parse();
}

}  // namespace causeway
