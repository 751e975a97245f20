#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace causeway {

// The value side of an assignment inside a probability term: either a symbol
// (bound by a sum or free, e.g. `z`, `x2`) or a literal domain value (`1`).
struct ValueRef {
    enum class Kind { Symbol, Literal };

    Kind kind = Kind::Symbol;
    std::string text;

    static ValueRef symbol(std::string s) { return {Kind::Symbol, std::move(s)}; }
    static ValueRef literal(std::string s) { return {Kind::Literal, std::move(s)}; }
    bool is_symbol() const { return kind == Kind::Symbol; }
    bool operator==(const ValueRef&) const = default;
};

struct Assignment {
    std::string var;
    ValueRef value;

    bool operator==(const Assignment&) const = default;
};

// Lowercase of the variable name; `y` stands for a value of `Y`.
std::string default_symbol(std::string_view var);

// Maps a value symbol back to its variable: exact lowercase match against
// `known`, then with trailing digits/primes stripped, else the uppercased symbol.
std::string resolve_symbol(std::string_view symbol, const std::vector<std::string>& known = {});

// Symbolic probability expression. Immutable value type.
class Estimand {
public:
    enum class Kind { Prob, Sum, Product, Quotient, One };

    Estimand() = default;  // One

    static Estimand prob(std::vector<Assignment> joint, std::vector<Assignment> given = {});
    static Estimand sum(std::string symbol, std::string var, Estimand body);
    // Zero factors give One, a single factor is returned as is.
    static Estimand product(std::vector<Estimand> factors);
    static Estimand quotient(Estimand numerator, Estimand denominator);
    static Estimand one() { return {}; }

    Kind kind() const { return kind_; }
    const std::vector<Assignment>& joint() const { return joint_; }
    const std::vector<Assignment>& given() const { return given_; }
    const std::string& symbol() const { return symbol_; }
    const std::string& bound_var() const { return var_; }
    const Estimand& body() const { return children_.at(0); }
    const std::vector<Estimand>& factors() const { return children_; }
    const Estimand& numerator() const { return children_.at(0); }
    const Estimand& denominator() const { return children_.at(1); }

    bool operator==(const Estimand&) const = default;

private:
    Kind kind_ = Kind::One;
    std::vector<Assignment> joint_;
    std::vector<Assignment> given_;
    std::string symbol_;
    std::string var_;
    std::vector<Estimand> children_;
};

// Exact distribution over full assignments of finite-domain variables.
// Cells are laid out row-major with the first variable slowest.
class JointTable {
public:
    JointTable() = default;
    JointTable(std::vector<std::string> variables, std::vector<std::vector<std::string>> domains,
               std::vector<double> mass);

    const std::vector<std::string>& variables() const { return variables_; }
    const std::vector<std::string>& domain(std::size_t var) const { return domains_.at(var); }
    const std::vector<std::vector<std::string>>& domains() const { return domains_; }
    std::optional<std::size_t> var_index(std::string_view name) const;
    std::optional<std::size_t> value_index(std::size_t var, std::string_view value) const;

    std::size_t cells() const { return mass_.size(); }
    double mass(std::size_t cell) const { return mass_[cell]; }
    const std::vector<double>& masses() const { return mass_; }
    std::size_t value_at(std::size_t cell, std::size_t var) const { return (cell / strides_[var]) % domains_[var].size(); }

    // Probability of a partial assignment given as (variable, value) index pairs.
    double probability(const std::vector<std::pair<std::size_t, std::size_t>>& fixed) const;
    double probability(const std::map<std::string, std::string>& event) const;

    JointTable marginal(const std::vector<std::string>& keep) const;

private:
    std::vector<std::string> variables_;
    std::vector<std::vector<std::string>> domains_;
    std::vector<std::size_t> strides_;
    std::vector<double> mass_;
};

using Binding = std::map<std::string, std::string>;

double eval_estimand(const Estimand& e, const JointTable& table, const Binding& binding = {});

Estimand simplify(const Estimand& e);

std::string render(const Estimand& e);
Estimand parse_estimand(std::string_view text, const std::vector<std::string>& known_vars = {});

// Symbols not bound by an enclosing sum, mapped to their variable.
std::map<std::string, std::string> free_symbols(const Estimand& e);

}  // namespace causeway
