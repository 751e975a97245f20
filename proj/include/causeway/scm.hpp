#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "causeway/data.hpp"
#include "causeway/expr.hpp"
#include "causeway/graph.hpp"

namespace causeway {

inline constexpr std::size_t kDefaultStateCap = 10'000'000;

struct ExogenousVar {
    std::string name;
    std::vector<std::string> domain;
    std::vector<double> probs;
};

struct EndogenousVar {
    std::string name;
    std::vector<std::string> parents;                           // exogenous or endogenous
    std::map<std::vector<std::string>, std::string> table;      // parent values -> value
    std::vector<std::string> domain;                            // optional; widened by table use
};

using Intervention = std::map<std::string, std::string>;
using Event = std::map<std::string, std::string>;

struct CounterfactualQuery {
    Event target;             // outcome values in the counterfactual world
    Intervention antecedent;  // the x in y_x
    Event evidence;           // factual observations
};

// Discrete structural causal model: independent exogenous variables and
// deterministic endogenous function tables over finite domains.
class DiscreteScm {
public:
    DiscreteScm(std::vector<ExogenousVar> exogenous, std::vector<EndogenousVar> endogenous,
                std::size_t state_cap = kDefaultStateCap);

    const std::vector<ExogenousVar>& exogenous() const { return exo_; }
    const std::vector<EndogenousVar>& endogenous() const { return endo_; }
    std::vector<std::string> endogenous_names() const;
    std::size_t state_cap() const { return state_cap_; }

    bool is_endogenous(std::string_view name) const;
    std::size_t endogenous_index(std::string_view name) const;
    const std::vector<std::string>& domain(std::string_view name) const;
    std::size_t value_index(std::size_t endo, std::string_view value) const;

    std::size_t exogenous_state_count() const { return exo_states_; }

    // Calls visit(exogenous value indices, probability) for every exogenous
    // state with positive probability.
    void for_each_exogenous_state(const std::function<void(const std::vector<std::size_t>&, double)>& visit) const;

    // Endogenous value indices (declaration order) for one exogenous state.
    // `forced[i] >= 0` overrides endogenous i with that value index.
    std::vector<std::size_t> solve(const std::vector<std::size_t>& exo_state, const std::vector<int>& forced = {}) const;

private:
    struct ParentRef {
        bool exogenous;
        std::size_t index;
    };
    struct Compiled {
        std::vector<ParentRef> parents;
        std::vector<std::size_t> strides;
        std::vector<std::size_t> table;  // flat, output value indices
    };

    std::vector<ExogenousVar> exo_;
    std::vector<EndogenousVar> endo_;
    std::vector<Compiled> compiled_;
    std::vector<std::size_t> topo_;
    std::size_t exo_states_ = 1;
    std::size_t state_cap_;
};

JointTable observational_joint(const DiscreteScm& m);
DiscreteScm intervene(const DiscreteScm& m, const Intervention& assignment);
double counterfactual_query(const DiscreteScm& m, const CounterfactualQuery& q);
Dataset sample(const DiscreteScm& m, std::size_t n, std::uint64_t seed);
Admg latent_projection(const DiscreteScm& m);

DiscreteScm parse_scm(std::string_view text, std::size_t state_cap = kDefaultStateCap);
std::string serialize_scm(const DiscreteScm& m);

// `P(Y_{X=1}=1 | X=0, Y=0)`; every outcome must carry the same subscript.
CounterfactualQuery parse_counterfactual(std::string_view text, const std::vector<std::string>& known = {});

}  // namespace causeway
