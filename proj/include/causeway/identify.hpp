#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "causeway/expr.hpp"
#include "causeway/graph.hpp"

namespace causeway {

// A query from one of the three layers: P(y|x), P(y|do(x),z), P(y_x|x',y').
struct CausalQuery {
    std::vector<Assignment> outcome;
    std::vector<Assignment> intervention;  // do(...)
    std::vector<Assignment> condition;     // plain conditioning, or factual evidence in layer 3
    std::vector<Assignment> antecedent;    // subscript of counterfactual outcomes; nonempty means layer 3
};

CausalQuery parse_query(std::string_view text, const std::vector<std::string>& known = {});
std::string render_query(const CausalQuery& q);

// 1 association, 2 intervention, 3 counterfactual.
int query_layer(const CausalQuery& q);

// Two nested c-forests: `forest` is a single c-component, `subforest` the
// c-component of the intervened-out graph it contains.
struct Hedge {
    std::vector<std::string> forest;
    std::vector<std::string> subforest;

    std::string to_string() const;
};

struct Identified {
    Estimand estimand;
};

struct NonIdentifiable {
    Hedge witness;
};

using IdentifyResult = std::variant<Identified, NonIdentifiable>;

// Minimal back-door admissible sets of size <= max_size, by size then name.
std::vector<std::vector<std::string>> backdoor_sets(const Admg& g, const std::string& x, const std::string& y,
                                                    std::size_t max_size);

// sum_{z} P(y|x,z) * P(z) with default value symbols.
Estimand adjustment_estimand(const std::string& x, const std::string& y, const std::vector<std::string>& z);

// Identification of layer-1/2 queries against the observational distribution.
// Throws on layer-3 or malformed queries.
IdentifyResult identify(const Admg& g, const CausalQuery& q);

}  // namespace causeway
