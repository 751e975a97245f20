#pragma once

#include <map>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "causeway/data.hpp"
#include "causeway/estimate.hpp"
#include "causeway/expr.hpp"
#include "causeway/graph.hpp"

namespace causeway {

inline constexpr std::string_view kObserved = "obs";
inline constexpr std::string_view kMissing = "miss";

// `R_Y` for a partially observed `Y`.
std::string indicator_name(std::string_view var);

// Causal graph over substantive variables plus one binary missingness
// indicator per partially observed variable. Indicators may have parents
// anywhere but are never parents of substantive variables.
class MGraph {
public:
    MGraph() = default;
    MGraph(Admg combined, std::vector<std::string> partially_observed);

    const Admg& graph() const { return graph_; }
    Admg base() const;
    const std::vector<std::string>& substantive() const { return substantive_; }
    const std::vector<std::string>& partially_observed() const { return partial_; }
    bool is_partially_observed(std::string_view var) const;
    bool is_substantive(std::string_view var) const;

private:
    Admg graph_;
    std::vector<std::string> substantive_;
    std::vector<std::string> partial_;
};

// Graph format plus `missing Y` lines, which declare the node R_Y.
MGraph parse_mgraph(std::string_view text);
std::string serialize_mgraph(const MGraph& mg);

struct Recoverable {
    enum class Criterion { FullyObserved, Mcar, Mar, OrderedFactorization };
    Estimand estimand;
    Criterion criterion;
};

struct Unrecoverable {
    std::string reason;
};

using RecoverResult = std::variant<Recoverable, Unrecoverable>;

std::string criterion_name(Recoverable::Criterion c);

// Tries, in order: all target variables fully observed; MCAR; a fully observed
// stratification set (smallest, then lexicographic); an ordered factorization.
// Unrecoverable means none of these applies, not that recovery is impossible.
RecoverResult recoverability(const MGraph& mg, const std::vector<std::string>& target);

// Joint over the given substantive columns with `NA` as an extra value of
// partially observed ones, plus their R_v columns valued obs/miss.
JointTable augmented_joint(const MGraph& mg, const Dataset& d, const std::vector<std::string>& columns);

// Evaluates the recovery estimand for P(target = binding). Throws
// NotRecoverable when no criterion applies.
Estimate recover_estimate(const MGraph& mg, const Dataset& d, const std::vector<std::string>& target,
                          const Binding& binding);

}  // namespace causeway
