#pragma once

#include <map>
#include <optional>
#include <string>

#include "causeway/data.hpp"
#include "causeway/graph.hpp"
#include "causeway/scm.hpp"

namespace causeway {

struct MediationSpec {
    std::string exposure;
    std::string mediator;
    std::string outcome;
    std::string x0 = "0";
    std::string x1 = "1";
    // Numeric score per outcome value; empty means the value's domain index.
    std::map<std::string, double> coding;
};

struct MediationReport {
    enum class Source { DataFormula, ScmExact };

    double te = 0;
    double nde = 0;
    double nie = 0;
    double nie_reversed = 0;
    std::optional<double> mediated_fraction;  // nie / te, unset when |te| <= 1e-9
    Source source = Source::ScmExact;
};

// Exact nested counterfactuals: NDE = E[Y_{x1,M_{x0}}] - E[Y_{x0}],
// NIE = E[Y_{x0,M_{x1}}] - E[Y_{x0}], NIE_reversed = E[Y_{x1,M_{x0}}] - E[Y_{x1}].
MediationReport mediation_effects(const DiscreteScm& m, const MediationSpec& spec);

// Mediation formula on a joint over exposure, mediator and outcome.
MediationReport mediation_formula(const JointTable& joint, const MediationSpec& spec);

// Data mode: the graph must be the unconfounded mediation triangle.
MediationReport mediation_effects(const Dataset& d, const Admg& g, const MediationSpec& spec);

void check_mediation_graph(const Admg& g, const MediationSpec& spec);

}  // namespace causeway
