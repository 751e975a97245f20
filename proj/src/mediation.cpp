#include "causeway/mediation.hpp"

#include <cmath>

#include "causeway/errors.hpp"

namespace causeway {

namespace {

double score(const MediationSpec& spec, const std::vector<std::string>& domain, std::size_t index) {
    if (spec.coding.empty()) return static_cast<double>(index);
    auto it = spec.coding.find(domain[index]);
    if (it == spec.coding.end()) throw Error("no numeric coding for outcome value '" + domain[index] + "'");
    return it->second;
}

void finish(MediationReport& r) {
    if (std::abs(r.te) > 1e-9) r.mediated_fraction = r.nie / r.te;
}

}  // namespace

MediationReport mediation_effects(const DiscreteScm& m, const MediationSpec& spec) {
    const auto yi = m.endogenous_index(spec.outcome);
    const auto mi = m.endogenous_index(spec.mediator);
    m.endogenous_index(spec.exposure);
    const auto& ydom = m.domain(spec.outcome);
    const auto& mdom = m.domain(spec.mediator);

    const auto do_x0 = intervene(m, {{spec.exposure, spec.x0}});
    const auto do_x1 = intervene(m, {{spec.exposure, spec.x1}});
    std::vector<DiscreteScm> x1_with_m;
    std::vector<DiscreteScm> x0_with_m;
    for (const auto& mv : mdom) {
        x1_with_m.push_back(intervene(m, {{spec.exposure, spec.x1}, {spec.mediator, mv}}));
        x0_with_m.push_back(intervene(m, {{spec.exposure, spec.x0}, {spec.mediator, mv}}));
    }

    double y_x0 = 0, y_x1 = 0, y_x1_m0 = 0, y_x0_m1 = 0;
    m.for_each_exogenous_state([&](const std::vector<std::size_t>& u, double p) {
        const auto w0 = do_x0.solve(u);
        const auto w1 = do_x1.solve(u);
        y_x0 += p * score(spec, ydom, w0[yi]);
        y_x1 += p * score(spec, ydom, w1[yi]);
        y_x1_m0 += p * score(spec, ydom, x1_with_m[w0[mi]].solve(u)[yi]);
        y_x0_m1 += p * score(spec, ydom, x0_with_m[w1[mi]].solve(u)[yi]);
    });

    MediationReport r;
    r.source = MediationReport::Source::ScmExact;
    r.te = y_x1 - y_x0;
    r.nde = y_x1_m0 - y_x0;
    r.nie = y_x0_m1 - y_x0;
    r.nie_reversed = y_x1_m0 - y_x1;
    finish(r);
    return r;
}

MediationReport mediation_formula(const JointTable& joint, const MediationSpec& spec) {
    auto yv = joint.var_index(spec.outcome);
    auto mv = joint.var_index(spec.mediator);
    auto xv = joint.var_index(spec.exposure);
    if (!yv) throw UnknownVariable(spec.outcome);
    if (!mv) throw UnknownVariable(spec.mediator);
    if (!xv) throw UnknownVariable(spec.exposure);
    const auto& ydom = joint.domain(*yv);
    const auto& mdom = joint.domain(*mv);

    auto p = [&](std::map<std::string, std::string> event) { return joint.probability(event); };
    auto expect_y = [&](std::map<std::string, std::string> given) {
        double denom = p(given);
        if (denom == 0) {
            std::string what;
            for (const auto& [k, v] : given) what += (what.empty() ? "" : ",") + k + "=" + v;
            throw ConditioningOnZero("P(" + what + ")");
        }
        double total = 0;
        for (std::size_t i = 0; i < ydom.size(); ++i) {
            auto event = given;
            event[spec.outcome] = ydom[i];
            total += score(spec, ydom, i) * p(event) / denom;
        }
        return total;
    };
    auto m_given_x = [&](const std::string& m, const std::string& x) {
        double px = p({{spec.exposure, x}});
        if (px == 0) throw ConditioningOnZero("P(" + spec.exposure + "=" + x + ")");
        return p({{spec.exposure, x}, {spec.mediator, m}}) / px;
    };

    MediationReport r;
    r.source = MediationReport::Source::DataFormula;
    for (const auto& m : mdom) {
        const double pm0 = m_given_x(m, spec.x0);
        const double pm1 = m_given_x(m, spec.x1);
        const std::map<std::string, std::string> at_x0{{spec.exposure, spec.x0}, {spec.mediator, m}};
        const std::map<std::string, std::string> at_x1{{spec.exposure, spec.x1}, {spec.mediator, m}};
        if (pm0 > 0) r.nde += (expect_y(at_x1) - expect_y(at_x0)) * pm0;
        if (pm1 != pm0) {
            r.nie += expect_y(at_x0) * (pm1 - pm0);
            r.nie_reversed += expect_y(at_x1) * (pm0 - pm1);
        }
    }
    r.te = expect_y({{spec.exposure, spec.x1}}) - expect_y({{spec.exposure, spec.x0}});
    finish(r);
    return r;
}

void check_mediation_graph(const Admg& g, const MediationSpec& spec) {
    const NodeId x = g.id(spec.exposure);
    const NodeId m = g.id(spec.mediator);
    const NodeId y = g.id(spec.outcome);
    if (x == m || m == y || x == y) throw Error("exposure, mediator and outcome must be distinct");
    if (!g.siblings(m).empty())
        throw ConfoundedMediator("mediator '" + spec.mediator + "' has a latent confounder; effects are not estimable by the mediation formula");
    if (!g.siblings(x).empty() || !g.siblings(y).empty())
        throw ConfoundedMediator("exposure or outcome has a latent confounder; the mediation formula does not apply");
    const NodeSet xs = NodeSet::single(x);
    if (!g.parents(m).subset_of(xs)) throw ConfoundedMediator("mediator has parents other than the exposure");
    if (!g.parents(y).subset_of(xs | NodeSet::single(m))) throw ConfoundedMediator("outcome has parents other than exposure and mediator");
    if (g.parents(x).contains(m) || g.parents(x).contains(y)) throw Error("exposure must not depend on mediator or outcome");
}

MediationReport mediation_effects(const Dataset& d, const Admg& g, const MediationSpec& spec) {
    check_mediation_graph(g, spec);
    return mediation_formula(empirical_joint(d, {spec.exposure, spec.mediator, spec.outcome}), spec);
}

}  // namespace causeway
