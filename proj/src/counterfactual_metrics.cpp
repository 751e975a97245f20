#include "causeway/counterfactual_metrics.hpp"

#include <algorithm>
#include <cmath>

#include "causeway/errors.hpp"

namespace causeway {

PnPsResult pn_ps_exact(const DiscreteScm& m, const std::string& x, const std::string& y, const Polarity& pol) {
    for (const auto& v : {x, y})
        if (m.domain(v).size() != 2) throw Error("'" + v + "' must be binary");
    PnPsResult r;
    try {
        r.pn = counterfactual_query(m, {{{y, pol.y_false}}, {{x, pol.x_false}}, {{x, pol.x_true}, {y, pol.y_true}}});
    } catch (const ZeroEvidence& e) {
        r.pn_error = e.what();
    }
    try {
        r.ps = counterfactual_query(m, {{{y, pol.y_true}}, {{x, pol.x_true}}, {{x, pol.x_false}, {y, pol.y_false}}});
    } catch (const ZeroEvidence& e) {
        r.ps_error = e.what();
    }

    // PNS needs both potential outcomes of the same unit.
    const auto treated = intervene(m, {{x, pol.x_true}});
    const auto control = intervene(m, {{x, pol.x_false}});
    const auto yi = m.endogenous_index(y);
    const auto y_true = m.value_index(yi, pol.y_true);
    const auto y_false = m.value_index(yi, pol.y_false);
    double pns = 0;
    m.for_each_exogenous_state([&](const std::vector<std::size_t>& u, double p) {
        if (treated.solve(u)[yi] == y_true && control.solve(u)[yi] == y_false) pns += p;
    });
    r.pns = pns;
    return r;
}

PnPsResult pnps_bounds(const JointTable& obs, const std::string& x, const std::string& y, double px1, double px0,
                       const Polarity& pol) {
    for (double* p : {&px1, &px0}) {
        if (!(*p >= -1e-9 && *p <= 1 + 1e-9)) throw Error("experimental probabilities must lie in [0, 1]");
        *p = std::clamp(*p, 0.0, 1.0);
    }
    auto cell = [&](const std::string& xv, const std::string& yv) { return obs.probability({{x, xv}, {y, yv}}); };
    const double pxy = cell(pol.x_true, pol.y_true);
    const double pxy_ = cell(pol.x_true, pol.y_false);
    const double px_y = cell(pol.x_false, pol.y_true);
    const double px_y_ = cell(pol.x_false, pol.y_false);
    const double py = pxy + px_y;

    // Experimental and observational data must agree: P(x,y) <= P(y_x) <= 1 - P(x,y').
    constexpr double tol = 1e-12;
    if (px1 < pxy - tol || px1 > 1 - pxy_ + tol || px0 < px_y - tol || px0 > 1 - px_y_ + tol)
        throw Error("experimental inputs are incompatible with the observational distribution");

    PnPsResult r;
    r.pns_bounds = Bounds{std::max({0.0, px1 - px0, py - px0, px1 - py}),
                          std::min({px1, 1 - px0, pxy + px_y_, px1 - px0 + pxy_ + px_y})};
    if (pxy > 0) {
        r.pn_bounds = Bounds{std::max(0.0, (py - px0) / pxy), std::min(1.0, (1 - px0 - px_y_) / pxy)};
    } else {
        r.pn_error = "PN is undefined: P(x,y) = 0";
    }
    if (px_y_ > 0) {
        r.ps_bounds = Bounds{std::max(0.0, (px1 - py) / px_y_), std::min(1.0, (px1 - pxy) / px_y_)};
    } else {
        r.ps_error = "PS is undefined: P(x',y') = 0";
    }
    return r;
}

}  // namespace causeway
