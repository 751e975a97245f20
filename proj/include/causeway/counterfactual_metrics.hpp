#pragma once

#include <optional>
#include <string>

#include "causeway/expr.hpp"
#include "causeway/scm.hpp"

namespace causeway {

// Which values play "treated" and "responded". Defaults: x=1, y=1.
struct Polarity {
    std::string x_true = "1";
    std::string x_false = "0";
    std::string y_true = "1";
    std::string y_false = "0";
};

struct Bounds {
    double low;
    double high;
};

// Exact mode fills the point values; bounds mode fills the ranges. A missing
// value means the quantity is undefined (zero-probability evidence).
struct PnPsResult {
    std::optional<double> pn, ps, pns;
    std::optional<Bounds> pn_bounds, ps_bounds, pns_bounds;
    std::string pn_error, ps_error;
};

// PN = P(Y_{x'}=y' | x, y), PS = P(Y_x=y | x', y'), PNS = P(Y_x=y, Y_{x'}=y').
PnPsResult pn_ps_exact(const DiscreteScm& m, const std::string& x, const std::string& y, const Polarity& pol = {});

// Bounds from the observational joint over {x, y} and the experimental
// quantities px1 = P(y | do(x)), px0 = P(y | do(x')).
PnPsResult pnps_bounds(const JointTable& obs, const std::string& x, const std::string& y, double px1, double px0,
                       const Polarity& pol = {});

}  // namespace causeway
