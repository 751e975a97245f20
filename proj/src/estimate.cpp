#include "causeway/estimate.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "causeway/errors.hpp"

namespace causeway {

namespace {

__extension__ using u128 = unsigned __int128;

void collect_variables(const Estimand& e, std::vector<std::string>& out) {
    auto add = [&](const std::string& v) {
        if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
    };
    switch (e.kind()) {
    case Estimand::Kind::Prob:
        for (const auto& a : e.joint()) add(a.var);
        for (const auto& a : e.given()) add(a.var);
        break;
    case Estimand::Kind::Sum:
        add(e.bound_var());
        collect_variables(e.body(), out);
        break;
    case Estimand::Kind::Product:
    case Estimand::Kind::Quotient:
        for (const auto& c : e.factors()) collect_variables(c, out);
        break;
    case Estimand::Kind::One:
        break;
    }
}

// Percentile with linear interpolation between order statistics.
double quantile(const std::vector<double>& sorted, double q) {
    double pos = q * static_cast<double>(sorted.size() - 1);
    auto lo = static_cast<std::size_t>(std::floor(pos));
    auto hi = std::min(lo + 1, sorted.size() - 1);
    double frac = pos - static_cast<double>(lo);
    return sorted[lo] + (sorted[hi] - sorted[lo]) * frac;
}

}  // namespace

std::vector<std::string> estimand_variables(const Estimand& e) {
    std::vector<std::string> out;
    collect_variables(e, out);
    return out;
}

Estimate plug_in(const Estimand& e, const Dataset& d, const Binding& binding) {
    auto vars = estimand_variables(e);
    auto joint = empirical_joint(d, vars.empty() ? std::vector<std::string>{d.columns().front()} : vars);
    return Estimate{eval_estimand(e, joint, binding), d.num_rows(), std::nullopt, 0};
}

Estimate bootstrap_interval(const Estimand& e, const Dataset& d, const Binding& binding, const BootstrapOptions& options) {
    if (options.replicates < 100) throw Error("bootstrap needs at least 100 replicates");
    if (!(options.level > 0 && options.level < 1)) throw Error("confidence level must lie strictly between 0 and 1");

    Estimate point = plug_in(e, d, binding);
    const std::size_t n = d.num_rows();
    std::vector<double> values;
    values.reserve(options.replicates);
    std::size_t dropped = 0;
    std::vector<std::size_t> rows(n);
    for (std::size_t b = 0; b < options.replicates; ++b) {
        std::seed_seq seq{static_cast<std::uint32_t>(options.seed), static_cast<std::uint32_t>(options.seed >> 32),
                          static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
        std::mt19937_64 rng(seq);
        for (auto& r : rows) r = static_cast<std::size_t>((static_cast<u128>(rng()) * n) >> 64);
        try {
            values.push_back(plug_in(e, d.select_rows(rows), binding).value);
        } catch (const ConditioningOnZero&) {
            ++dropped;
        }
    }
    if (static_cast<double>(dropped) > 0.10 * static_cast<double>(options.replicates))
        throw TooManyDegenerateResamples(std::to_string(dropped) + " of " + std::to_string(options.replicates) +
                                         " resamples hit an empty conditioning stratum");
    std::sort(values.begin(), values.end());
    const double alpha = 1.0 - options.level;
    Interval iv{quantile(values, alpha / 2), quantile(values, 1 - alpha / 2), options.level};
    // The interval must bracket the point estimate.
    iv.low = std::min(iv.low, point.value);
    iv.high = std::max(iv.high, point.value);
    point.interval = iv;
    point.dropped_resamples = dropped;
    return point;
}

}  // namespace causeway
