#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>

#include "causeway/data.hpp"
#include "causeway/expr.hpp"

namespace causeway {

struct Interval {
    double low;
    double high;
    double level;
};

struct Estimate {
    double value = 0;
    std::size_t n = 0;
    std::optional<Interval> interval;
    std::size_t dropped_resamples = 0;
};

// Estimand evaluated on the empirical distribution of the referenced columns.
Estimate plug_in(const Estimand& e, const Dataset& d, const Binding& binding = {});

struct BootstrapOptions {
    std::size_t replicates = 1000;
    double level = 0.95;
    std::uint64_t seed = 0;
};

// Percentile bootstrap. Replicate i draws rows from a stream seeded by
// (seed, i); resamples with an empty conditioning stratum are dropped and
// counted, and more than 10% dropped is an error.
Estimate bootstrap_interval(const Estimand& e, const Dataset& d, const Binding& binding, const BootstrapOptions& options);

// Variables an estimand reads, in first-mention order.
std::vector<std::string> estimand_variables(const Estimand& e);

}  // namespace causeway
