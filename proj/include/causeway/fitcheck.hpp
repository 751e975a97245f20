#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "causeway/data.hpp"
#include "causeway/graph.hpp"

namespace causeway {

// Strata with fewer rows than this are left out of the G statistic.
inline constexpr std::size_t kMinStratumRows = 5;

struct GTestResult {
    double statistic = 0;
    std::size_t df = 0;
    double p_value = 1;
    std::size_t pooled_strata = 0;  // strata excluded for having too few rows
    std::size_t pooled_rows = 0;
};

// Likelihood-ratio test of left _||_ right | given over categorical columns,
// stratified by the conditioning configuration.
GTestResult g_test(const Dataset& d, const std::vector<std::string>& left, const std::vector<std::string>& right,
                   const std::vector<std::string>& given);

struct FitEntry {
    CiStatement statement;
    double statistic = 0;
    std::size_t df = 0;
    double p_value = 1;
    bool rejected = false;
    std::size_t pooled_rows = 0;
};

struct FitOptions {
    double alpha = 0.05;
    bool bonferroni = false;
};

struct FitReport {
    std::vector<FitEntry> entries;
    double alpha = 0.05;
    bool bonferroni = false;
    std::vector<std::string> warnings;

    bool null() const { return entries.empty(); }
};

FitReport fit_indices(const Admg& g, const Dataset& d, const FitOptions& options = {});

// Aligned table, or `NULL` when the graph has no testable implications.
std::string render_report(const FitReport& r);
// `CI<TAB>statistic<TAB>df<TAB>p` per entry.
std::string render_report_lines(const FitReport& r);

}  // namespace causeway
