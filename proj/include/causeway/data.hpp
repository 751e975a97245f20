#pragma once

#include <cstddef>
#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "causeway/expr.hpp"

namespace causeway {

// Categorical sample table. Cells hold value indices into the column domain,
// or kMissing for `NA`.
class Dataset {
public:
    static constexpr std::int32_t kMissing = -1;

    Dataset() = default;
    Dataset(std::vector<std::string> columns, std::vector<std::vector<std::string>> domains,
            std::vector<std::int32_t> cells);

    const std::vector<std::string>& columns() const { return columns_; }
    const std::vector<std::string>& domain(std::size_t col) const { return domains_.at(col); }
    std::size_t num_columns() const { return columns_.size(); }
    std::size_t num_rows() const { return columns_.empty() ? 0 : cells_.size() / columns_.size(); }
    std::int32_t cell(std::size_t row, std::size_t col) const { return cells_[row * columns_.size() + col]; }
    bool missing(std::size_t row, std::size_t col) const { return cell(row, col) == kMissing; }
    std::optional<std::size_t> column_index(std::string_view name) const;
    std::size_t require_column(std::string_view name) const;
    bool has_missing(std::size_t col) const;
    bool has_missing() const;

    // Rows in the given order (repeats allowed); domains unchanged.
    Dataset select_rows(const std::vector<std::size_t>& rows) const;

private:
    std::vector<std::string> columns_;
    std::vector<std::vector<std::string>> domains_;
    std::vector<std::int32_t> cells_;
};

inline constexpr std::string_view kMissingToken = "NA";

// Comma-separated, header row first; domains are the sorted distinct
// non-missing tokens of each column.
Dataset load_table(std::istream& in);
Dataset load_table_file(const std::string& path);
void write_table(std::ostream& out, const Dataset& d);

// Relative frequencies over `columns` (all columns when empty).
JointTable empirical_joint(const Dataset& d, const std::vector<std::string>& columns = {});

}  // namespace causeway
