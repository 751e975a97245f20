#include "causeway/data.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>

#include "causeway/errors.hpp"
#include "causeway/values.hpp"

namespace causeway {

Dataset::Dataset(std::vector<std::string> columns, std::vector<std::vector<std::string>> domains,
                 std::vector<std::int32_t> cells)
    : columns_(std::move(columns)), domains_(std::move(domains)), cells_(std::move(cells)) {
    if (columns_.size() != domains_.size()) throw Error("dataset: one domain per column required");
    if (columns_.empty()) throw Error("dataset: no columns");
    if (cells_.size() % columns_.size() != 0) throw Error("dataset: cell count is not a multiple of the column count");
    if (cells_.empty()) throw Error("dataset: no rows");
    for (std::size_t i = 0; i < cells_.size(); ++i) {
        auto v = cells_[i];
        if (v != kMissing && (v < 0 || static_cast<std::size_t>(v) >= domains_[i % columns_.size()].size()))
            throw Error("dataset: cell value outside its column domain");
    }
}

std::optional<std::size_t> Dataset::column_index(std::string_view name) const {
    for (std::size_t i = 0; i < columns_.size(); ++i)
        if (columns_[i] == name) return i;
    return std::nullopt;
}

std::size_t Dataset::require_column(std::string_view name) const {
    if (auto c = column_index(name)) return *c;
    throw UnknownVariable(std::string(name));
}

bool Dataset::has_missing(std::size_t col) const {
    for (std::size_t r = 0; r < num_rows(); ++r)
        if (missing(r, col)) return true;
    return false;
}

bool Dataset::has_missing() const { return std::find(cells_.begin(), cells_.end(), kMissing) != cells_.end(); }

Dataset Dataset::select_rows(const std::vector<std::size_t>& rows) const {
    std::vector<std::int32_t> cells;
    cells.reserve(rows.size() * columns_.size());
    for (auto r : rows)
        for (std::size_t c = 0; c < columns_.size(); ++c) cells.push_back(cell(r, c));
    return Dataset(columns_, domains_, std::move(cells));
}

namespace {

std::vector<std::string> split_csv_line(std::string_view line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        auto comma = line.find(',', start);
        out.emplace_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

}  // namespace

Dataset load_table(std::istream& in) {
    std::string line;
    std::vector<std::string> header;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!trim(line).empty()) {
            header = split_csv_line(line);
            break;
        }
    }
    if (header.empty()) throw Error("data file is empty");
    {
        std::set<std::string> seen;
        for (const auto& h : header) {
            if (!is_identifier(h)) throw ParseError("invalid column name '" + h + "'", line_no, 1);
            if (!seen.insert(h).second) throw ParseError("duplicate header name '" + h + "'", line_no, 1);
        }
    }

    std::vector<std::vector<std::string>> tokens;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        auto row = split_csv_line(line);
        if (row.size() != header.size())
            throw ParseError("row " + std::to_string(line_no) + " has " + std::to_string(row.size()) +
                                 " fields, expected " + std::to_string(header.size()),
                             line_no, 1);
        tokens.push_back(std::move(row));
    }
    if (tokens.empty()) throw Error("data file has a header but no rows");

    std::vector<std::vector<std::string>> domains(header.size());
    for (const auto& row : tokens)
        for (std::size_t c = 0; c < row.size(); ++c)
            if (row[c] != kMissingToken) domains[c].push_back(row[c]);
    std::vector<std::map<std::string, std::int32_t>> lookup(header.size());
    for (std::size_t c = 0; c < header.size(); ++c) {
        sort_values(domains[c]);
        if (domains[c].empty()) domains[c].push_back(std::string(kMissingToken) + "_only");
        for (std::size_t i = 0; i < domains[c].size(); ++i) lookup[c][domains[c][i]] = static_cast<std::int32_t>(i);
    }
    std::vector<std::int32_t> cells;
    cells.reserve(tokens.size() * header.size());
    for (const auto& row : tokens)
        for (std::size_t c = 0; c < row.size(); ++c)
            cells.push_back(row[c] == kMissingToken ? Dataset::kMissing : lookup[c].at(row[c]));
    return Dataset(std::move(header), std::move(domains), std::move(cells));
}

Dataset load_table_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open data file '" + path + "'");
    return load_table(in);
}

void write_table(std::ostream& out, const Dataset& d) {
    out << join(d.columns(), ",") << '\n';
    for (std::size_t r = 0; r < d.num_rows(); ++r) {
        for (std::size_t c = 0; c < d.num_columns(); ++c) {
            if (c) out << ',';
            out << (d.missing(r, c) ? std::string(kMissingToken) : d.domain(c)[d.cell(r, c)]);
        }
        out << '\n';
    }
}

JointTable empirical_joint(const Dataset& d, const std::vector<std::string>& columns) {
    std::vector<std::string> cols = columns.empty() ? d.columns() : columns;
    std::vector<std::size_t> idx;
    std::vector<std::vector<std::string>> domains;
    for (const auto& c : cols) {
        idx.push_back(d.require_column(c));
        if (d.has_missing(idx.back())) throw MissingDataPresent(c);
        domains.push_back(d.domain(idx.back()));
    }
    std::vector<std::size_t> strides(idx.size(), 1);
    std::size_t cells = 1;
    for (std::size_t i = idx.size(); i-- > 0;) {
        strides[i] = cells;
        cells *= domains[i].size();
    }
    std::vector<double> counts(cells, 0.0);
    for (std::size_t r = 0; r < d.num_rows(); ++r) {
        std::size_t o = 0;
        for (std::size_t i = 0; i < idx.size(); ++i) o += static_cast<std::size_t>(d.cell(r, idx[i])) * strides[i];
        counts[o] += 1.0;
    }
    const double n = static_cast<double>(d.num_rows());
    for (auto& c : counts) c /= n;
    return JointTable(std::move(cols), std::move(domains), std::move(counts));
}

}  // namespace causeway
