#include "causeway/fitcheck.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include <boost/math/distributions/chi_squared.hpp>

#include "causeway/errors.hpp"

namespace causeway {

namespace {

struct Encoder {
    std::vector<std::size_t> cols;
    std::vector<std::size_t> radix;
    std::size_t size = 1;

    Encoder(const Dataset& d, const std::vector<std::string>& names) {
        for (const auto& n : names) {
            auto c = d.require_column(n);
            if (d.has_missing(c)) throw MissingDataPresent(n);
            cols.push_back(c);
            radix.push_back(d.domain(c).size());
            size *= radix.back();
        }
    }

    std::size_t code(const Dataset& d, std::size_t row) const {
        std::size_t out = 0;
        for (std::size_t i = 0; i < cols.size(); ++i) out = out * radix[i] + static_cast<std::size_t>(d.cell(row, cols[i]));
        return out;
    }
};

std::string format_number(double v, const char* fmt) {
    char buf[64];
    std::snprintf(buf, sizeof buf, fmt, v);
    return buf;
}

}  // namespace

GTestResult g_test(const Dataset& d, const std::vector<std::string>& left, const std::vector<std::string>& right,
                   const std::vector<std::string>& given) {
    const Encoder l(d, left);
    const Encoder r(d, right);
    const Encoder s(d, given);

    std::map<std::size_t, std::vector<double>> strata;
    for (std::size_t row = 0; row < d.num_rows(); ++row) {
        auto& table = strata[s.code(d, row)];
        if (table.empty()) table.assign(l.size * r.size, 0.0);
        table[l.code(d, row) * r.size + r.code(d, row)] += 1.0;
    }

    GTestResult out;
    for (const auto& [key, table] : strata) {
        double n = 0;
        for (double c : table) n += c;
        if (n < static_cast<double>(kMinStratumRows)) {
            ++out.pooled_strata;
            out.pooled_rows += static_cast<std::size_t>(n);
            continue;
        }
        std::vector<double> row_sum(l.size, 0.0);
        std::vector<double> col_sum(r.size, 0.0);
        for (std::size_t i = 0; i < l.size; ++i)
            for (std::size_t j = 0; j < r.size; ++j) {
                row_sum[i] += table[i * r.size + j];
                col_sum[j] += table[i * r.size + j];
            }
        for (std::size_t i = 0; i < l.size; ++i)
            for (std::size_t j = 0; j < r.size; ++j) {
                double o = table[i * r.size + j];
                if (o > 0) out.statistic += 2.0 * o * std::log(o * n / (row_sum[i] * col_sum[j]));
            }
        out.df += (l.size - 1) * (r.size - 1);
    }
    out.statistic = std::max(out.statistic, 0.0);
    if (out.df > 0 && out.statistic > 0) {
        boost::math::chi_squared_distribution<double> chi(static_cast<double>(out.df));
        out.p_value = boost::math::cdf(boost::math::complement(chi, out.statistic));
    } else {
        out.p_value = 1.0;
    }
    return out;
}

FitReport fit_indices(const Admg& g, const Dataset& d, const FitOptions& options) {
    if (!(options.alpha > 0 && options.alpha < 1)) throw Error("alpha must lie strictly between 0 and 1");
    for (const auto& n : g.names()) {
        auto c = d.column_index(n);
        if (!c) throw Error("data has no column for graph variable '" + n + "'");
        if (d.has_missing(*c)) throw MissingDataPresent(n);
    }
    FitReport report;
    report.alpha = options.alpha;
    report.bonferroni = options.bonferroni;
    const auto statements = testable_implications(g);
    for (const auto& st : statements) {
        auto t = g_test(d, st.left, st.right, st.given);
        FitEntry e{st, t.statistic, t.df, t.p_value, false, t.pooled_rows};
        if (options.bonferroni) e.p_value = std::min(1.0, e.p_value * static_cast<double>(statements.size()));
        e.rejected = e.p_value < options.alpha;
        if (t.pooled_strata > 0)
            report.warnings.push_back(st.to_string() + ": " + std::to_string(t.pooled_strata) + " strata with fewer than " +
                                      std::to_string(kMinStratumRows) + " rows (" + std::to_string(t.pooled_rows) +
                                      " rows) left out");
        if (t.df == 0) report.warnings.push_back(st.to_string() + ": no usable strata; test has 0 degrees of freedom");
        report.entries.push_back(std::move(e));
    }
    return report;
}

std::string render_report(const FitReport& r) {
    if (r.null()) return "NULL\n";
    std::vector<std::vector<std::string>> rows{{"statement", "G2", "df", "p", "verdict"}};
    for (const auto& e : r.entries) {
        rows.push_back({e.statement.to_string(), format_number(e.statistic, "%.4f"), std::to_string(e.df),
                        format_number(e.p_value, "%.4g"), e.rejected ? "reject" : "ok"});
    }
    std::vector<std::size_t> width(rows.front().size(), 0);
    for (const auto& row : rows)
        for (std::size_t i = 0; i < row.size(); ++i) width[i] = std::max(width[i], row[i].size());
    std::ostringstream out;
    for (const auto& row : rows) {
        std::string line;
        for (std::size_t i = 0; i < row.size(); ++i) {
            line += row[i];
            if (i + 1 < row.size()) line += std::string(width[i] - row[i].size() + 2, ' ');
        }
        out << line << '\n';
    }
    out << "alpha = " << format_number(r.alpha, "%g") << (r.bonferroni ? " (Bonferroni)" : "") << '\n';
    return out.str();
}

std::string render_report_lines(const FitReport& r) {
    if (r.null()) return "NULL\n";
    std::ostringstream out;
    for (const auto& e : r.entries)
        out << e.statement.to_string() << '\t' << format_number(e.statistic, "%.6f") << '\t' << e.df << '\t'
            << format_number(e.p_value, "%.6g") << '\n';
    return out.str();
}

}  // namespace causeway
