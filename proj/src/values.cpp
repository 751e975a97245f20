#include "causeway/values.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <optional>

namespace causeway {

namespace {

std::optional<double> as_number(std::string_view s) {
    if (s.empty()) return std::nullopt;
    double v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

}  // namespace

bool value_less(std::string_view a, std::string_view b) {
    auto na = as_number(a);
    auto nb = as_number(b);
    if (na && nb) {
        if (*na != *nb) return *na < *nb;
        return a < b;
    }
    if (na.has_value() != nb.has_value()) return na.has_value();
    return a < b;
}

void sort_values(std::vector<std::string>& values) {
    std::sort(values.begin(), values.end(), [](const std::string& a, const std::string& b) { return value_less(a, b); });
    values.erase(std::unique(values.begin(), values.end()), values.end());
}

bool is_identifier(std::string_view s) {
    if (s.empty()) return false;
    auto head = static_cast<unsigned char>(s.front());
    if (!(std::isalpha(head) || head == '_')) return false;
    return std::all_of(s.begin() + 1, s.end(), [](char c) {
        auto u = static_cast<unsigned char>(c);
        return std::isalnum(u) || c == '_';
    });
}

std::string to_lower(std::string_view s) {
    std::string out(s);
    for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

std::string to_upper(std::string_view s) {
    std::string out(s);
    for (auto& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return out;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out += sep;
        out += parts[i];
    }
    return out;
}

}  // namespace causeway
