#include "line_format.hpp"

#include <cctype>

namespace causeway::detail {

namespace {

bool is_punct(char c) { return c == '{' || c == '}' || c == '(' || c == ')' || c == ',' || c == ':'; }

std::size_t arrow_length(std::string_view rest) {
    if (rest.starts_with("<->")) return 3;
    if (rest.starts_with("->") || rest.starts_with("--")) return 2;
    return 0;
}

}  // namespace

std::vector<Line> tokenize_lines(std::string_view text) {
    std::vector<Line> lines;
    std::size_t number = 0;
    while (!text.empty() || number == 0) {
        ++number;
        auto nl = text.find('\n');
        std::string_view raw = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        if (auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);

        Line line{number, {}};
        std::size_t i = 0;
        while (i < raw.size()) {
            char c = raw[i];
            if (std::isspace(static_cast<unsigned char>(c))) {
                ++i;
                continue;
            }
            if (auto n = arrow_length(raw.substr(i)); n > 0) {
                line.tokens.push_back({std::string(raw.substr(i, n)), i + 1});
                i += n;
                continue;
            }
            if (is_punct(c)) {
                line.tokens.push_back({std::string(1, c), i + 1});
                ++i;
                continue;
            }
            std::size_t start = i;
            while (i < raw.size() && !std::isspace(static_cast<unsigned char>(raw[i])) && !is_punct(raw[i]) &&
                   arrow_length(raw.substr(i)) == 0) {
                ++i;
            }
            line.tokens.push_back({std::string(raw.substr(start, i - start)), start + 1});
        }
        if (!line.tokens.empty()) lines.push_back(std::move(line));
        if (nl == std::string_view::npos) break;
    }
    return lines;
}

}  // namespace causeway::detail
