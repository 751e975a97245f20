#pragma once

// Tokenizer shared by the line-based model formats (graph, m-graph, SCM, CPDAG).

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "causeway/errors.hpp"

namespace causeway::detail {

struct Token {
    std::string text;
    std::size_t column;  // 1-based
};

struct Line {
    std::size_t number;  // 1-based
    std::vector<Token> tokens;

    [[noreturn]] void fail(const std::string& what, std::size_t token_index) const {
        std::size_t col = token_index < tokens.size() ? tokens[token_index].column
                                                      : (tokens.empty() ? 1 : tokens.back().column + tokens.back().text.size());
        throw ParseError(what, number, col);
    }
};

// Splits into non-empty lines with `#` comments stripped. Arrows (`->`, `<->`,
// `--`) and the characters `{}(),:` are standalone tokens.
std::vector<Line> tokenize_lines(std::string_view text);

}  // namespace causeway::detail
