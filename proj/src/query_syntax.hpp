#pragma once

// Surface syntax shared by causal and counterfactual queries:
//   P(items | items), item := do(items) | NAME [_SUB | _{items}] [= VALUE]

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace causeway::detail {

struct QueryItem {
    std::string name;
    std::optional<std::string> value;
    std::vector<QueryItem> subscript;
    bool is_do = false;
    std::vector<QueryItem> do_items;
    std::size_t column = 0;
};

struct QuerySyntax {
    std::vector<QueryItem> outcome;
    std::vector<QueryItem> given;
};

QuerySyntax parse_query_syntax(std::string_view text, const std::vector<std::string>& known);

}  // namespace causeway::detail
