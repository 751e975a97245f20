#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace causeway {

// Ordering for categorical value tokens: numeric tokens compare by value and
// sort before non-numeric ones, which compare as strings. Keeps "2" < "10".
bool value_less(std::string_view a, std::string_view b);

void sort_values(std::vector<std::string>& values);

bool is_identifier(std::string_view s);

std::string to_lower(std::string_view s);
std::string to_upper(std::string_view s);

std::string_view trim(std::string_view s);

std::string join(const std::vector<std::string>& parts, std::string_view sep);

}  // namespace causeway
