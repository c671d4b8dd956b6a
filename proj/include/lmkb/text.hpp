#pragma once

#include <string>
#include <string_view>

namespace lmkb::text {

std::string trim(std::string_view s);
std::string to_lower(std::string_view s);

// Collapses every internal whitespace run to a single space.
std::string collapse_whitespace(std::string_view s);

// Removes leading and trailing runs of single/double quote characters.
std::string strip_surrounding_quotes(std::string_view s);

// Canonical form shared by parsed answers, gold aliases and alias-index
// entries: trim, strip surrounding quotes, lowercase, collapse whitespace.
std::string normalize_value(std::string_view s);

// True when a normalized value is the 'None' sentinel.
bool is_none_token(std::string_view normalized);

}  // namespace lmkb::text
