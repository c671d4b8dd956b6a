#include "lmkb/text.hpp"

#include <algorithm>
#include <cctype>

namespace lmkb::text {

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }
bool is_quote(char c) { return c == '\'' || c == '"'; }

}  // namespace

std::string trim(std::string_view s) {
    size_t b = 0;
    size_t e = s.size();
    while (b < e && is_space(s[b])) ++b;
    while (e > b && is_space(s[e - 1])) --e;
    return std::string(s.substr(b, e - b));
}

std::string to_lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::string collapse_whitespace(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    bool in_ws = false;
    for (char c : s) {
        if (is_space(c)) {
            in_ws = true;
            continue;
        }
        if (in_ws && !out.empty()) out.push_back(' ');
        in_ws = false;
        out.push_back(c);
    }
    return out;
}

std::string strip_surrounding_quotes(std::string_view s) {
    size_t b = 0;
    size_t e = s.size();
    while (b < e && is_quote(s[b])) ++b;
    while (e > b && is_quote(s[e - 1])) --e;
    return std::string(s.substr(b, e - b));
}

std::string normalize_value(std::string_view s) {
    return collapse_whitespace(to_lower(trim(strip_surrounding_quotes(trim(s)))));
}

bool is_none_token(std::string_view normalized) { return normalized == "none"; }

}  // namespace lmkb::text
