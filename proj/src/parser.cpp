#include "lmkb/parser.hpp"

#include <cctype>
#include <sstream>

#include "lmkb/text.hpp"

namespace lmkb {

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

bool blank(std::string_view line) {
    for (char c : line) {
        if (!is_space(c)) return false;
    }
    return true;
}

std::vector<std::string_view> split_lines(std::string_view s) {
    std::vector<std::string_view> lines;
    size_t start = 0;
    while (start <= s.size()) {
        size_t nl = s.find('\n', start);
        if (nl == std::string_view::npos) {
            lines.push_back(s.substr(start));
            break;
        }
        lines.push_back(s.substr(start, nl - start));
        start = nl + 1;
    }
    return lines;
}

// Next non-space character at or after pos, npos if none.
size_t next_visible(std::string_view s, size_t pos) {
    while (pos < s.size() && is_space(s[pos])) ++pos;
    return pos < s.size() ? pos : std::string_view::npos;
}

void insert_normalized(std::set<std::string>& out, std::string_view raw) {
    std::string norm = text::normalize_value(raw);
    if (norm.empty() || text::is_none_token(norm)) return;
    out.insert(std::move(norm));
}

// A quote character closes an element when followed by optional whitespace
// and a comma, so a value containing that pattern cannot be wrapped in it.
bool quote_conflicts(std::string_view value, char q) {
    for (size_t i = 0; i < value.size(); ++i) {
        if (value[i] != q) continue;
        size_t j = i + 1;
        while (j < value.size() && is_space(value[j])) ++j;
        if (j < value.size() && value[j] == ',') return true;
    }
    return false;
}

}  // namespace

std::string_view stage_name(Stage s) {
    switch (s) {
        case Stage::kParsed: return "parsed";
        case Stage::kProbed: return "probed";
        case Stage::kAliased: return "aliased";
    }
    return "parsed";
}

std::vector<std::string> split_list_elements(std::string_view content) {
    std::vector<std::string> elements;
    std::string current;
    char quote = 0;
    for (size_t i = 0; i < content.size(); ++i) {
        const char c = content[i];
        if (quote != 0) {
            current.push_back(c);
            // A quote closes only where the element can end: before a
            // top-level comma or at the end of the list content.
            if (c == quote) {
                const size_t nxt = next_visible(content, i + 1);
                if (nxt == std::string_view::npos || content[nxt] == ',') quote = 0;
            }
            continue;
        }
        if (c == ',') {
            elements.push_back(current);
            current.clear();
            continue;
        }
        if ((c == '\'' || c == '"') && text::trim(current).empty()) {
            quote = c;
        }
        current.push_back(c);
    }
    elements.push_back(std::move(current));
    return elements;
}

ParsedCompletion parse_completion(const std::string& raw, Relation relation,
                                  std::string_view subject) {
    ParsedCompletion out;
    out.answers.relation = relation;
    out.answers.subject = std::string(subject);
    out.answers.stage = Stage::kParsed;

    const auto lines = split_lines(raw);
    size_t first = 0;
    while (first < lines.size() && blank(lines[first])) ++first;
    if (first == lines.size()) {
        out.malformed = true;
        out.note = "empty completion";
        return out;
    }
    size_t last = first;
    while (last + 1 < lines.size() && !blank(lines[last + 1])) ++last;

    std::string region;
    for (size_t i = first; i <= last; ++i) {
        if (i > first) region.push_back('\n');
        region.append(lines[i]);
    }

    std::string_view content;
    const size_t open = region.find('[');
    if (open != std::string::npos) {
        const size_t close = region.find(']', open + 1);
        if (close != std::string::npos) {
            content = std::string_view(region).substr(open + 1, close - open - 1);
        } else {
            content = std::string_view(region).substr(open + 1);
            out.malformed = true;
            out.note = "unterminated list";
        }
    } else {
        // No list at all; fall back to the first line as comma-separated.
        content = lines[first];
        out.malformed = true;
        out.note = "no bracketed list; comma-separated fallback";
    }

    for (const auto& element : split_list_elements(content)) {
        insert_normalized(out.answers.values, element);
    }
    return out;
}

std::optional<bool> parse_verdict(std::string_view raw) {
    const std::string trimmed = text::trim(raw);
    std::string token;
    for (char c : trimmed) {
        if (!std::isalpha(static_cast<unsigned char>(c))) break;
        token.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
    if (token == "true") return true;
    if (token == "false") return false;
    return std::nullopt;
}

std::string format_answer_list(const std::set<std::string>& values, bool none_sentinel) {
    if (values.empty()) return none_sentinel ? "['None']" : "[]";
    std::ostringstream out;
    out << "[";
    bool sep = false;
    for (const auto& v : values) {
        if (sep) out << ", ";
        const char quote = quote_conflicts(v, '\'') ? '"' : '\'';
        out << quote << v << quote;
        sep = true;
    }
    out << "]";
    return out.str();
}

}  // namespace lmkb
