#pragma once

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "lmkb/relation.hpp"

namespace lmkb {

enum class Stage { kParsed, kProbed, kAliased };

std::string_view stage_name(Stage s);

// Normalized set of object surface strings (possibly empty). Values contain
// no empty strings, no duplicates and never the literal "none".
struct AnswerSet {
    Relation relation;
    std::string subject;
    std::set<std::string> values;
    Stage stage = Stage::kParsed;
};

struct ParsedCompletion {
    AnswerSet answers;
    bool malformed = false;  // diagnostic flag for the run log
    std::string note;
};

// Total over arbitrary text. Extracts the first bracketed list within the
// first non-empty line span, splitting elements on top-level commas (commas
// inside quoted elements do not split). 'None' elements of any case are
// dropped, so ['None'] parses to the empty set. Without a bracket pair the
// first line is treated as a comma-separated list and flagged malformed.
ParsedCompletion parse_completion(const std::string& text, Relation relation,
                                  std::string_view subject);

// First alphabetic token of the trimmed text, case-insensitive:
// TRUE -> true, FALSE -> false, anything else -> nullopt.
std::optional<bool> parse_verdict(std::string_view text);

// Renders values back to the prompt list syntax: "['a', 'b']". An empty set
// renders as "[]" unless none_sentinel is set, then "['None']". Elements are
// wrapped in whichever quote character does not collide with the element's
// own content; the syntax has no escaping, so a value holding both a '…,'
// and a "…," pattern cannot be represented losslessly.
std::string format_answer_list(const std::set<std::string>& values, bool none_sentinel = false);

// Quote-aware top-level comma split of raw list content (no normalization).
std::vector<std::string> split_list_elements(std::string_view content);

}  // namespace lmkb
