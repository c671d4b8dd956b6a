#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>

#include "lmkb/relation.hpp"

namespace lmkb {

enum class PromptStyle { kNaturalLanguage, kTriple };
enum class EmptyMode { kEmptyList, kNoneString };

std::string_view prompt_style_name(PromptStyle s);
std::string_view empty_mode_name(EmptyMode m);
std::optional<PromptStyle> prompt_style_from_name(std::string_view name);
std::optional<EmptyMode> empty_mode_from_name(std::string_view name);

inline constexpr std::string_view kSubjectPlaceholder = "{subject_entity}";

// A relation's few-shot block (exactly four worked examples) plus the query
// line holding the subject placeholder exactly once.
struct PromptTemplate {
    Relation relation;
    PromptStyle style;
    EmptyMode empty_mode;
    std::string few_shot_block;
    std::string query_line;
};

struct ProbeExemplar {
    std::string subject;
    std::string object;
};

// Per-relation choices: prompt style, empty-answer representation, whether
// fact probing runs, the declarative fact phrasing, and the entity types
// admitted into the alias index.
struct RelationConfig {
    Relation relation;
    PromptStyle style;
    EmptyMode empty_mode;
    bool probing_enabled = false;
    std::string fact_phrase;  // holds {subject} and {object} exactly once each
    std::set<std::string> relevant_types;
    ProbeExemplar probe_true;
    ProbeExemplar probe_false;
};

class TemplateError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Built-in defaults for each relation (the per-relation winners plus the
// probing and alias settings shipped with this artifact).
RelationConfig default_config(Relation relation);

// Few-shot block followed by the query line with the placeholder replaced by
// the trimmed subject. Natural-language prompts end with a newline so the
// model answers on the next line; triple prompts end at the colon.
std::string render_prompt(const PromptTemplate& tmpl, std::string_view subject);

// Single-pass substitution of {subject} / {object}; placeholders appearing
// inside the substituted values are not re-expanded.
std::string render_fact(const std::string& phrase, std::string_view subject,
                        std::string_view object);

// One known-true line ending in TRUE, one known-false line ending in FALSE,
// then the candidate fact with no verdict token.
std::string render_probe_prompt(const RelationConfig& config, std::string_view subject,
                                std::string_view candidate);

// Throws TemplateError unless the template has exactly four example answer
// lists, answer lists of varying length, and exactly one placeholder.
void validate_template(const PromptTemplate& tmpl);

// Rewrites empty-equivalent answer lists ([] / ['None']) in a few-shot block
// to the representation the mode asks for.
std::string rewrite_empty_answers(std::string_view block, EmptyMode mode);

// Loads one .cfg file per relation from a directory: [config] key/value
// metadata over the built-in defaults plus [template.<style>] blocks.
class TemplateLibrary {
  public:
    static TemplateLibrary load(const std::filesystem::path& dir);

    const RelationConfig& config(Relation relation) const;

    bool has_style(Relation relation, PromptStyle style) const;

    // Template for the configured (or overridden) style, with empty answers
    // rewritten to the requested empty mode.
    PromptTemplate make_template(Relation relation,
                                 std::optional<PromptStyle> style_override = std::nullopt,
                                 std::optional<EmptyMode> empty_override = std::nullopt) const;

  private:
    struct StyleBlock {
        std::string few_shot_block;
        std::string query_line;
    };
    std::map<Relation, RelationConfig> configs_;
    std::map<Relation, std::map<PromptStyle, StyleBlock>> blocks_;
};

}  // namespace lmkb
