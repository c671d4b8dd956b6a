#include "lmkb/prompt.hpp"

#include <fstream>
#include <sstream>
#include <vector>

#include "lmkb/parser.hpp"
#include "lmkb/text.hpp"

namespace lmkb {

namespace {

size_t count_occurrences(std::string_view haystack, std::string_view needle) {
    size_t count = 0;
    size_t pos = 0;
    while ((pos = haystack.find(needle, pos)) != std::string_view::npos) {
        ++count;
        pos += needle.size();
    }
    return count;
}

std::string replace_once_each(const std::string& phrase, std::string_view subject_key,
                              std::string_view subject, std::string_view object_key,
                              std::string_view object) {
    const size_t spos = phrase.find(subject_key);
    const size_t opos = phrase.find(object_key);
    if (spos == std::string::npos || opos == std::string::npos) {
        throw TemplateError("fact phrase is missing a placeholder: " + phrase);
    }
    std::string out;
    out.reserve(phrase.size() + subject.size() + object.size());
    if (spos < opos) {
        out.append(phrase, 0, spos);
        out.append(subject);
        out.append(phrase, spos + subject_key.size(), opos - spos - subject_key.size());
        out.append(object);
        out.append(phrase, opos + object_key.size(), std::string::npos);
    } else {
        out.append(phrase, 0, opos);
        out.append(object);
        out.append(phrase, opos + object_key.size(), spos - opos - object_key.size());
        out.append(subject);
        out.append(phrase, spos + subject_key.size(), std::string::npos);
    }
    return out;
}

// Locations of top-level [...] spans; an unterminated span extends to the end.
struct ListSpan {
    size_t open;
    size_t close;  // index of ']' or npos
};

std::vector<ListSpan> find_list_spans(std::string_view s) {
    std::vector<ListSpan> spans;
    size_t pos = 0;
    while ((pos = s.find('[', pos)) != std::string_view::npos) {
        const size_t close = s.find(']', pos + 1);
        spans.push_back({pos, close});
        if (close == std::string_view::npos) break;
        pos = close + 1;
    }
    return spans;
}

bool span_is_empty_answer(std::string_view content) {
    for (const auto& element : split_list_elements(content)) {
        const std::string norm = text::normalize_value(element);
        if (!norm.empty() && !text::is_none_token(norm)) return false;
    }
    return true;
}

size_t answer_cardinality(std::string_view content) {
    size_t n = 0;
    for (const auto& element : split_list_elements(content)) {
        const std::string norm = text::normalize_value(element);
        if (!norm.empty() && !text::is_none_token(norm)) ++n;
    }
    return n;
}

ProbeExemplar parse_exemplar(const std::string& value, const std::string& context) {
    const size_t sep = value.find("->");
    if (sep == std::string::npos) {
        throw TemplateError(context + ": expected 'subject -> object', got: " + value);
    }
    ProbeExemplar ex;
    ex.subject = text::trim(value.substr(0, sep));
    ex.object = text::trim(value.substr(sep + 2));
    if (ex.subject.empty() || ex.object.empty()) {
        throw TemplateError(context + ": empty exemplar side in: " + value);
    }
    return ex;
}

}  // namespace

std::string_view prompt_style_name(PromptStyle s) {
    return s == PromptStyle::kNaturalLanguage ? "natural_language" : "triple";
}

std::string_view empty_mode_name(EmptyMode m) {
    return m == EmptyMode::kEmptyList ? "empty_list" : "none_string";
}

std::optional<PromptStyle> prompt_style_from_name(std::string_view name) {
    if (name == "natural_language" || name == "natural" || name == "nl") {
        return PromptStyle::kNaturalLanguage;
    }
    if (name == "triple") return PromptStyle::kTriple;
    return std::nullopt;
}

std::optional<EmptyMode> empty_mode_from_name(std::string_view name) {
    if (name == "empty_list" || name == "empty") return EmptyMode::kEmptyList;
    if (name == "none_string" || name == "none") return EmptyMode::kNoneString;
    return std::nullopt;
}

std::string render_prompt(const PromptTemplate& tmpl, std::string_view subject) {
    const std::string subj = text::trim(subject);
    if (subj.empty()) throw std::invalid_argument("render_prompt: empty subject");

    const size_t n = count_occurrences(tmpl.query_line, kSubjectPlaceholder);
    if (n == 0) throw TemplateError("query line has no subject placeholder");
    if (n > 1) throw TemplateError("query line has a duplicated subject placeholder");

    std::string query = tmpl.query_line;
    query.replace(query.find(kSubjectPlaceholder), kSubjectPlaceholder.size(), subj);

    std::string out = tmpl.few_shot_block;
    out += "\n\n";
    out += query;
    if (tmpl.style == PromptStyle::kNaturalLanguage) out += "\n";
    return out;
}

std::string render_fact(const std::string& phrase, std::string_view subject,
                        std::string_view object) {
    return replace_once_each(phrase, "{subject}", text::trim(subject), "{object}", object);
}

std::string render_probe_prompt(const RelationConfig& config, std::string_view subject,
                                std::string_view candidate) {
    if (!config.probing_enabled) {
        throw TemplateError(std::string("fact probing is disabled for ") +
                            std::string(relation_name(config.relation)));
    }
    if (text::trim(candidate).empty()) {
        throw std::invalid_argument("render_probe_prompt: empty candidate");
    }
    std::string out;
    out += render_fact(config.fact_phrase, config.probe_true.subject, config.probe_true.object);
    out += " TRUE\n";
    out += render_fact(config.fact_phrase, config.probe_false.subject, config.probe_false.object);
    out += " FALSE\n";
    out += render_fact(config.fact_phrase, subject, candidate);
    return out;
}

void validate_template(const PromptTemplate& tmpl) {
    const std::string context = std::string(relation_name(tmpl.relation)) + "/" +
                                std::string(prompt_style_name(tmpl.style));

    const size_t placeholders = count_occurrences(tmpl.query_line, kSubjectPlaceholder);
    if (placeholders != 1) {
        throw TemplateError(context + ": query line must hold the placeholder exactly once");
    }
    if (count_occurrences(tmpl.few_shot_block, kSubjectPlaceholder) != 0) {
        throw TemplateError(context + ": placeholder not allowed in the few-shot block");
    }

    const auto spans = find_list_spans(tmpl.few_shot_block);
    if (spans.size() != 4) {
        throw TemplateError(context + ": expected 4 example answer lists, found " +
                            std::to_string(spans.size()));
    }
    size_t first_len = 0;
    bool varied = false;
    for (size_t i = 0; i < spans.size(); ++i) {
        if (spans[i].close == std::string_view::npos) {
            throw TemplateError(context + ": unterminated answer list");
        }
        const auto content = std::string_view(tmpl.few_shot_block)
                                 .substr(spans[i].open + 1, spans[i].close - spans[i].open - 1);
        const size_t len = answer_cardinality(content);
        if (i == 0) {
            first_len = len;
        } else if (len != first_len) {
            varied = true;
        }
    }
    if (!varied) {
        throw TemplateError(context + ": example answers must have variable lengths");
    }
}

std::string rewrite_empty_answers(std::string_view block, EmptyMode mode) {
    const std::string_view replacement =
        mode == EmptyMode::kEmptyList ? std::string_view("[]") : std::string_view("['None']");
    std::string out;
    out.reserve(block.size());
    size_t pos = 0;
    for (const auto& span : find_list_spans(block)) {
        if (span.close == std::string_view::npos) break;
        out.append(block.substr(pos, span.open - pos));
        const auto content = block.substr(span.open + 1, span.close - span.open - 1);
        if (span_is_empty_answer(content)) {
            out.append(replacement);
        } else {
            out.append(block.substr(span.open, span.close - span.open + 1));
        }
        pos = span.close + 1;
    }
    out.append(block.substr(pos));
    return out;
}

TemplateLibrary TemplateLibrary::load(const std::filesystem::path& dir) {
    TemplateLibrary lib;
    for (Relation relation : all_relations()) {
        const auto path = dir / (std::string(relation_name(relation)) + ".cfg");
        std::ifstream in(path);
        if (!in) {
            throw TemplateError("missing relation config file: " + path.string());
        }

        RelationConfig config = default_config(relation);
        std::map<PromptStyle, std::vector<std::string>> raw_blocks;

        std::string section;
        std::vector<std::string>* block_lines = nullptr;
        std::string line;
        while (std::getline(in, line)) {
            while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t')) {
                line.pop_back();
            }
            if (!line.empty() && line.front() == '#') continue;
            const bool is_section = line == "[config]" || (line.rfind("[template.", 0) == 0 &&
                                                           line.back() == ']');
            if (is_section) {
                section = line.substr(1, line.size() - 2);
                block_lines = nullptr;
                if (section.rfind("template.", 0) == 0) {
                    const auto style = prompt_style_from_name(section.substr(9));
                    if (!style) throw TemplateError(path.string() + ": unknown section " + line);
                    block_lines = &raw_blocks[*style];
                } else if (section != "config") {
                    throw TemplateError(path.string() + ": unknown section " + line);
                }
                continue;
            }
            if (block_lines != nullptr) {
                block_lines->push_back(line);
                continue;
            }
            if (section == "config") {
                if (text::trim(line).empty()) continue;
                const size_t eq = line.find('=');
                if (eq == std::string::npos) {
                    throw TemplateError(path.string() + ": expected key = value, got: " + line);
                }
                const std::string key = text::trim(line.substr(0, eq));
                const std::string value = text::trim(line.substr(eq + 1));
                if (key == "style") {
                    const auto style = prompt_style_from_name(value);
                    if (!style) throw TemplateError(path.string() + ": bad style: " + value);
                    config.style = *style;
                } else if (key == "empty_mode") {
                    const auto m = empty_mode_from_name(value);
                    if (!m) throw TemplateError(path.string() + ": bad empty_mode: " + value);
                    config.empty_mode = *m;
                } else if (key == "probe") {
                    if (value != "on" && value != "off") {
                        throw TemplateError(path.string() + ": probe must be on or off");
                    }
                    config.probing_enabled = (value == "on");
                } else if (key == "fact_phrase") {
                    config.fact_phrase = value;
                } else if (key == "relevant_types") {
                    config.relevant_types.clear();
                    std::stringstream ss(value);
                    std::string item;
                    while (std::getline(ss, item, ',')) {
                        const std::string t = text::trim(item);
                        if (!t.empty()) config.relevant_types.insert(t);
                    }
                } else if (key == "probe_true") {
                    config.probe_true = parse_exemplar(value, path.string());
                } else if (key == "probe_false") {
                    config.probe_false = parse_exemplar(value, path.string());
                } else {
                    throw TemplateError(path.string() + ": unknown config key: " + key);
                }
            } else if (!text::trim(line).empty()) {
                throw TemplateError(path.string() + ": content outside any section: " + line);
            }
        }

        if (count_occurrences(config.fact_phrase, "{subject}") != 1 ||
            count_occurrences(config.fact_phrase, "{object}") != 1) {
            throw TemplateError(path.string() +
                                ": fact_phrase must hold {subject} and {object} exactly once");
        }

        for (auto& [style, lines] : raw_blocks) {
            while (!lines.empty() && text::trim(lines.front()).empty()) lines.erase(lines.begin());
            while (!lines.empty() && text::trim(lines.back()).empty()) lines.pop_back();
            if (lines.size() < 3) {
                throw TemplateError(path.string() + ": template block too short for style " +
                                    std::string(prompt_style_name(style)));
            }
            StyleBlock sb;
            sb.query_line = lines.back();
            lines.pop_back();
            while (!lines.empty() && text::trim(lines.back()).empty()) lines.pop_back();
            std::string block;
            for (size_t i = 0; i < lines.size(); ++i) {
                if (i > 0) block += "\n";
                block += lines[i];
            }
            sb.few_shot_block = std::move(block);
            lib.blocks_[relation][style] = std::move(sb);
        }

        if (lib.blocks_[relation].empty()) {
            throw TemplateError(path.string() + ": no template blocks");
        }
        if (lib.blocks_[relation].find(config.style) == lib.blocks_[relation].end()) {
            throw TemplateError(path.string() + ": no template block for the configured style");
        }
        lib.configs_.emplace(relation, std::move(config));
    }

    // Validate everything up front so later rendering cannot fail on shape.
    for (const auto& [relation, styles] : lib.blocks_) {
        for (const auto& [style, sb] : styles) {
            for (EmptyMode mode : {EmptyMode::kEmptyList, EmptyMode::kNoneString}) {
                PromptTemplate t{relation, style, mode, rewrite_empty_answers(sb.few_shot_block, mode),
                                 sb.query_line};
                validate_template(t);
            }
        }
    }
    return lib;
}

const RelationConfig& TemplateLibrary::config(Relation relation) const {
    return configs_.at(relation);
}

bool TemplateLibrary::has_style(Relation relation, PromptStyle style) const {
    auto it = blocks_.find(relation);
    return it != blocks_.end() && it->second.find(style) != it->second.end();
}

PromptTemplate TemplateLibrary::make_template(Relation relation,
                                              std::optional<PromptStyle> style_override,
                                              std::optional<EmptyMode> empty_override) const {
    const RelationConfig& cfg = configs_.at(relation);
    const PromptStyle style = style_override.value_or(cfg.style);
    const EmptyMode mode = empty_override.value_or(cfg.empty_mode);
    auto rel_it = blocks_.find(relation);
    if (rel_it == blocks_.end() || rel_it->second.find(style) == rel_it->second.end()) {
        throw TemplateError(std::string("no template for ") + std::string(relation_name(relation)) +
                            " in style " + std::string(prompt_style_name(style)));
    }
    const StyleBlock& sb = rel_it->second.at(style);
    return PromptTemplate{relation, style, mode, rewrite_empty_answers(sb.few_shot_block, mode),
                          sb.query_line};
}

}  // namespace lmkb
