#include "lmkb/prober.hpp"

namespace lmkb {

std::string_view probe_verdict_name(ProbeVerdict v) {
    switch (v) {
        case ProbeVerdict::kKept: return "kept";
        case ProbeVerdict::kRemoved: return "removed";
        case ProbeVerdict::kIndeterminate: return "indeterminate";
    }
    return "kept";
}

ProbeResult probe_answers(const AnswerSet& answers, const RelationConfig& config,
                          const LMRequestParams& params, CachingClient& client) {
    if (answers.stage != Stage::kParsed) {
        throw std::invalid_argument("probe_answers expects a parsed answer set");
    }
    if (!config.probing_enabled) return ProbeResult{answers, {}};

    LMRequestParams probe_params = params;
    probe_params.max_tokens = 5;  // a verdict token needs no budget

    ProbeResult result;
    result.answers.relation = answers.relation;
    result.answers.subject = answers.subject;
    result.answers.stage = Stage::kProbed;

    // std::set iteration gives the lexicographic candidate order.
    for (const auto& candidate : answers.values) {
        const std::string prompt = render_probe_prompt(config, answers.subject, candidate);
        const Completion completion = client.complete(prompt, probe_params);
        const auto verdict = parse_verdict(completion.text);
        ProbeVerdict outcome;
        if (!verdict.has_value()) {
            outcome = ProbeVerdict::kIndeterminate;
            result.answers.values.insert(candidate);
        } else if (*verdict) {
            outcome = ProbeVerdict::kKept;
            result.answers.values.insert(candidate);
        } else {
            outcome = ProbeVerdict::kRemoved;
        }
        result.outcomes.push_back({candidate, outcome});
    }
    return result;
}

}  // namespace lmkb
