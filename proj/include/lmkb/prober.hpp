#pragma once

#include <string>
#include <vector>

#include "lmkb/backend.hpp"
#include "lmkb/parser.hpp"
#include "lmkb/prompt.hpp"

namespace lmkb {

enum class ProbeVerdict { kKept, kRemoved, kIndeterminate };

std::string_view probe_verdict_name(ProbeVerdict v);

struct ProbeOutcome {
    std::string candidate;
    ProbeVerdict verdict;
};

struct ProbeResult {
    AnswerSet answers;
    std::vector<ProbeOutcome> outcomes;
};

// Asks one TRUE/FALSE question per candidate and keeps only the confirmed
// ones (indeterminate verdicts fail open and stay in). With probing disabled
// for the relation the input passes through untouched. Never adds values.
ProbeResult probe_answers(const AnswerSet& answers, const RelationConfig& config,
                          const LMRequestParams& params, CachingClient& client);

}  // namespace lmkb
