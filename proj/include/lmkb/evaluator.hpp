#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "lmkb/parser.hpp"
#include "lmkb/relation.hpp"

namespace lmkb {

// How vacuous precision/recall cells are filled when a side is empty.
//   challenge: empty pred -> P=1, empty gold -> R=1 (both empty -> 1/1).
//   strict:    the vacuous side scores 0 unless both sides are empty.
// F1 is identical under both; only the P/R columns differ.
enum class EmptyConvention { kChallenge, kStrict };

std::string_view empty_convention_name(EmptyConvention c);
std::optional<EmptyConvention> empty_convention_from_name(std::string_view name);

struct SampleScore {
    std::string subject;
    Relation relation;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::set<std::string> matched;   // predictions matched to a gold group
    std::set<std::string> spurious;  // predictions left unmatched
    int missed = 0;                  // gold groups left unmatched
};

struct RelationScore {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    int sample_count = 0;
};

struct EvalReport {
    std::map<Relation, RelationScore> per_relation;
    RelationScore overall;  // unweighted mean over the relations present
    std::vector<SampleScore> rows;
    EmptyConvention convention = EmptyConvention::kChallenge;
};

// A prediction matches a gold group iff it equals any alias in the group;
// each prediction and each group is used at most once, and the match count
// is the maximum possible (exact-string bipartite matching).
SampleScore score_sample(const AnswerSet& pred, const std::vector<std::vector<std::string>>& gold,
                         EmptyConvention convention = EmptyConvention::kChallenge);

// Unweighted mean per relation, then unweighted mean over relations.
EvalReport aggregate(std::vector<SampleScore> rows,
                     EmptyConvention convention = EmptyConvention::kChallenge);

std::string report_tsv(const EvalReport& report);
std::string report_table(const EvalReport& report);

}  // namespace lmkb
