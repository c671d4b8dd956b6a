#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "lmkb/relation.hpp"

namespace lmkb {

// One transcribed failure listing: the subject, its gold alias groups and
// the prediction the large model produced for it.
struct FailureCaseFixture {
    std::string subject;
    Relation relation;
    std::vector<std::vector<std::string>> gold;
    std::set<std::string> prediction;
};

struct Metrics3 {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

struct ResultsRow {
    Metrics3 triple;
    Metrics3 natural;
};

struct ReferenceResults {
    std::map<Relation, ResultsRow> rows;  // all 12 relations
    ResultsRow printed_average;           // the average row as originally printed
};

struct FixtureSuite {
    std::vector<FailureCaseFixture> failure_cases;  // 36 = 3 x 12 relations
    ReferenceResults reference;
};

// Loads failure_cases.jsonl and reference_results.tsv from the fixtures directory and
// verifies both files against digests embedded in this module.
FixtureSuite load_fixture_suite(const std::filesystem::path& fixtures_dir);

}  // namespace lmkb
