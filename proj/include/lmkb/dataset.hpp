#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "lmkb/relation.hpp"

namespace lmkb {

// One (subject, relation, gold-object-alias-groups) record. Each alias group
// is the set of acceptable surface strings for one gold object; matching any
// member counts as a hit. gold may be empty (an empty answer set is valid).
struct Sample {
    std::string subject;
    Relation relation;
    std::vector<std::vector<std::string>> gold;  // normalized, sorted within each group
};

struct DatasetSplit {
    std::string name;  // train|dev|test or free-form label
    std::vector<Sample> samples;
};

struct RelationStats {
    Relation relation;
    double mean_cardinality = 0.0;
    double std_cardinality = 0.0;  // sample std, n-1 denominator
    int empty_count = 0;
};

class DatasetError : public std::runtime_error {
  public:
    DatasetError(int line, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
    int line() const { return line_; }

  private:
    int line_;
};

// Reads newline-delimited records with keys SubjectEntity, Relation,
// ObjectEntities (a list of alias lists). Gold aliases are normalized at
// load time. Validation failures raise DatasetError with the line number.
DatasetSplit load_split(const std::filesystem::path& path, std::string split_name);

// Writes the split back in the same record format (load/save round-trips).
void save_split(const DatasetSplit& split, const std::filesystem::path& path);

// Mean/std over the number of alias groups per sample, one row per relation
// present in the split, sorted by mean ascending.
std::vector<RelationStats> compute_stats(const DatasetSplit& split);

// Tab-separated table: relation, mean, std, empty_count.
std::string stats_table(const std::vector<RelationStats>& stats);

}  // namespace lmkb
