#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "lmkb/prompt.hpp"
#include "lmkb/relation.hpp"

namespace lmkb {

// Canonical label, alias list, claim count and type ids for one entity.
// Label and aliases are stored normalized; the label never repeats in the
// alias set.
struct EntityRecord {
    std::string entity_id;  // e.g. a knowledge-base Q-identifier
    std::string label;
    std::set<std::string> aliases;
    long long claim_count = 0;
    std::set<std::string> types;
};

struct AliasIndex {
    Relation relation;
    std::map<std::string, std::string> by_label;            // label -> entity id
    std::map<std::string, std::set<std::string>> by_alias;  // alias -> entity ids
    std::map<std::string, EntityRecord> entities;           // id -> merged record
    int skipped = 0;  // records without a relevant type, or malformed
};

// Indexes only records whose types intersect the relation's relevant_types.
// Duplicate entity ids are merged (max claim count, union of aliases/types),
// so the result is independent of stream order.
AliasIndex build_index(std::span<const EntityRecord> records, const RelationConfig& config);

// Label wins over alias; an alias shared by several entities resolves to the
// label of the one with the most claims (ties: lexicographically smallest
// entity id). Unknown predictions come back unchanged.
std::string resolve(const std::string& prediction, const AliasIndex& index);

// Newline-delimited snapshot records, one entity per line.
void write_snapshot(const std::filesystem::path& path, std::span<const EntityRecord> records);
std::vector<EntityRecord> read_snapshot(const std::filesystem::path& path);

struct FetchOptions {
    std::string endpoint;  // query service URL, e.g. https://query.wikidata.org/sparql
    int page_size = 2000;
    long long max_records = 200000;
    int timeout_s = 60;
};

struct FetchResult {
    std::vector<EntityRecord> records;
    int malformed_rows = 0;
    int pages = 0;
};

// Pages type-filtered queries through a SPARQL endpoint and returns one
// merged record per entity. Results are meant to be persisted with
// write_snapshot so later runs stay offline.
FetchResult fetch_records(const FetchOptions& options, const RelationConfig& config);

// The query string sent for one (type, page); exposed for tests.
std::string sparql_query_for(const std::string& type_id, int limit, long long offset);

}  // namespace lmkb
