#include "lmkb/alias.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "httplib.h"
#include "json.hpp"
#include "lmkb/backend.hpp"
#include "lmkb/text.hpp"

namespace lmkb {

namespace {

using nlohmann::json;

void merge_record(std::map<std::string, EntityRecord>& into, EntityRecord record) {
    auto [it, inserted] = into.try_emplace(record.entity_id, record);
    if (inserted) return;
    EntityRecord& existing = it->second;
    existing.claim_count = std::max(existing.claim_count, record.claim_count);
    existing.aliases.insert(record.aliases.begin(), record.aliases.end());
    existing.types.insert(record.types.begin(), record.types.end());
    if (existing.label.empty()) existing.label = record.label;
}

bool better_claimant(const EntityRecord& a, const EntityRecord& b) {
    if (a.claim_count != b.claim_count) return a.claim_count > b.claim_count;
    return a.entity_id < b.entity_id;
}

std::string entity_id_from_uri(const std::string& uri) {
    const size_t slash = uri.find_last_of('/');
    return slash == std::string::npos ? uri : uri.substr(slash + 1);
}

}  // namespace

AliasIndex build_index(std::span<const EntityRecord> records, const RelationConfig& config) {
    AliasIndex index;
    index.relation = config.relation;

    std::map<std::string, EntityRecord> merged;
    for (const EntityRecord& raw : records) {
        EntityRecord record;
        record.entity_id = text::trim(raw.entity_id);
        record.label = text::normalize_value(raw.label);
        record.claim_count = raw.claim_count;
        record.types = raw.types;
        for (const auto& alias : raw.aliases) {
            const std::string norm = text::normalize_value(alias);
            if (!norm.empty() && norm != record.label) record.aliases.insert(norm);
        }
        if (record.entity_id.empty() || record.label.empty()) {
            ++index.skipped;
            continue;
        }
        bool relevant = false;
        for (const auto& t : record.types) {
            if (config.relevant_types.count(t) != 0) {
                relevant = true;
                break;
            }
        }
        if (!relevant) {
            ++index.skipped;
            continue;
        }
        merge_record(merged, std::move(record));
    }

    // A merged record may have picked up its own label as an alias.
    for (auto& [id, record] : merged) record.aliases.erase(record.label);

    for (const auto& [id, record] : merged) {
        auto [it, inserted] = index.by_label.try_emplace(record.label, id);
        if (!inserted && better_claimant(record, merged.at(it->second))) {
            it->second = id;
        }
        for (const auto& alias : record.aliases) {
            index.by_alias[alias].insert(id);
        }
    }
    index.entities = std::move(merged);
    return index;
}

std::string resolve(const std::string& prediction, const AliasIndex& index) {
    if (index.by_label.count(prediction) != 0) return prediction;
    auto it = index.by_alias.find(prediction);
    if (it == index.by_alias.end()) return prediction;

    const EntityRecord* best = nullptr;
    for (const auto& id : it->second) {
        const EntityRecord& candidate = index.entities.at(id);
        if (best == nullptr || better_claimant(candidate, *best)) best = &candidate;
    }
    return best == nullptr ? prediction : best->label;
}

void write_snapshot(const std::filesystem::path& path, std::span<const EntityRecord> records) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write snapshot: " + path.string());
    for (const auto& record : records) {
        json line{
            {"entity_id", record.entity_id},
            {"label", record.label},
            {"aliases", record.aliases},
            {"claim_count", record.claim_count},
            {"types", record.types},
        };
        out << line.dump() << "\n";
    }
}

std::vector<EntityRecord> read_snapshot(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open snapshot: " + path.string());
    std::vector<EntityRecord> records;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (text::trim(line).empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::parse_error& e) {
            throw std::runtime_error(path.string() + ":" + std::to_string(line_no) +
                                     ": malformed snapshot record: " + e.what());
        }
        EntityRecord record;
        record.entity_id = j.at("entity_id").get<std::string>();
        record.label = j.at("label").get<std::string>();
        record.claim_count = j.value("claim_count", 0LL);
        for (const auto& a : j.value("aliases", std::vector<std::string>{})) {
            record.aliases.insert(a);
        }
        for (const auto& t : j.value("types", std::vector<std::string>{})) {
            record.types.insert(t);
        }
        records.push_back(std::move(record));
    }
    return records;
}

std::string sparql_query_for(const std::string& type_id, int limit, long long offset) {
    std::ostringstream q;
    q << "SELECT ?entity ?label ?claims ?aliases WHERE { "
      << "?entity wdt:P31 wd:" << type_id << " . "
      << "?entity rdfs:label ?label . FILTER(LANG(?label) = \"en\") . "
      << "?entity wikibase:statements ?claims . "
      << "OPTIONAL { SELECT ?entity (GROUP_CONCAT(DISTINCT ?alias; separator=\"|\") AS ?aliases) "
      << "WHERE { ?entity skos:altLabel ?alias . FILTER(LANG(?alias) = \"en\") } "
      << "GROUP BY ?entity } "
      << "} ORDER BY ?entity LIMIT " << limit << " OFFSET " << offset;
    return q.str();
}

FetchResult fetch_records(const FetchOptions& options, const RelationConfig& config) {
    FetchResult result;
    std::map<std::string, EntityRecord> merged;

    // Split the endpoint into host and path for the HTTP client.
    std::string base = options.endpoint;
    std::string path = "/";
    const size_t scheme = base.find("://");
    const size_t host_start = scheme == std::string::npos ? 0 : scheme + 3;
    const size_t slash = base.find('/', host_start);
    if (slash != std::string::npos) {
        path = base.substr(slash);
        base = base.substr(0, slash);
    }

    httplib::Client client(base);
    client.set_connection_timeout(options.timeout_s, 0);
    client.set_read_timeout(options.timeout_s, 0);

    for (const auto& type_id : config.relevant_types) {
        long long offset = 0;
        while (offset < options.max_records) {
            const std::string query = sparql_query_for(type_id, options.page_size, offset);
            httplib::Params params{{"query", query}, {"format", "json"}};
            httplib::Headers headers{{"Accept", "application/sparql-results+json"}};
            auto res = client.Post(path, headers, params);
            if (!res) {
                throw TransportError("query service unreachable: " +
                                        httplib::to_string(res.error()));
            }
            if (res->status != 200) {
                throw TransportError("query service returned status " +
                                        std::to_string(res->status));
            }
            json body;
            try {
                body = json::parse(res->body);
            } catch (const json::parse_error& e) {
                throw TransportError(std::string("malformed query results: ") + e.what());
            }
            ++result.pages;

            int rows = 0;
            for (const auto& binding : body.at("results").at("bindings")) {
                ++rows;
                try {
                    EntityRecord record;
                    record.entity_id =
                        entity_id_from_uri(binding.at("entity").at("value").get<std::string>());
                    record.label = binding.at("label").at("value").get<std::string>();
                    record.claim_count =
                        std::stoll(binding.at("claims").at("value").get<std::string>());
                    if (binding.contains("aliases")) {
                        std::stringstream ss(binding["aliases"]["value"].get<std::string>());
                        std::string alias;
                        while (std::getline(ss, alias, '|')) {
                            if (!text::trim(alias).empty()) record.aliases.insert(alias);
                        }
                    }
                    record.types.insert(type_id);
                    merge_record(merged, std::move(record));
                } catch (const std::exception&) {
                    ++result.malformed_rows;
                }
            }
            if (rows < options.page_size) break;
            offset += options.page_size;
        }
    }

    result.records.reserve(merged.size());
    for (auto& [id, record] : merged) result.records.push_back(std::move(record));
    return result;
}

}  // namespace lmkb
