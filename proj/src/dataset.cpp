#include "lmkb/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"
#include "lmkb/text.hpp"

namespace lmkb {

namespace {

using nlohmann::json;

std::vector<std::string> parse_alias_group(const json& node, int line_no) {
    std::set<std::string> aliases;
    auto add = [&](const json& alias) {
        if (!alias.is_string()) throw DatasetError(line_no, "alias is not a string");
        std::string norm = text::normalize_value(alias.get<std::string>());
        if (norm.empty()) throw DatasetError(line_no, "empty alias in alias group");
        aliases.insert(std::move(norm));
    };
    if (node.is_string()) {
        add(node);  // a bare string is tolerated as a singleton group
    } else if (node.is_array()) {
        if (node.empty()) throw DatasetError(line_no, "empty alias group");
        for (const auto& alias : node) add(alias);
    } else {
        throw DatasetError(line_no, "alias group is neither string nor list");
    }
    return {aliases.begin(), aliases.end()};
}

}  // namespace

DatasetSplit load_split(const std::filesystem::path& path, std::string split_name) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open dataset file: " + path.string());

    DatasetSplit split;
    split.name = std::move(split_name);
    std::set<std::pair<Relation, std::string>> seen;

    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (text::trim(line).empty()) continue;

        json record;
        try {
            record = json::parse(line);
        } catch (const json::parse_error& e) {
            throw DatasetError(line_no, std::string("malformed record: ") + e.what());
        }
        if (!record.is_object()) throw DatasetError(line_no, "record is not an object");
        if (!record.contains("SubjectEntity") || !record["SubjectEntity"].is_string()) {
            throw DatasetError(line_no, "missing SubjectEntity");
        }
        if (!record.contains("Relation") || !record["Relation"].is_string()) {
            throw DatasetError(line_no, "missing Relation");
        }
        if (!record.contains("ObjectEntities") || !record["ObjectEntities"].is_array()) {
            throw DatasetError(line_no, "missing ObjectEntities list");
        }

        Sample sample;
        sample.subject = text::trim(record["SubjectEntity"].get<std::string>());
        if (sample.subject.empty()) throw DatasetError(line_no, "empty subject");

        const std::string rel_name = record["Relation"].get<std::string>();
        auto rel = relation_from_name(rel_name);
        if (!rel) throw DatasetError(line_no, "unknown relation name: " + rel_name);
        sample.relation = *rel;

        for (const auto& group : record["ObjectEntities"]) {
            sample.gold.push_back(parse_alias_group(group, line_no));
        }

        if (!seen.insert({sample.relation, sample.subject}).second) {
            throw DatasetError(line_no, "duplicate (subject, relation) pair: " + sample.subject);
        }
        split.samples.push_back(std::move(sample));
    }
    return split;
}

void save_split(const DatasetSplit& split, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write dataset file: " + path.string());
    for (const auto& sample : split.samples) {
        json record;
        record["SubjectEntity"] = sample.subject;
        record["Relation"] = std::string(relation_name(sample.relation));
        record["ObjectEntities"] = sample.gold;
        out << record.dump() << "\n";
    }
}

std::vector<RelationStats> compute_stats(const DatasetSplit& split) {
    std::map<Relation, std::vector<size_t>> cards;
    for (const auto& sample : split.samples) {
        cards[sample.relation].push_back(sample.gold.size());
    }

    std::vector<RelationStats> stats;
    for (const auto& [relation, values] : cards) {
        RelationStats row;
        row.relation = relation;
        double sum = 0.0;
        for (size_t v : values) {
            sum += static_cast<double>(v);
            if (v == 0) ++row.empty_count;
        }
        const double n = static_cast<double>(values.size());
        row.mean_cardinality = sum / n;
        if (values.size() > 1) {
            double ss = 0.0;
            for (size_t v : values) {
                const double d = static_cast<double>(v) - row.mean_cardinality;
                ss += d * d;
            }
            row.std_cardinality = std::sqrt(ss / (n - 1.0));
        }
        stats.push_back(row);
    }

    std::sort(stats.begin(), stats.end(), [](const RelationStats& a, const RelationStats& b) {
        if (a.mean_cardinality != b.mean_cardinality) return a.mean_cardinality < b.mean_cardinality;
        return relation_name(a.relation) < relation_name(b.relation);
    });
    return stats;
}

std::string stats_table(const std::vector<RelationStats>& stats) {
    std::ostringstream out;
    out << "relation\tmean\tstd\tempty_count\n";
    char buf[64];
    for (const auto& row : stats) {
        std::snprintf(buf, sizeof(buf), "%.2f\t%.2f", row.mean_cardinality, row.std_cardinality);
        out << relation_name(row.relation) << "\t" << buf << "\t" << row.empty_count << "\n";
    }
    return out.str();
}

}  // namespace lmkb
