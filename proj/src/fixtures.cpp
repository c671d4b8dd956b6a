#include "lmkb/fixtures.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"
#include "lmkb/sha256.hpp"
#include "lmkb/text.hpp"

namespace lmkb {

namespace {

using nlohmann::json;

constexpr const char* kFailureCasesDigest =
    "2541ff98db5159e0dc286629b2811a2ee103009fec148930f113091cb09a0ad8";
constexpr const char* kResultsDigest =
    "7f4b91e3a1a62c972ef5bd7a083048a654084fb1bfa400e3ae370a60bbde6c69";

void check_digest(const std::filesystem::path& path, const char* expected) {
    const std::string actual = sha256_file_hex(path);
    if (actual != expected) {
        throw std::runtime_error("fixture checksum mismatch for " + path.string() + ": " + actual);
    }
}

}  // namespace

FixtureSuite load_fixture_suite(const std::filesystem::path& fixtures_dir) {
    FixtureSuite suite;

    const auto cases_path = fixtures_dir / "failure_cases.jsonl";
    check_digest(cases_path, kFailureCasesDigest);
    std::ifstream cases(cases_path);
    std::string line;
    while (std::getline(cases, line)) {
        if (text::trim(line).empty()) continue;
        const json record = json::parse(line);
        FailureCaseFixture fixture;
        fixture.subject = record.at("SubjectEntity").get<std::string>();
        const auto relation = relation_from_name(record.at("Relation").get<std::string>());
        if (!relation) {
            throw std::runtime_error("failure case with unknown relation: " + line);
        }
        fixture.relation = *relation;
        for (const auto& group : record.at("GroundTruth")) {
            std::vector<std::string> aliases;
            for (const auto& alias : group) {
                aliases.push_back(text::normalize_value(alias.get<std::string>()));
            }
            fixture.gold.push_back(std::move(aliases));
        }
        for (const auto& value : record.at("Prediction")) {
            const std::string norm = text::normalize_value(value.get<std::string>());
            if (!norm.empty()) fixture.prediction.insert(norm);
        }
        suite.failure_cases.push_back(std::move(fixture));
    }
    if (suite.failure_cases.size() != 36) {
        throw std::runtime_error("expected 36 failure cases, loaded " +
                                 std::to_string(suite.failure_cases.size()));
    }

    const auto table_path = fixtures_dir / "reference_results.tsv";
    check_digest(table_path, kResultsDigest);
    std::ifstream table(table_path);
    bool header = true;
    while (std::getline(table, line)) {
        if (text::trim(line).empty()) continue;
        if (header) {
            header = false;
            continue;
        }
        std::stringstream ss(line);
        std::string name;
        ResultsRow row;
        std::getline(ss, name, '\t');
        ss >> row.triple.precision >> row.natural.precision >> row.triple.recall >>
            row.natural.recall >> row.triple.f1 >> row.natural.f1;
        if (!ss) throw std::runtime_error("malformed table row: " + line);
        if (name == "AverageOverAllRelations") {
            suite.reference.printed_average = row;
        } else {
            const auto relation = relation_from_name(name);
            if (!relation) throw std::runtime_error("table row with unknown relation: " + name);
            suite.reference.rows[*relation] = row;
        }
    }
    if (suite.reference.rows.size() != kRelationCount) {
        throw std::runtime_error("table must cover all 12 relations");
    }
    return suite;
}

}  // namespace lmkb
