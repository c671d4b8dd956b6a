#include "lmkb/evaluator.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

namespace lmkb {

namespace {

// Kuhn's augmenting-path matching over the prediction/gold-group bipartite
// graph. Sizes here are tiny (a handful of predictions per sample).
class Matcher {
  public:
    Matcher(const std::vector<std::string>& preds,
            const std::vector<std::set<std::string>>& groups)
        : preds_(preds), groups_(groups), group_of_pred_(preds.size(), -1),
          pred_of_group_(groups.size(), -1) {}

    int solve() {
        int matched = 0;
        for (size_t p = 0; p < preds_.size(); ++p) {
            std::vector<bool> visited(groups_.size(), false);
            if (try_augment(p, visited)) ++matched;
        }
        return matched;
    }

    const std::vector<int>& group_of_pred() const { return group_of_pred_; }

  private:
    bool try_augment(size_t p, std::vector<bool>& visited) {
        for (size_t g = 0; g < groups_.size(); ++g) {
            if (visited[g] || groups_[g].count(preds_[p]) == 0) continue;
            visited[g] = true;
            if (pred_of_group_[g] < 0 ||
                try_augment(static_cast<size_t>(pred_of_group_[g]), visited)) {
                pred_of_group_[g] = static_cast<int>(p);
                group_of_pred_[p] = static_cast<int>(g);
                return true;
            }
        }
        return false;
    }

    const std::vector<std::string>& preds_;
    const std::vector<std::set<std::string>>& groups_;
    std::vector<int> group_of_pred_;
    std::vector<int> pred_of_group_;
};

double safe_f1(double p, double r) { return (p + r) == 0.0 ? 0.0 : 2.0 * p * r / (p + r); }

std::string format_triple(double p, double r, double f1, const char* sep) {
    char buf[96];
    std::snprintf(buf, sizeof(buf), "%.3f%s%.3f%s%.3f", p, sep, r, sep, f1);
    return buf;
}

}  // namespace

std::string_view empty_convention_name(EmptyConvention c) {
    return c == EmptyConvention::kChallenge ? "challenge" : "strict";
}

std::optional<EmptyConvention> empty_convention_from_name(std::string_view name) {
    if (name == "challenge") return EmptyConvention::kChallenge;
    if (name == "strict") return EmptyConvention::kStrict;
    return std::nullopt;
}

SampleScore score_sample(const AnswerSet& pred, const std::vector<std::vector<std::string>>& gold,
                         EmptyConvention convention) {
    SampleScore score;
    score.subject = pred.subject;
    score.relation = pred.relation;

    const std::vector<std::string> preds(pred.values.begin(), pred.values.end());
    std::vector<std::set<std::string>> groups;
    groups.reserve(gold.size());
    for (const auto& group : gold) groups.emplace_back(group.begin(), group.end());

    Matcher matcher(preds, groups);
    const int matched = matcher.solve();

    for (size_t p = 0; p < preds.size(); ++p) {
        if (matcher.group_of_pred()[p] >= 0) {
            score.matched.insert(preds[p]);
        } else {
            score.spurious.insert(preds[p]);
        }
    }
    score.missed = static_cast<int>(groups.size()) - matched;

    const bool pred_empty = preds.empty();
    const bool gold_empty = groups.empty();
    const double m = static_cast<double>(matched);
    if (convention == EmptyConvention::kChallenge) {
        score.precision = pred_empty ? 1.0 : m / static_cast<double>(preds.size());
        score.recall = gold_empty ? 1.0 : m / static_cast<double>(groups.size());
    } else {
        if (pred_empty && gold_empty) {
            score.precision = 1.0;
            score.recall = 1.0;
        } else {
            score.precision = pred_empty ? 0.0 : m / static_cast<double>(preds.size());
            score.recall = gold_empty ? 0.0 : m / static_cast<double>(groups.size());
        }
    }
    score.f1 = safe_f1(score.precision, score.recall);
    return score;
}

EvalReport aggregate(std::vector<SampleScore> rows, EmptyConvention convention) {
    if (rows.empty()) throw std::invalid_argument("aggregate: no score rows");

    EvalReport report;
    report.convention = convention;

    std::map<Relation, std::vector<const SampleScore*>> by_relation;
    for (const auto& row : rows) by_relation[row.relation].push_back(&row);

    for (const auto& [relation, rel_rows] : by_relation) {
        RelationScore rs;
        rs.sample_count = static_cast<int>(rel_rows.size());
        for (const SampleScore* row : rel_rows) {
            rs.precision += row->precision;
            rs.recall += row->recall;
            rs.f1 += row->f1;
        }
        rs.precision /= rs.sample_count;
        rs.recall /= rs.sample_count;
        rs.f1 /= rs.sample_count;
        report.per_relation.emplace(relation, rs);
    }

    const double n = static_cast<double>(report.per_relation.size());
    for (const auto& [relation, rs] : report.per_relation) {
        report.overall.precision += rs.precision / n;
        report.overall.recall += rs.recall / n;
        report.overall.f1 += rs.f1 / n;
        report.overall.sample_count += rs.sample_count;
    }
    report.rows = std::move(rows);
    return report;
}

std::string report_tsv(const EvalReport& report) {
    std::ostringstream out;
    out << "# empty_convention=" << empty_convention_name(report.convention) << "\n";
    out << "relation\tp\tr\tf1\tsamples\n";
    for (const auto& [relation, rs] : report.per_relation) {
        out << relation_name(relation) << "\t"
            << format_triple(rs.precision, rs.recall, rs.f1, "\t") << "\t" << rs.sample_count
            << "\n";
    }
    out << "AverageOverAllRelations\t"
        << format_triple(report.overall.precision, report.overall.recall, report.overall.f1, "\t")
        << "\t" << report.overall.sample_count << "\n";
    return out.str();
}

std::string report_table(const EvalReport& report) {
    size_t width = std::string("AverageOverAllRelations").size();
    for (const auto& [relation, rs] : report.per_relation) {
        width = std::max(width, relation_name(relation).size());
    }
    std::ostringstream out;
    out << "empty_convention: " << empty_convention_name(report.convention) << "\n";
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%-*s  %8s  %8s  %8s\n", static_cast<int>(width), "Relation",
                  "P", "R", "F1");
    out << buf;
    for (const auto& [relation, rs] : report.per_relation) {
        std::snprintf(buf, sizeof(buf), "%-*s  %8.3f  %8.3f  %8.3f\n", static_cast<int>(width),
                      std::string(relation_name(relation)).c_str(), rs.precision, rs.recall, rs.f1);
        out << buf;
    }
    std::snprintf(buf, sizeof(buf), "%-*s  %8.3f  %8.3f  %8.3f\n", static_cast<int>(width),
                  "AverageOverAllRelations", report.overall.precision, report.overall.recall,
                  report.overall.f1);
    out << buf;
    return out.str();
}

}  // namespace lmkb
