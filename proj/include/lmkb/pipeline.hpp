#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lmkb/alias.hpp"
#include "lmkb/backend.hpp"
#include "lmkb/dataset.hpp"
#include "lmkb/evaluator.hpp"
#include "lmkb/parser.hpp"
#include "lmkb/prober.hpp"
#include "lmkb/prompt.hpp"

namespace lmkb {

enum class ProbeMode { kAuto, kOn, kOff };

struct RunOptions {
    std::optional<PromptStyle> style_override;
    std::optional<EmptyMode> empty_override;
    ProbeMode probe = ProbeMode::kAuto;
    std::optional<std::filesystem::path> alias_snapshot_dir;
    int inflight = 4;       // concurrent samples; 1 is fully serial
    bool test_mode = false; // emit predictions only, no scoring
    EmptyConvention convention = EmptyConvention::kChallenge;
    // When set, predictions are persisted here as soon as all samples finish,
    // before any scoring runs.
    std::optional<std::filesystem::path> predictions_path;
};

// Everything the run recorded about one sample, in dataset order.
struct SampleTrace {
    std::string subject;
    Relation relation;
    AnswerSet parsed;
    AnswerSet final_answers;
    std::vector<ProbeOutcome> probe_outcomes;
    bool parse_diagnostic = false;
    std::string parse_note;
    bool cached = false;
    bool failed = false;
    std::string error;
};

struct StageTimings {
    long long complete_ms = 0;
    long long parse_ms = 0;
    long long probe_ms = 0;
    long long alias_ms = 0;
    long long score_ms = 0;
    long long wall_ms = 0;
};

struct ProbeSummary {
    long long probed = 0;
    long long kept = 0;
    long long removed = 0;
    long long indeterminate = 0;
    // Of the removed candidates, how many were indeed absent from gold.
    // Only filled when gold is available.
    long long removed_not_in_gold = 0;
    std::optional<double> filter_precision;
};

struct RunManifest {
    std::string version;
    std::string dataset_path;
    std::string dataset_sha256;
    std::string dataset_name;
    size_t sample_count = 0;
    std::string backend;
    LMRequestParams params;
    int inflight = 0;
    std::string probe_mode;
    bool alias_enabled = false;
    std::string alias_snapshot_dir;
    std::string convention;
    bool seed_free = true;
    CacheStats cache;
    StageTimings timings;
    ProbeSummary probe;
    std::map<std::string, std::string> relation_settings;  // relation -> summary
};

std::string manifest_to_json(const RunManifest& manifest);

struct RunResult {
    std::vector<SampleTrace> traces;
    std::optional<EvalReport> report;
    RunManifest manifest;
    int failed_samples = 0;
};

// Executes render -> complete -> parse -> probe -> resolve for every sample,
// concurrently up to options.inflight, with deterministic dataset-order
// output. A failing sample yields an empty answer set and the run goes on.
RunResult run_pipeline(const DatasetSplit& split, const TemplateLibrary& library,
                       const LMRequestParams& params, CachingClient& client,
                       const RunOptions& options);

// Predictions in the dataset record format with singleton alias groups.
void write_predictions(const std::filesystem::path& path, const RunResult& result);

// (relation, subject) -> predicted values.
using PredictionMap = std::map<std::pair<Relation, std::string>, std::set<std::string>>;
PredictionMap load_predictions(const std::filesystem::path& path);

// Per-sample diagnostics, one JSON object per line, dataset order.
void write_run_log(const std::filesystem::path& path, const RunResult& result);

// Score rows dumped as newline-delimited records for error analysis.
void write_score_rows(const std::filesystem::path& path, const EvalReport& report,
                      const DatasetSplit& split);

struct DeltaRow {
    RelationScore a;
    RelationScore b;
};

struct DeltaReport {
    std::map<Relation, DeltaRow> per_relation;
    DeltaRow overall;
    EmptyConvention convention;
};

// Scores two prediction files against the same gold split; both files must
// cover exactly the same (relation, subject) pairs.
DeltaReport compare_runs(const std::filesystem::path& predictions_a,
                         const std::filesystem::path& predictions_b, const DatasetSplit& gold,
                         EmptyConvention convention = EmptyConvention::kChallenge);

std::string render_delta(const DeltaReport& report);

// Global count of RNG draws made through the library; stays zero because the
// pipeline is RNG-free, and --seed-free asserts exactly that.
long long rng_draw_count();

}  // namespace lmkb
