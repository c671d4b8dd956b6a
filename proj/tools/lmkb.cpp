#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "lmkb/alias.hpp"
#include "lmkb/backend.hpp"
#include "lmkb/dataset.hpp"
#include "lmkb/evaluator.hpp"
#include "lmkb/fixtures.hpp"
#include "lmkb/pipeline.hpp"
#include "lmkb/prompt.hpp"
#include "lmkb/sha256.hpp"
#include "lmkb/version.hpp"

namespace {

namespace fs = std::filesystem;
using namespace lmkb;

constexpr int kExitClean = 0;
constexpr int kExitPartialFailures = 1;
constexpr int kExitConfigError = 2;

struct GlobalArgs {
    std::string dataset;
    std::string relations;  // comma list, empty = all
    std::string config_dir = "config/relations";
    std::string backend = "mock";
    std::string cache_dir;
    std::string out_dir = "out";
    bool seed_free = false;
};

DatasetSplit filter_relations(DatasetSplit split, const std::string& relations_csv) {
    if (relations_csv.empty()) return split;
    std::set<Relation> keep;
    std::stringstream ss(relations_csv);
    std::string name;
    while (std::getline(ss, name, ',')) {
        const auto relation = relation_from_name(name);
        if (!relation) throw std::runtime_error("unknown relation in --relations: " + name);
        keep.insert(*relation);
    }
    DatasetSplit out;
    out.name = split.name;
    for (auto& sample : split.samples) {
        if (keep.count(sample.relation) != 0) out.samples.push_back(std::move(sample));
    }
    return out;
}

std::shared_ptr<CompletionBackend> make_backend(const std::string& kind,
                                                const std::string& replay_dir,
                                                const std::string& mock_completion,
                                                int max_inflight) {
    const auto parsed = backend_kind_from_name(kind);
    if (!parsed) throw std::runtime_error("unknown backend: " + kind);
    switch (*parsed) {
        case BackendKind::kMock: {
            std::string text = mock_completion;
            return std::make_shared<MockBackend>(
                [text](const std::string&) { return text; });
        }
        case BackendKind::kReplay:
            if (replay_dir.empty()) {
                throw std::runtime_error("replay backend needs --replay-dir or --cache-dir");
            }
            return std::make_shared<ReplayBackend>(replay_dir);
        case BackendKind::kHttp: {
            HttpBackendOptions options = http_options_from_env();
            options.max_inflight = max_inflight;
            return std::make_shared<HttpBackend>(std::move(options));
        }
    }
    throw std::runtime_error("unknown backend: " + kind);
}

void assert_seed_free() {
    if (rng_draw_count() != 0) {
        throw std::runtime_error("--seed-free violated: the run drew random numbers");
    }
}

int cmd_run(const GlobalArgs& g, const LMRequestParams& params, const RunOptions& opts_in,
            const std::string& replay_dir, const std::string& mock_completion, bool dump_rows) {
    RunOptions options = opts_in;
    const TemplateLibrary library = TemplateLibrary::load(g.config_dir);
    DatasetSplit split = filter_relations(load_split(g.dataset, "run"), g.relations);

    std::string replay = replay_dir.empty() ? g.cache_dir : replay_dir;
    auto backend = make_backend(g.backend, replay, mock_completion, options.inflight);
    std::optional<fs::path> cache_dir;
    if (!g.cache_dir.empty()) cache_dir = fs::path(g.cache_dir);
    CachingClient client(std::move(backend), cache_dir);

    fs::create_directories(g.out_dir);
    const fs::path out(g.out_dir);
    options.predictions_path = out / "predictions.jsonl";

    RunResult result = run_pipeline(split, library, params, client, options);
    result.manifest.dataset_path = g.dataset;
    result.manifest.dataset_sha256 = sha256_file_hex(g.dataset);
    if (g.seed_free) assert_seed_free();

    write_run_log(out / "run.log", result);
    {
        std::ofstream manifest(out / "manifest.json");
        manifest << manifest_to_json(result.manifest);
    }
    if (result.report) {
        std::ofstream tsv(out / "report.tsv");
        tsv << report_tsv(*result.report);
        std::ofstream txt(out / "report.txt");
        txt << report_table(*result.report);
        std::cout << report_table(*result.report);
        if (dump_rows) write_score_rows(out / "rows.jsonl", *result.report, split);
    } else {
        std::cout << "predictions written (test mode, no scoring)\n";
    }
    std::cerr << "samples: " << split.samples.size() << ", failed: " << result.failed_samples
              << ", cache hits: " << result.manifest.cache.hits
              << ", misses: " << result.manifest.cache.misses << "\n";
    return result.failed_samples == 0 ? kExitClean : kExitPartialFailures;
}

int cmd_score(const GlobalArgs& g, const std::string& predictions, EmptyConvention convention,
              bool dump_rows) {
    DatasetSplit gold = filter_relations(load_split(g.dataset, "gold"), g.relations);
    const PredictionMap preds = load_predictions(predictions);

    std::vector<SampleScore> rows;
    for (const auto& sample : gold.samples) {
        auto it = preds.find({sample.relation, sample.subject});
        if (it == preds.end()) {
            throw std::runtime_error("missing prediction for subject: " + sample.subject);
        }
        AnswerSet set{sample.relation, sample.subject, it->second, Stage::kParsed};
        rows.push_back(score_sample(set, sample.gold, convention));
    }
    if (rows.empty()) throw std::runtime_error("gold split is empty");
    const EvalReport report = aggregate(std::move(rows), convention);
    std::cout << report_table(report);
    if (dump_rows) {
        fs::create_directories(g.out_dir);
        write_score_rows(fs::path(g.out_dir) / "rows.jsonl", report, gold);
    }
    return kExitClean;
}

int cmd_stats(const GlobalArgs& g) {
    const DatasetSplit split = filter_relations(load_split(g.dataset, "stats"), g.relations);
    std::cout << stats_table(compute_stats(split));
    return kExitClean;
}

int cmd_aliases_build(const GlobalArgs& g, const std::string& relation_name_arg,
                      const std::string& endpoint, const std::string& out_dir, int page_size,
                      long long max_records) {
    const auto relation = relation_from_name(relation_name_arg);
    if (!relation) throw std::runtime_error("unknown relation: " + relation_name_arg);
    const TemplateLibrary library = TemplateLibrary::load(g.config_dir);

    FetchOptions options;
    options.endpoint = endpoint;
    options.page_size = page_size;
    options.max_records = max_records;
    const FetchResult result = fetch_records(options, library.config(*relation));

    fs::create_directories(out_dir);
    const auto path = fs::path(out_dir) / (relation_name_arg + ".jsonl");
    write_snapshot(path, result.records);
    std::cout << "wrote " << result.records.size() << " records to " << path.string() << " ("
              << result.pages << " pages, " << result.malformed_rows << " malformed rows)\n";
    return kExitClean;
}

int cmd_aliases_verify(const std::string& dir) {
    int files = 0;
    bool ok = true;
    std::vector<fs::path> paths;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.path().extension() == ".jsonl") paths.push_back(entry.path());
    }
    std::sort(paths.begin(), paths.end());
    for (const auto& path : paths) {
        ++files;
        try {
            const auto records = read_snapshot(path);
            std::set<std::string> ids;
            int duplicates = 0;
            for (const auto& record : records) {
                if (!ids.insert(record.entity_id).second) ++duplicates;
            }
            std::cout << path.filename().string() << ": " << records.size() << " records, "
                      << duplicates << " duplicate ids\n";
        } catch (const std::exception& e) {
            ok = false;
            std::cout << path.filename().string() << ": INVALID (" << e.what() << ")\n";
        }
    }
    if (files == 0) std::cout << "no snapshot files in " << dir << "\n";
    return ok ? kExitClean : kExitConfigError;
}

int cmd_compare(const GlobalArgs& g, const std::string& a, const std::string& b,
                EmptyConvention convention) {
    const DatasetSplit gold = filter_relations(load_split(g.dataset, "gold"), g.relations);
    const DeltaReport report = compare_runs(a, b, gold, convention);
    std::cout << render_delta(report);
    return kExitClean;
}

int cmd_cache_warm(const std::string& fixtures, const std::string& cache_dir) {
    const int imported = warm_cache(fixtures, cache_dir);
    std::cout << "imported " << imported << " entries into " << cache_dir << "\n";
    return kExitClean;
}

int cmd_cache_fsck(const std::string& cache_dir) {
    const FsckReport report = fsck_cache(cache_dir);
    std::cout << "checked " << report.checked << " entries, " << report.corrupt.size()
              << " corrupt\n";
    for (const auto& name : report.corrupt) std::cout << "corrupt: " << name << "\n";
    return report.corrupt.empty() ? kExitClean : kExitConfigError;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Knowledge base construction from language-model completions"};
    app.set_version_flag("--version", std::string(kArtifactVersion));
    app.fallthrough(true);
    app.require_subcommand(1);

    GlobalArgs g;
    app.add_option("--dataset", g.dataset, "Newline-delimited dataset records");
    app.add_option("--relations", g.relations, "Comma list of relations to keep");
    app.add_option("--config", g.config_dir, "Relation config directory")
        ->capture_default_str();
    app.add_option("--backend", g.backend, "Completion backend: http|replay|mock")
        ->capture_default_str();
    app.add_option("--cache-dir", g.cache_dir, "Content-addressed response cache directory");
    app.add_option("--out", g.out_dir, "Output directory")->capture_default_str();
    app.add_flag("--seed-free", g.seed_free, "Assert that the run draws no random numbers");

    LMRequestParams params;
    RunOptions run_options;
    std::string style_name;
    std::string empty_mode_name_arg;
    std::string probe_name = "auto";
    std::string convention_name = "challenge";
    std::string alias_dir;
    std::string replay_dir;
    std::string mock_completion = "[]";
    bool dump_rows = false;

    CLI::App* run = app.add_subcommand("run", "Run the full prediction pipeline");
    run->add_option("--model", params.model)->capture_default_str();
    run->add_option("--temperature", params.temperature)->capture_default_str();
    run->add_option("--max-tokens", params.max_tokens)->capture_default_str();
    run->add_option("--top-p", params.top_p)->capture_default_str();
    run->add_option("--frequency-penalty", params.frequency_penalty)->capture_default_str();
    run->add_option("--presence-penalty", params.presence_penalty)->capture_default_str();
    run->add_option("--logprobs", [&params](const CLI::results_t& values) {
        params.logprobs = std::stoi(values.at(0));
        return true;
    }, "Forwarded on the wire; returned values are ignored");
    run->add_option("--style", style_name, "Override prompt style: natural_language|triple");
    run->add_option("--empty-mode", empty_mode_name_arg,
                    "Override empty representation: empty_list|none_string");
    run->add_option("--probe", probe_name, "on|off|auto (auto = per-relation defaults)")
        ->capture_default_str();
    run->add_option("--aliases", alias_dir, "Alias snapshot directory (enables resolution)");
    run->add_option("--max-inflight", run_options.inflight, "Concurrent samples")
        ->capture_default_str();
    run->add_flag("--test-mode", run_options.test_mode, "Emit predictions only, no scoring");
    run->add_option("--empty-convention", convention_name, "challenge|strict")
        ->capture_default_str();
    run->add_option("--replay-dir", replay_dir, "Fixture directory for the replay backend");
    run->add_option("--mock-completion", mock_completion,
                    "Constant completion text served by the mock backend")
        ->capture_default_str();
    run->add_flag("--dump-rows", dump_rows, "Write per-sample score rows");

    std::string predictions;
    CLI::App* score = app.add_subcommand("score", "Score an existing predictions file");
    score->add_option("--predictions", predictions, "Predictions file")->required();
    score->add_option("--empty-convention", convention_name, "challenge|strict")
        ->capture_default_str();
    score->add_flag("--dump-rows", dump_rows, "Write per-sample score rows");

    app.add_subcommand("stats", "Per-relation cardinality statistics");

    CLI::App* aliases = app.add_subcommand("aliases", "Alias snapshot tools");
    aliases->require_subcommand(1);
    std::string alias_relation, alias_endpoint, alias_out = "aliases";
    int alias_page_size = 2000;
    long long alias_max_records = 200000;
    CLI::App* aliases_build = aliases->add_subcommand("build", "Fetch a typed alias snapshot");
    aliases_build->add_option("--relation", alias_relation)->required();
    aliases_build->add_option("--endpoint", alias_endpoint, "SPARQL query service URL")->required();
    aliases_build->add_option("--out", alias_out)->capture_default_str();
    aliases_build->add_option("--page-size", alias_page_size)->capture_default_str();
    aliases_build->add_option("--max-records", alias_max_records)->capture_default_str();
    std::string alias_verify_dir;
    CLI::App* aliases_verify = aliases->add_subcommand("verify", "Validate snapshot files");
    aliases_verify->add_option("dir", alias_verify_dir, "Snapshot directory")->required();

    std::string compare_a, compare_b;
    CLI::App* compare = app.add_subcommand("compare", "Delta report between two prediction files");
    compare->add_option("--a", compare_a)->required();
    compare->add_option("--b", compare_b)->required();
    compare->add_option("--empty-convention", convention_name)->capture_default_str();

    CLI::App* cache = app.add_subcommand("cache", "Response cache tools");
    cache->require_subcommand(1);
    std::string warm_fixtures;
    CLI::App* cache_warm_cmd = cache->add_subcommand("warm", "Import fixture entries");
    cache_warm_cmd->add_option("--fixtures", warm_fixtures)->required();
    cache->add_subcommand("fsck", "Recompute digests over every cache entry");

    CLI11_PARSE(app, argc, argv);

    try {
        if (!style_name.empty()) {
            const auto style = prompt_style_from_name(style_name);
            if (!style) throw std::runtime_error("unknown style: " + style_name);
            run_options.style_override = style;
        }
        if (!empty_mode_name_arg.empty()) {
            const auto mode = empty_mode_from_name(empty_mode_name_arg);
            if (!mode) throw std::runtime_error("unknown empty mode: " + empty_mode_name_arg);
            run_options.empty_override = mode;
        }
        if (probe_name == "on") {
            run_options.probe = ProbeMode::kOn;
        } else if (probe_name == "off") {
            run_options.probe = ProbeMode::kOff;
        } else if (probe_name == "auto") {
            run_options.probe = ProbeMode::kAuto;
        } else {
            throw std::runtime_error("--probe must be on, off or auto");
        }
        const auto convention = empty_convention_from_name(convention_name);
        if (!convention) throw std::runtime_error("unknown convention: " + convention_name);
        run_options.convention = *convention;
        if (!alias_dir.empty()) run_options.alias_snapshot_dir = fs::path(alias_dir);

        auto need_dataset = [&]() {
            if (g.dataset.empty()) throw std::runtime_error("--dataset is required");
        };

        if (run->parsed()) {
            need_dataset();
            return cmd_run(g, params, run_options, replay_dir, mock_completion, dump_rows);
        }
        if (score->parsed()) {
            need_dataset();
            return cmd_score(g, predictions, *convention, dump_rows);
        }
        if (app.get_subcommand("stats")->parsed()) {
            need_dataset();
            return cmd_stats(g);
        }
        if (aliases->parsed()) {
            if (aliases_build->parsed()) {
                return cmd_aliases_build(g, alias_relation, alias_endpoint, alias_out,
                                         alias_page_size, alias_max_records);
            }
            return cmd_aliases_verify(alias_verify_dir);
        }
        if (compare->parsed()) {
            need_dataset();
            return cmd_compare(g, compare_a, compare_b, *convention);
        }
        if (cache->parsed()) {
            if (g.cache_dir.empty()) throw std::runtime_error("--cache-dir is required");
            if (cache_warm_cmd->parsed()) return cmd_cache_warm(warm_fixtures, g.cache_dir);
            return cmd_cache_fsck(g.cache_dir);
        }
        throw std::runtime_error("no subcommand selected");
    } catch (const DatasetError& e) {
        std::cerr << "dataset error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfigError;
    }
}
