#include "lmkb/pipeline.hpp"

#include <atomic>
#include <chrono>
#include <fstream>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "lmkb/sha256.hpp"
#include "lmkb/text.hpp"
#include "lmkb/version.hpp"

namespace lmkb {

namespace {

using nlohmann::json;

std::atomic<long long> g_rng_draws{0};

AnswerSet resolve_answers(const AnswerSet& probed, const AliasIndex& index) {
    AnswerSet resolved;
    resolved.relation = probed.relation;
    resolved.subject = probed.subject;
    resolved.stage = Stage::kAliased;
    for (const auto& value : probed.values) {
        std::string label = resolve(value, index);
        if (label.empty() || text::is_none_token(label)) continue;
        resolved.values.insert(std::move(label));
    }
    return resolved;
}

json answer_values(const AnswerSet& set) {
    json groups = json::array();
    for (const auto& value : set.values) groups.push_back(json::array({value}));
    return groups;
}

}  // namespace

long long rng_draw_count() { return g_rng_draws.load(); }

RunResult run_pipeline(const DatasetSplit& split, const TemplateLibrary& library,
                       const LMRequestParams& params, CachingClient& client,
                       const RunOptions& options) {
    const auto started = std::chrono::steady_clock::now();

    // Resolve per-relation settings once, up front.
    std::map<Relation, RelationConfig> configs;
    std::map<Relation, PromptTemplate> templates;
    std::optional<std::map<Relation, AliasIndex>> alias_indexes;
    for (Relation relation : all_relations()) {
        RelationConfig config = library.config(relation);
        if (options.probe == ProbeMode::kOn) config.probing_enabled = true;
        if (options.probe == ProbeMode::kOff) config.probing_enabled = false;
        templates.emplace(relation, library.make_template(relation, options.style_override,
                                                          options.empty_override));
        configs.emplace(relation, std::move(config));
    }
    if (options.alias_snapshot_dir) {
        alias_indexes.emplace();
        for (Relation relation : all_relations()) {
            const auto path = *options.alias_snapshot_dir /
                              (std::string(relation_name(relation)) + ".jsonl");
            if (!std::filesystem::exists(path)) continue;
            const auto records = read_snapshot(path);
            alias_indexes->emplace(relation, build_index(records, configs.at(relation)));
        }
    }

    RunResult result;
    result.traces.resize(split.samples.size());

    std::atomic<size_t> next{0};
    std::atomic<int> failed{0};
    std::atomic<long long> complete_us{0}, parse_us{0}, probe_us{0}, alias_us{0};
    const int workers = std::max(1, options.inflight);

    using clock = std::chrono::steady_clock;
    auto elapsed_us = [](clock::time_point from) {
        return std::chrono::duration_cast<std::chrono::microseconds>(clock::now() - from).count();
    };

    auto worker = [&]() {
        for (;;) {
            const size_t i = next.fetch_add(1);
            if (i >= split.samples.size()) return;
            const Sample& sample = split.samples[i];
            SampleTrace& trace = result.traces[i];
            trace.subject = sample.subject;
            trace.relation = sample.relation;
            try {
                const RelationConfig& config = configs.at(sample.relation);
                const PromptTemplate& tmpl = templates.at(sample.relation);

                const std::string prompt = render_prompt(tmpl, sample.subject);
                auto t0 = clock::now();
                const Completion completion = client.complete(prompt, params);
                complete_us.fetch_add(elapsed_us(t0));
                trace.cached = completion.cached;

                t0 = clock::now();
                ParsedCompletion parsed =
                    parse_completion(completion.text, sample.relation, sample.subject);
                parse_us.fetch_add(elapsed_us(t0));
                trace.parsed = parsed.answers;
                trace.parse_diagnostic = parsed.malformed;
                trace.parse_note = parsed.note;

                AnswerSet current = parsed.answers;
                if (config.probing_enabled) {
                    t0 = clock::now();
                    ProbeResult probed = probe_answers(current, config, params, client);
                    probe_us.fetch_add(elapsed_us(t0));
                    trace.probe_outcomes = std::move(probed.outcomes);
                    current = std::move(probed.answers);
                }
                if (alias_indexes) {
                    auto it = alias_indexes->find(sample.relation);
                    if (it != alias_indexes->end()) {
                        t0 = clock::now();
                        current = resolve_answers(current, it->second);
                        alias_us.fetch_add(elapsed_us(t0));
                    }
                }
                trace.final_answers = std::move(current);
            } catch (const std::exception& e) {
                trace.failed = true;
                trace.error = e.what();
                trace.final_answers =
                    AnswerSet{sample.relation, sample.subject, {}, Stage::kParsed};
                failed.fetch_add(1);
            }
        }
    };

    if (workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    result.failed_samples = failed.load();

    if (options.predictions_path) {
        write_predictions(*options.predictions_path, result);
    }

    const auto score_started = clock::now();
    if (!options.test_mode) {
        std::vector<SampleScore> rows;
        rows.reserve(split.samples.size());
        for (size_t i = 0; i < split.samples.size(); ++i) {
            rows.push_back(score_sample(result.traces[i].final_answers, split.samples[i].gold,
                                        options.convention));
        }
        if (!rows.empty()) result.report = aggregate(std::move(rows), options.convention);
    }
    const long long score_us = elapsed_us(score_started);

    RunManifest& manifest = result.manifest;
    manifest.version = kArtifactVersion;
    manifest.dataset_name = split.name;
    manifest.sample_count = split.samples.size();
    manifest.backend = std::string(backend_kind_name(client.backend_kind()));
    manifest.params = params;
    manifest.inflight = workers;
    manifest.probe_mode = options.probe == ProbeMode::kAuto ? "auto"
                          : options.probe == ProbeMode::kOn ? "on"
                                                            : "off";
    manifest.alias_enabled = alias_indexes.has_value();
    if (options.alias_snapshot_dir) {
        manifest.alias_snapshot_dir = options.alias_snapshot_dir->string();
    }
    manifest.convention = std::string(empty_convention_name(options.convention));
    manifest.seed_free = rng_draw_count() == 0;
    manifest.cache = client.stats();

    // Probe accounting; with gold present this yields the share of removed
    // candidates that were indeed wrong (the filtering precision).
    for (size_t i = 0; i < result.traces.size(); ++i) {
        const SampleTrace& trace = result.traces[i];
        for (const auto& outcome : trace.probe_outcomes) {
            ++manifest.probe.probed;
            switch (outcome.verdict) {
                case ProbeVerdict::kKept: ++manifest.probe.kept; break;
                case ProbeVerdict::kIndeterminate: ++manifest.probe.indeterminate; break;
                case ProbeVerdict::kRemoved: {
                    ++manifest.probe.removed;
                    if (!options.test_mode) {
                        bool in_gold = false;
                        for (const auto& group : split.samples[i].gold) {
                            for (const auto& alias : group) {
                                if (alias == outcome.candidate) {
                                    in_gold = true;
                                    break;
                                }
                            }
                            if (in_gold) break;
                        }
                        if (!in_gold) ++manifest.probe.removed_not_in_gold;
                    }
                    break;
                }
            }
        }
    }
    if (!options.test_mode && manifest.probe.removed > 0) {
        manifest.probe.filter_precision = static_cast<double>(manifest.probe.removed_not_in_gold) /
                                          static_cast<double>(manifest.probe.removed);
    }

    for (const auto& [relation, config] : configs) {
        std::ostringstream summary;
        summary << "style=" << prompt_style_name(options.style_override.value_or(config.style))
                << " empty_mode="
                << empty_mode_name(options.empty_override.value_or(config.empty_mode))
                << " probe=" << (config.probing_enabled ? "on" : "off");
        manifest.relation_settings[std::string(relation_name(relation))] = summary.str();
    }
    manifest.timings.complete_ms = complete_us.load() / 1000;
    manifest.timings.parse_ms = parse_us.load() / 1000;
    manifest.timings.probe_ms = probe_us.load() / 1000;
    manifest.timings.alias_ms = alias_us.load() / 1000;
    manifest.timings.score_ms = score_us / 1000;
    manifest.timings.wall_ms =
        std::chrono::duration_cast<std::chrono::milliseconds>(clock::now() - started).count();
    return result;
}

std::string manifest_to_json(const RunManifest& m) {
    json j{
        {"version", m.version},
        {"dataset",
         {{"path", m.dataset_path},
          {"sha256", m.dataset_sha256},
          {"name", m.dataset_name},
          {"samples", m.sample_count}}},
        {"backend", m.backend},
        {"params",
         {{"model", m.params.model},
          {"temperature", m.params.temperature},
          {"max_tokens", m.params.max_tokens},
          {"top_p", m.params.top_p},
          {"frequency_penalty", m.params.frequency_penalty},
          {"presence_penalty", m.params.presence_penalty}}},
        {"inflight", m.inflight},
        {"probe_mode", m.probe_mode},
        {"alias", {{"enabled", m.alias_enabled}, {"snapshot_dir", m.alias_snapshot_dir}}},
        {"empty_convention", m.convention},
        {"seed_free", m.seed_free},
        {"cache", {{"hits", m.cache.hits}, {"misses", m.cache.misses}}},
        {"timings_ms",
         {{"complete", m.timings.complete_ms},
          {"parse", m.timings.parse_ms},
          {"probe", m.timings.probe_ms},
          {"alias", m.timings.alias_ms},
          {"score", m.timings.score_ms},
          {"wall", m.timings.wall_ms}}},
        {"probe",
         {{"probed", m.probe.probed},
          {"kept", m.probe.kept},
          {"removed", m.probe.removed},
          {"indeterminate", m.probe.indeterminate},
          {"removed_not_in_gold", m.probe.removed_not_in_gold}}},
        {"relations", m.relation_settings},
    };
    if (m.params.logprobs) j["params"]["logprobs"] = *m.params.logprobs;
    if (m.probe.filter_precision) j["probe"]["filter_precision"] = *m.probe.filter_precision;
    return j.dump(2) + "\n";
}

void write_predictions(const std::filesystem::path& path, const RunResult& result) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write predictions: " + path.string());
    for (const auto& trace : result.traces) {
        json record{
            {"SubjectEntity", trace.subject},
            {"Relation", std::string(relation_name(trace.relation))},
            {"ObjectEntities", answer_values(trace.final_answers)},
        };
        out << record.dump() << "\n";
    }
}

PredictionMap load_predictions(const std::filesystem::path& path) {
    // Prediction files reuse the dataset record format.
    DatasetSplit split = load_split(path, "predictions");
    PredictionMap map;
    for (const auto& sample : split.samples) {
        std::set<std::string> values;
        for (const auto& group : sample.gold) {
            values.insert(group.begin(), group.end());
        }
        map[{sample.relation, sample.subject}] = std::move(values);
    }
    return map;
}

void write_run_log(const std::filesystem::path& path, const RunResult& result) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write run log: " + path.string());
    for (const auto& trace : result.traces) {
        json line{
            {"subject", trace.subject},
            {"relation", std::string(relation_name(trace.relation))},
            {"stage", std::string(stage_name(trace.final_answers.stage))},
            {"parsed", trace.parsed.values},
            {"final", trace.final_answers.values},
            {"cached", trace.cached},
        };
        if (trace.parse_diagnostic) line["parse_diagnostic"] = trace.parse_note;
        if (!trace.probe_outcomes.empty()) {
            json outcomes = json::object();
            for (const auto& outcome : trace.probe_outcomes) {
                outcomes[outcome.candidate] = std::string(probe_verdict_name(outcome.verdict));
            }
            line["probe"] = std::move(outcomes);
        }
        if (trace.failed) line["error"] = trace.error;
        out << line.dump() << "\n";
    }
}

void write_score_rows(const std::filesystem::path& path, const EvalReport& report,
                      const DatasetSplit& split) {
    std::map<std::pair<Relation, std::string>, const std::vector<std::vector<std::string>>*> gold;
    for (const auto& sample : split.samples) {
        gold[{sample.relation, sample.subject}] = &sample.gold;
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write score rows: " + path.string());
    for (const auto& row : report.rows) {
        std::set<std::string> prediction = row.matched;
        prediction.insert(row.spurious.begin(), row.spurious.end());
        json record{
            {"SubjectEntity", row.subject},
            {"Relation", std::string(relation_name(row.relation))},
            {"Prediction", prediction},
        };
        auto it = gold.find({row.relation, row.subject});
        record["GroundTruth"] = it != gold.end() ? json(*it->second) : json::array();
        record["precision"] = row.precision;
        record["recall"] = row.recall;
        record["f1"] = row.f1;
        record["missed_groups"] = row.missed;
        out << record.dump() << "\n";
    }
}

DeltaReport compare_runs(const std::filesystem::path& predictions_a,
                         const std::filesystem::path& predictions_b, const DatasetSplit& gold,
                         EmptyConvention convention) {
    const PredictionMap a = load_predictions(predictions_a);
    const PredictionMap b = load_predictions(predictions_b);

    for (const auto& [key, values] : a) {
        if (b.find(key) == b.end()) {
            throw std::runtime_error("subject mismatch: " + key.second + " (" +
                                     std::string(relation_name(key.first)) + ") only in " +
                                     predictions_a.string());
        }
    }
    for (const auto& [key, values] : b) {
        if (a.find(key) == a.end()) {
            throw std::runtime_error("subject mismatch: " + key.second + " (" +
                                     std::string(relation_name(key.first)) + ") only in " +
                                     predictions_b.string());
        }
    }

    auto score_all = [&](const PredictionMap& preds) {
        std::vector<SampleScore> rows;
        for (const auto& sample : gold.samples) {
            auto it = preds.find({sample.relation, sample.subject});
            if (it == preds.end()) continue;  // gold rows absent from both files are skipped
            AnswerSet set{sample.relation, sample.subject, it->second, Stage::kParsed};
            rows.push_back(score_sample(set, sample.gold, convention));
        }
        if (rows.empty()) throw std::runtime_error("no overlapping subjects with the gold split");
        return aggregate(std::move(rows), convention);
    };

    const EvalReport report_a = score_all(a);
    const EvalReport report_b = score_all(b);

    DeltaReport delta;
    delta.convention = convention;
    delta.overall = {report_a.overall, report_b.overall};
    for (const auto& [relation, rs] : report_a.per_relation) {
        delta.per_relation[relation] = {rs, report_b.per_relation.at(relation)};
    }
    return delta;
}

std::string render_delta(const DeltaReport& report) {
    std::ostringstream out;
    out << "empty_convention: " << empty_convention_name(report.convention) << "\n";
    char buf[200];
    std::snprintf(buf, sizeof(buf), "%-26s  %23s  %23s  %23s\n", "Relation", "P (a/b/delta)",
                  "R (a/b/delta)", "F1 (a/b/delta)");
    out << buf;
    auto row = [&](const std::string& name, const DeltaRow& d) {
        auto cell = [](double va, double vb) {
            char c[48];
            std::snprintf(c, sizeof(c), "%.3f/%.3f/%+.3f", va, vb, vb - va);
            return std::string(c);
        };
        std::snprintf(buf, sizeof(buf), "%-26s  %23s  %23s  %23s\n", name.c_str(),
                      cell(d.a.precision, d.b.precision).c_str(),
                      cell(d.a.recall, d.b.recall).c_str(), cell(d.a.f1, d.b.f1).c_str());
        out << buf;
    };
    for (const auto& [relation, d] : report.per_relation) {
        row(std::string(relation_name(relation)), d);
    }
    row("AverageOverAllRelations", report.overall);
    return out.str();
}

}  // namespace lmkb
