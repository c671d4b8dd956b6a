#include "lmkb/backend.hpp"

#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <semaphore>
#include <sstream>
#include <thread>

#include "httplib.h"
#include "json.hpp"
#include "lmkb/sha256.hpp"

namespace lmkb {

namespace {

using nlohmann::json;

json params_to_json(const LMRequestParams& params) {
    json j{
        {"model", params.model},
        {"temperature", params.temperature},
        {"max_tokens", params.max_tokens},
        {"top_p", params.top_p},
        {"frequency_penalty", params.frequency_penalty},
        {"presence_penalty", params.presence_penalty},
    };
    if (params.logprobs) j["logprobs"] = *params.logprobs;
    return j;
}

LMRequestParams params_from_json(const json& j) {
    LMRequestParams p;
    p.model = j.value("model", p.model);
    p.temperature = j.value("temperature", p.temperature);
    p.max_tokens = j.value("max_tokens", p.max_tokens);
    p.top_p = j.value("top_p", p.top_p);
    p.frequency_penalty = j.value("frequency_penalty", p.frequency_penalty);
    p.presence_penalty = j.value("presence_penalty", p.presence_penalty);
    if (j.contains("logprobs") && !j["logprobs"].is_null()) {
        p.logprobs = j["logprobs"].get<int>();
    }
    return p;
}

std::string entry_path_for(const std::filesystem::path& dir, const std::string& digest) {
    return (dir / (digest + ".json")).string();
}

json read_entry_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open cache entry: " + path.string());
    json entry;
    in >> entry;
    return entry;
}

// Digest recomputed from an entry's stored fields; must equal the file stem.
std::string entry_digest(const json& entry) {
    return make_cache_key(params_from_json(entry.at("params")),
                          entry.at("prompt").get<std::string>())
        .digest;
}

std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

}  // namespace

std::string_view backend_kind_name(BackendKind k) {
    switch (k) {
        case BackendKind::kHttp: return "http";
        case BackendKind::kReplay: return "replay";
        case BackendKind::kMock: return "mock";
    }
    return "mock";
}

std::optional<BackendKind> backend_kind_from_name(std::string_view name) {
    if (name == "http") return BackendKind::kHttp;
    if (name == "replay") return BackendKind::kReplay;
    if (name == "mock") return BackendKind::kMock;
    return std::nullopt;
}

CacheKey make_cache_key(const LMRequestParams& params, const std::string& prompt) {
    json canonical = params_to_json(params);
    canonical["prompt"] = prompt;
    return CacheKey{sha256_hex(canonical.dump())};
}

std::string MockBackend::complete(const std::string& prompt, const LMRequestParams&) {
    auto it = responses_.find(prompt);
    if (it != responses_.end()) return it->second;
    if (fallback_) return fallback_(prompt);
    throw BackendError("mock backend has no response for the prompt");
}

std::string ReplayBackend::complete(const std::string& prompt, const LMRequestParams& params) {
    const CacheKey key = make_cache_key(params, prompt);
    const auto path = entry_path_for(fixture_dir_, key.digest);
    if (!std::filesystem::exists(path)) throw ReplayMissError(key.digest);
    return read_entry_file(path).at("text").get<std::string>();
}

HttpBackendOptions http_options_from_env() {
    HttpBackendOptions options;
    if (const char* key = std::getenv("LMKB_API_KEY")) options.api_key = key;
    if (const char* url = std::getenv("LMKB_BASE_URL")) {
        // A path component overrides the default endpoint path.
        std::string base = url;
        const size_t scheme = base.find("://");
        const size_t host_start = scheme == std::string::npos ? 0 : scheme + 3;
        const size_t slash = base.find('/', host_start);
        if (slash != std::string::npos && slash + 1 < base.size()) {
            options.endpoint_path = base.substr(slash);
            base = base.substr(0, slash);
        } else if (slash != std::string::npos) {
            base = base.substr(0, slash);
        }
        options.base_url = base;
    }
    return options;
}

struct HttpBackend::Impl {
    HttpBackendOptions options;
    std::counting_semaphore<256> inflight;

    explicit Impl(HttpBackendOptions opts)
        : options(std::move(opts)),
          inflight(std::max(1, std::min(options.max_inflight, 256))) {}
};

HttpBackend::HttpBackend(HttpBackendOptions options)
    : impl_(std::make_unique<Impl>(std::move(options))) {}

HttpBackend::~HttpBackend() = default;

std::string HttpBackend::complete(const std::string& prompt, const LMRequestParams& params) {
    impl_->inflight.acquire();
    struct Release {
        std::counting_semaphore<256>& sem;
        ~Release() { sem.release(); }
    } release{impl_->inflight};

    json body = params_to_json(params);
    body["prompt"] = prompt;
    const std::string payload = body.dump();

    const auto& opts = impl_->options;
    std::string last_error;
    int backoff_ms = opts.backoff_initial_ms;

    for (int attempt = 0; attempt <= opts.max_retries; ++attempt) {
        if (attempt > 0) {
            std::this_thread::sleep_for(std::chrono::milliseconds(backoff_ms));
            backoff_ms *= 2;
        }
        httplib::Client client(opts.base_url);
        client.set_connection_timeout(opts.connect_timeout_s, 0);
        client.set_read_timeout(opts.read_timeout_s, 0);
        httplib::Headers headers;
        if (!opts.api_key.empty()) headers.emplace("Authorization", "Bearer " + opts.api_key);

        auto res = client.Post(opts.endpoint_path, headers, payload, "application/json");
        if (!res) {
            last_error = "transport: " + httplib::to_string(res.error());
            continue;
        }
        if (res->status == 429 || res->status >= 500) {
            last_error = "status " + std::to_string(res->status);
            continue;
        }
        if (res->status != 200) {
            throw TransportError("completion request rejected with status " +
                                 std::to_string(res->status) + ": " + res->body);
        }
        try {
            json reply = json::parse(res->body);
            return reply.at("choices").at(0).at("text").get<std::string>();
        } catch (const json::exception& e) {
            throw TransportError(std::string("malformed completion response: ") + e.what());
        }
    }
    throw TransportError("completion request failed after " + std::to_string(opts.max_retries) +
                         " retries (" + last_error + ")");
}

ResponseCache::ResponseCache(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::filesystem::create_directories(dir_);
}

std::optional<std::string> ResponseCache::lookup(const CacheKey& key) const {
    const auto path = entry_path_for(dir_, key.digest);
    if (!std::filesystem::exists(path)) return std::nullopt;
    return read_entry_file(path).at("text").get<std::string>();
}

void ResponseCache::store(const CacheKey& key, const LMRequestParams& params,
                          const std::string& prompt, const std::string& text) const {
    json entry{
        {"params", params_to_json(params)},
        {"model", params.model},
        {"prompt", prompt},
        {"text", text},
        {"timestamp", utc_timestamp()},
    };
    const auto final_path = std::filesystem::path(entry_path_for(dir_, key.digest));
    // Pid+thread-id suffix keeps concurrent writers off each other's temp
    // file; rename makes the publish atomic and last-writer-wins is fine
    // because identical keys imply identical payloads.
    std::ostringstream tmp_name;
    tmp_name << key.digest << "." << ::getpid() << "." << std::this_thread::get_id() << ".tmp";
    const auto tmp_path = dir_ / tmp_name.str();
    {
        std::ofstream out(tmp_path);
        if (!out) throw std::runtime_error("cannot write cache entry: " + tmp_path.string());
        out << entry.dump(2) << "\n";
    }
    std::filesystem::rename(tmp_path, final_path);
}

CachingClient::CachingClient(std::shared_ptr<CompletionBackend> backend,
                             std::optional<std::filesystem::path> cache_dir)
    : backend_(std::move(backend)) {
    if (cache_dir) cache_.emplace(*cache_dir);
}

Completion CachingClient::complete(const std::string& prompt, const LMRequestParams& params) {
    if (prompt.empty()) throw std::invalid_argument("complete: empty prompt");
    const CacheKey key = make_cache_key(params, prompt);
    if (cache_) {
        if (auto text = cache_->lookup(key)) {
            hits_.fetch_add(1);
            return Completion{std::move(*text), true, backend_->kind()};
        }
    }
    std::string text = backend_->complete(prompt, params);
    if (cache_) cache_->store(key, params, prompt, text);
    misses_.fetch_add(1);
    return Completion{std::move(text), false, backend_->kind()};
}

int warm_cache(const std::filesystem::path& fixtures, const std::filesystem::path& cache_dir) {
    if (!std::filesystem::is_directory(fixtures)) {
        throw std::runtime_error("fixture directory not readable: " + fixtures.string());
    }
    ResponseCache cache(cache_dir);
    int imported = 0;
    std::vector<std::filesystem::path> entries;
    for (const auto& e : std::filesystem::directory_iterator(fixtures)) {
        if (e.path().extension() == ".json") entries.push_back(e.path());
    }
    std::sort(entries.begin(), entries.end());
    for (const auto& path : entries) {
        json entry = read_entry_file(path);
        const std::string digest = entry_digest(entry);
        if (digest != path.stem().string()) {
            throw std::runtime_error("corrupt fixture entry " + path.string() +
                                     ": content hashes to " + digest);
        }
        cache.store(CacheKey{digest}, params_from_json(entry.at("params")),
                    entry.at("prompt").get<std::string>(), entry.at("text").get<std::string>());
        ++imported;
    }
    return imported;
}

FsckReport fsck_cache(const std::filesystem::path& cache_dir) {
    FsckReport report;
    if (!std::filesystem::is_directory(cache_dir)) return report;
    std::vector<std::filesystem::path> entries;
    for (const auto& e : std::filesystem::directory_iterator(cache_dir)) {
        if (e.path().extension() == ".json") entries.push_back(e.path());
    }
    std::sort(entries.begin(), entries.end());
    for (const auto& path : entries) {
        ++report.checked;
        try {
            if (entry_digest(read_entry_file(path)) != path.stem().string()) {
                report.corrupt.push_back(path.filename().string());
            }
        } catch (const std::exception&) {
            report.corrupt.push_back(path.filename().string());
        }
    }
    return report;
}

}  // namespace lmkb
