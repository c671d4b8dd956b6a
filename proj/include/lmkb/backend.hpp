#pragma once

#include <atomic>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace lmkb {

// Decoding parameters forwarded to the completion endpoint. logprobs is
// accepted and sent on the wire; returned values are never consumed.
struct LMRequestParams {
    std::string model = "davinci";
    double temperature = 0.0;
    int max_tokens = 100;
    double top_p = 1.0;
    double frequency_penalty = 0.0;
    double presence_penalty = 0.0;
    std::optional<int> logprobs;
};

enum class BackendKind { kHttp, kReplay, kMock };

std::string_view backend_kind_name(BackendKind k);
std::optional<BackendKind> backend_kind_from_name(std::string_view name);

struct Completion {
    std::string text;  // raw completion, untrimmed
    bool cached = false;
    BackendKind backend = BackendKind::kMock;
};

struct CacheKey {
    std::string digest;  // 64 hex chars
};

// SHA-256 over the canonical serialization of (model, params, prompt);
// identical inputs always produce the same key.
CacheKey make_cache_key(const LMRequestParams& params, const std::string& prompt);

class BackendError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

class TransportError : public BackendError {
    using BackendError::BackendError;
};

class ReplayMissError : public BackendError {
  public:
    explicit ReplayMissError(const std::string& digest)
        : BackendError("replay miss: no fixture for digest " + digest), digest_(digest) {}
    const std::string& digest() const { return digest_; }

  private:
    std::string digest_;
};

class CompletionBackend {
  public:
    virtual ~CompletionBackend() = default;
    virtual std::string complete(const std::string& prompt, const LMRequestParams& params) = 0;
    virtual BackendKind kind() const = 0;
};

// Deterministic in-process backend: an explicit prompt->text table plus an
// optional fallback function for prompts outside the table.
class MockBackend : public CompletionBackend {
  public:
    MockBackend() = default;
    explicit MockBackend(std::map<std::string, std::string> responses)
        : responses_(std::move(responses)) {}
    explicit MockBackend(std::function<std::string(const std::string&)> fallback)
        : fallback_(std::move(fallback)) {}

    void add_response(std::string prompt, std::string text) {
        responses_[std::move(prompt)] = std::move(text);
    }

    std::string complete(const std::string& prompt, const LMRequestParams& params) override;
    BackendKind kind() const override { return BackendKind::kMock; }

  private:
    std::map<std::string, std::string> responses_;
    std::function<std::string(const std::string&)> fallback_;
};

// Serves only pre-recorded entries from a fixture directory in the cache
// entry format; a prompt without a fixture raises ReplayMissError.
class ReplayBackend : public CompletionBackend {
  public:
    explicit ReplayBackend(std::filesystem::path fixture_dir)
        : fixture_dir_(std::move(fixture_dir)) {}

    std::string complete(const std::string& prompt, const LMRequestParams& params) override;
    BackendKind kind() const override { return BackendKind::kReplay; }

  private:
    std::filesystem::path fixture_dir_;
};

struct HttpBackendOptions {
    std::string base_url = "https://api.openai.com";
    std::string endpoint_path = "/v1/completions";
    std::string api_key;  // from the environment by default
    int max_inflight = 4;
    int max_retries = 3;
    int connect_timeout_s = 10;
    int read_timeout_s = 120;
    int backoff_initial_ms = 500;
};

HttpBackendOptions http_options_from_env();

// POSTs {model, prompt, params...} with bearer auth, retrying transport
// failures, 5xx and 429 with exponential backoff.
class HttpBackend : public CompletionBackend {
  public:
    explicit HttpBackend(HttpBackendOptions options);
    ~HttpBackend() override;

    std::string complete(const std::string& prompt, const LMRequestParams& params) override;
    BackendKind kind() const override { return BackendKind::kHttp; }

  private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

struct CacheStats {
    long long hits = 0;
    long long misses = 0;
};

// One file per entry named by digest; writes are write-temp-then-rename so
// concurrent writers of the same key are safe (identical payloads).
class ResponseCache {
  public:
    explicit ResponseCache(std::filesystem::path dir);

    std::optional<std::string> lookup(const CacheKey& key) const;
    void store(const CacheKey& key, const LMRequestParams& params, const std::string& prompt,
               const std::string& text) const;

    const std::filesystem::path& dir() const { return dir_; }

  private:
    std::filesystem::path dir_;
};

// Cache-first completion front end shared by all backends.
class CachingClient {
  public:
    CachingClient(std::shared_ptr<CompletionBackend> backend,
                  std::optional<std::filesystem::path> cache_dir);

    Completion complete(const std::string& prompt, const LMRequestParams& params);

    BackendKind backend_kind() const { return backend_->kind(); }
    CacheStats stats() const { return {hits_.load(), misses_.load()}; }

  private:
    std::shared_ptr<CompletionBackend> backend_;
    std::optional<ResponseCache> cache_;
    std::atomic<long long> hits_{0};
    std::atomic<long long> misses_{0};
};

// Imports fixture entries into a cache directory, validating that each file
// name matches the digest recomputed from its content. Additive, idempotent;
// returns the number of entries imported.
int warm_cache(const std::filesystem::path& fixtures, const std::filesystem::path& cache_dir);

struct FsckReport {
    int checked = 0;
    std::vector<std::string> corrupt;  // file names whose digest does not match
};

FsckReport fsck_cache(const std::filesystem::path& cache_dir);

}  // namespace lmkb
