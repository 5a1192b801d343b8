#pragma once

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

namespace pestbench {

enum class ProviderKind { ChatCompletion, TextGeneration, Replay };

std::string_view to_string(ProviderKind kind);
ProviderKind provider_kind_from_string(std::string_view id);  // throws ConfigError

struct Sampling {
  double temperature = 0.0;
  int max_tokens = 1024;

  bool operator==(const Sampling&) const = default;
};

struct ModelConfig {
  ProviderKind provider_kind = ProviderKind::Replay;
  std::string model_name;
  std::string display_name;  // report label; defaults to model_name when empty
  std::string endpoint_url;  // full URL including path, e.g. http://host:8080/v1/chat/completions
  Sampling sampling;
  std::string auth_env_var;  // empty means the endpoint needs no credential

  const std::string& label() const { return display_name.empty() ? model_name : display_name; }
};

struct LlmResponse {
  std::string request_fingerprint;
  std::string text;
  long latency_ms = 0;
  bool from_cache = false;
  std::chrono::system_clock::time_point timestamp;
};

// Digest over the canonical JSON of {max_tokens, model, prompt, temperature}.
std::string fingerprint(std::string_view model_name, std::string_view prompt_text,
                        const Sampling& sampling);

struct CacheEntry {
  nlohmann::json request;
  std::string response_text;
  nlohmann::json metadata;
};

// Content-addressed store: one JSON file per request fingerprint.
class ResponseCache {
 public:
  explicit ResponseCache(std::string dir) : dir_(std::move(dir)) {}

  std::string path_for(const std::string& request_fingerprint) const;
  // Throws SchemaError on a corrupt entry.
  std::optional<CacheEntry> read(const std::string& request_fingerprint) const;
  // Atomic: writes a temp file and renames it into place.
  void write(const std::string& request_fingerprint, const CacheEntry& entry) const;

  const std::string& dir() const { return dir_; }

 private:
  std::string dir_;
};

struct GatewayOptions {
  std::string cache_dir = "cache";
  bool replay = false;   // treat every provider as replay
  int max_retries = 3;   // additional attempts after the first
  int backoff_base_ms = 250;
  int max_concurrency = 4;      // in-flight live requests
  long max_requests = 0;        // live-request budget; 0 = unlimited
};

// Uniform completion access with disk caching, deterministic replay,
// bounded concurrency, and retry with exponential backoff. Safe for
// concurrent use.
class ModelGateway {
 public:
  explicit ModelGateway(GatewayOptions options);

  // Returns the completion for the prompt, consulting the cache first.
  // force_refresh skips the cache read for live providers (the judge retry
  // path); replay ignores it. Throws AuthError, RateLimitedError,
  // ProviderError, CacheMissError, RequestBudgetError.
  LlmResponse complete(const ModelConfig& config, std::string_view prompt_text,
                       bool force_refresh = false);

  const GatewayOptions& options() const { return options_; }
  const ResponseCache& cache() const { return cache_; }
  long live_requests() const { return live_requests_.load(); }

 private:
  LlmResponse call_live(const ModelConfig& config, std::string_view prompt_text,
                        const std::string& request_fingerprint);

  GatewayOptions options_;
  ResponseCache cache_;
  std::atomic<long> live_requests_{0};

  std::mutex slots_mutex_;
  std::condition_variable slots_cv_;
  int slots_in_use_ = 0;
};

}  // namespace pestbench
