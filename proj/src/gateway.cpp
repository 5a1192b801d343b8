#include "pestbench/gateway.hpp"

#include <unistd.h>

#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <thread>

#include <httplib.h>

#include "pestbench/errors.hpp"
#include "pestbench/hash.hpp"
#include "pestbench/text.hpp"
#include "pestbench/version.hpp"

namespace pestbench {

namespace fs = std::filesystem;
using nlohmann::json;

std::string_view to_string(ProviderKind kind) {
  switch (kind) {
    case ProviderKind::ChatCompletion: return "chat-completion";
    case ProviderKind::TextGeneration: return "text-generation";
    case ProviderKind::Replay: return "replay";
  }
  return "replay";
}

ProviderKind provider_kind_from_string(std::string_view id) {
  if (id == "chat-completion") return ProviderKind::ChatCompletion;
  if (id == "text-generation") return ProviderKind::TextGeneration;
  if (id == "replay") return ProviderKind::Replay;
  throw ConfigError("unknown provider kind: \"" + std::string(id) +
                    "\" (expected chat-completion, text-generation, or replay)");
}

std::string fingerprint(std::string_view model_name, std::string_view prompt_text,
                        const Sampling& sampling) {
  json request{
      {"max_tokens", sampling.max_tokens},
      {"model", std::string(model_name)},
      {"prompt", std::string(prompt_text)},
      {"temperature", sampling.temperature},
  };
  return sha256_hex(request.dump());
}

namespace {

std::string iso8601_utc_now() {
  std::time_t now = std::time(nullptr);
  std::tm utc{};
  gmtime_r(&now, &utc);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &utc);
  return buf;
}

std::string body_excerpt(const std::string& body) {
  constexpr std::size_t kMax = 500;
  if (body.size() <= kMax) return body;
  return body.substr(0, kMax) + "...";
}

struct SplitUrl {
  std::string base;  // scheme://host[:port]
  std::string path;  // /path, "/" when absent
};

SplitUrl split_url(const std::string& url) {
  auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw ConfigError("endpoint URL missing scheme: \"" + url + "\"");
  }
  auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

json build_request_body(const ModelConfig& config, std::string_view prompt_text) {
  json body{
      {"model", config.model_name},
      {"temperature", config.sampling.temperature},
      {"max_tokens", config.sampling.max_tokens},
  };
  if (config.provider_kind == ProviderKind::ChatCompletion) {
    body["messages"] = json::array(
        {json{{"role", "user"}, {"content", std::string(prompt_text)}}});
  } else {
    body["prompt"] = std::string(prompt_text);
  }
  return body;
}

std::string extract_text(const ModelConfig& config, const std::string& body) {
  json parsed;
  try {
    parsed = json::parse(body);
  } catch (const json::exception&) {
    throw ProviderError("provider returned non-JSON body: " + body_excerpt(body));
  }
  try {
    if (config.provider_kind == ProviderKind::ChatCompletion) {
      return parsed.at("choices").at(0).at("message").at("content").get<std::string>();
    }
    if (parsed.contains("choices")) {
      const json& first = parsed.at("choices").at(0);
      if (first.contains("text")) return first.at("text").get<std::string>();
      if (first.contains("generated_text")) return first.at("generated_text").get<std::string>();
    }
    if (parsed.is_array() && !parsed.empty() && parsed.at(0).contains("generated_text")) {
      return parsed.at(0).at("generated_text").get<std::string>();
    }
    if (parsed.contains("generated_text")) {
      return parsed.at("generated_text").get<std::string>();
    }
  } catch (const json::exception&) {
  }
  throw ProviderError("provider response has no completion text: " + body_excerpt(body));
}

bool is_retryable_status(int status) {
  return status == 408 || status == 429 || (status >= 500 && status < 600);
}

class SlotGuard {
 public:
  SlotGuard(std::mutex& mutex, std::condition_variable& cv, int& in_use, int limit)
      : mutex_(mutex), cv_(cv), in_use_(in_use) {
    std::unique_lock lock(mutex_);
    cv_.wait(lock, [&] { return in_use_ < limit; });
    ++in_use_;
  }
  ~SlotGuard() {
    {
      std::lock_guard lock(mutex_);
      --in_use_;
    }
    cv_.notify_one();
  }

 private:
  std::mutex& mutex_;
  std::condition_variable& cv_;
  int& in_use_;
};

}  // namespace

std::string ResponseCache::path_for(const std::string& request_fingerprint) const {
  return dir_ + "/" + request_fingerprint + ".json";
}

std::optional<CacheEntry> ResponseCache::read(const std::string& request_fingerprint) const {
  std::string path = path_for(request_fingerprint);
  std::error_code ec;
  if (!fs::exists(path, ec)) return std::nullopt;
  std::string raw = read_text_file(path);
  json parsed;
  try {
    parsed = json::parse(raw);
  } catch (const json::exception& e) {
    throw SchemaError(path + ": malformed cache entry: " + e.what());
  }
  if (!parsed.is_object() || !parsed.contains("request") || !parsed["request"].is_object() ||
      !parsed.contains("response") || !parsed["response"].is_object() ||
      !parsed["response"].contains("text") || !parsed["response"]["text"].is_string()) {
    throw SchemaError(path + ": malformed cache entry: missing request/response fields");
  }
  CacheEntry entry;
  entry.request = parsed["request"];
  entry.response_text = parsed["response"]["text"].get<std::string>();
  entry.metadata = parsed.value("metadata", json::object());
  return entry;
}

void ResponseCache::write(const std::string& request_fingerprint, const CacheEntry& entry) const {
  fs::create_directories(dir_);
  json out{
      {"request", entry.request},
      {"response", json{{"text", entry.response_text}}},
      {"metadata", entry.metadata},
  };
  static std::atomic<unsigned> counter{0};
  std::string tmp = dir_ + "/.tmp-" + request_fingerprint + "-" +
                    std::to_string(::getpid()) + "-" + std::to_string(counter++);
  write_text_file(tmp, out.dump(2) + "\n");
  fs::rename(tmp, path_for(request_fingerprint));
}

ModelGateway::ModelGateway(GatewayOptions options)
    : options_(std::move(options)), cache_(options_.cache_dir) {}

LlmResponse ModelGateway::complete(const ModelConfig& config, std::string_view prompt_text,
                                   bool force_refresh) {
  std::string fp = fingerprint(config.model_name, prompt_text, config.sampling);
  bool replay_mode = options_.replay || config.provider_kind == ProviderKind::Replay;

  if (replay_mode || !force_refresh) {
    if (auto entry = cache_.read(fp)) {
      LlmResponse response;
      response.request_fingerprint = fp;
      response.text = entry->response_text;
      response.latency_ms = 0;
      response.from_cache = true;
      response.timestamp = std::chrono::system_clock::now();
      return response;
    }
  }

  if (replay_mode) {
    throw CacheMissError("replay cache miss for request " + fp + " (model " +
                         config.model_name + "): expected " + cache_.path_for(fp));
  }

  if (!config.auth_env_var.empty()) {
    const char* credential = std::getenv(config.auth_env_var.c_str());
    if (credential == nullptr || *credential == '\0') {
      throw AuthError("credential environment variable " + config.auth_env_var +
                      " is not set (model " + config.model_name + ")");
    }
  }

  return call_live(config, prompt_text, fp);
}

LlmResponse ModelGateway::call_live(const ModelConfig& config, std::string_view prompt_text,
                                    const std::string& request_fingerprint) {
  SplitUrl url = split_url(config.endpoint_url);
  json request_body = build_request_body(config, prompt_text);
  std::string payload = request_body.dump();

  httplib::Headers headers;
  if (!config.auth_env_var.empty()) {
    headers.emplace("Authorization",
                    std::string("Bearer ") + std::getenv(config.auth_env_var.c_str()));
  }

  SlotGuard slot(slots_mutex_, slots_cv_, slots_in_use_, options_.max_concurrency);

  httplib::Client client(url.base);
  client.set_connection_timeout(10, 0);
  client.set_read_timeout(120, 0);

  int last_status = 0;
  std::string last_detail;
  auto start = std::chrono::steady_clock::now();

  for (int attempt = 0; attempt <= options_.max_retries; ++attempt) {
    if (attempt > 0) {
      long delay_ms = static_cast<long>(options_.backoff_base_ms) * (1L << (attempt - 1));
      std::this_thread::sleep_for(std::chrono::milliseconds(delay_ms));
    }

    long used = live_requests_.load();
    do {
      if (options_.max_requests > 0 && used >= options_.max_requests) {
        throw RequestBudgetError("live request budget of " +
                                 std::to_string(options_.max_requests) +
                                 " exhausted (model " + config.model_name + ")");
      }
    } while (!live_requests_.compare_exchange_weak(used, used + 1));

    httplib::Result result = client.Post(url.path, headers, payload, "application/json");
    if (!result) {
      last_status = 0;
      last_detail = "connection error: " + httplib::to_string(result.error());
      continue;
    }
    if (result->status == 401 || result->status == 403) {
      throw AuthError("provider rejected credentials with status " +
                      std::to_string(result->status) + " (model " + config.model_name +
                      "): " + body_excerpt(result->body));
    }
    if (is_retryable_status(result->status)) {
      last_status = result->status;
      last_detail = "status " + std::to_string(result->status) + ": " +
                    body_excerpt(result->body);
      continue;
    }
    if (result->status != 200) {
      throw ProviderError("provider returned status " + std::to_string(result->status) +
                          " (model " + config.model_name + "): " + body_excerpt(result->body));
    }

    std::string text = extract_text(config, result->body);
    auto elapsed = std::chrono::steady_clock::now() - start;
    long latency_ms =
        std::chrono::duration_cast<std::chrono::milliseconds>(elapsed).count();

    CacheEntry entry;
    entry.request = json{
        {"max_tokens", config.sampling.max_tokens},
        {"model", config.model_name},
        {"prompt", std::string(prompt_text)},
        {"temperature", config.sampling.temperature},
    };
    entry.response_text = text;
    entry.metadata = json{
        {"created_at", iso8601_utc_now()},
        {"latency_ms", latency_ms},
        {"provider_kind", std::string(to_string(config.provider_kind))},
        {"tool_version", kToolVersion},
    };
    cache_.write(request_fingerprint, entry);

    LlmResponse response;
    response.request_fingerprint = request_fingerprint;
    response.text = std::move(text);
    response.latency_ms = latency_ms;
    response.from_cache = false;
    response.timestamp = std::chrono::system_clock::now();
    return response;
  }

  std::string summary = "after " + std::to_string(options_.max_retries + 1) +
                        " attempts (model " + config.model_name + "): " + last_detail;
  if (last_status == 429) throw RateLimitedError("rate limited " + summary);
  throw ProviderError("request failed " + summary);
}

}  // namespace pestbench
