#pragma once

#include <atomic>
#include <chrono>
#include <deque>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <semaphore>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "vrank/error.hpp"

namespace vrank {

enum class ProviderKind { http_chat, mock };

struct ProviderConfig {
  ProviderKind provider = ProviderKind::mock;
  std::string endpoint = "https://api.openai.com/v1/chat/completions";
  std::string api_key_env = "OPENAI_API_KEY";  // credentials come from the environment only
  std::string model = "mock";
  std::optional<double> temperature;  // absent: provider default
  int max_concurrent_requests = 4;
  int retry_limit = 2;
  std::filesystem::path cache_dir;    // empty: no cache
  std::filesystem::path mock_script;  // file, or directory of <problem-id>.json
  std::chrono::milliseconds backoff{500};
  std::chrono::seconds request_timeout{120};

  /// Throws Error{invalid_config}.
  void validate() const;
};

enum class PromptKind { candidate, test_cases, reasoning, summary };
std::string to_string(PromptKind kind);
PromptKind prompt_kind_from_string(const std::string& text);

struct ChatMessage {
  std::string role;
  std::string content;
};

struct ChatRequest {
  PromptKind kind = PromptKind::candidate;
  std::vector<ChatMessage> messages;
  std::string model;
  std::optional<double> temperature;
  int attempt = 0;
};

/// Provider failure. Transient failures (network, 429, 5xx) are retried by
/// the gateway; the rest surface immediately.
class ProviderError : public Error {
 public:
  ProviderError(const std::string& what, bool transient)
      : Error(Errc::provider_unreachable, what), transient_(transient) {}
  bool transient() const noexcept { return transient_; }

 private:
  bool transient_;
};

class ChatProvider {
 public:
  virtual ~ChatProvider() = default;
  virtual std::string complete(const ChatRequest& request) = 0;
  virtual std::string name() const = 0;
  /// True when responses depend on call order, forcing sequential dispatch.
  virtual bool ordered() const { return false; }
};

/// Replays canned responses, in order, per prompt kind. Script format is a JSON
/// list of {"kind": "...", "response": "..."} objects, or an object mapping
/// each kind to a list of responses.
class MockProvider : public ChatProvider {
 public:
  explicit MockProvider(std::map<PromptKind, std::deque<std::string>> script);
  static std::shared_ptr<MockProvider> from_json(const nlohmann::json& script);
  static std::shared_ptr<MockProvider> from_file(const std::filesystem::path& path);

  std::string complete(const ChatRequest& request) override;
  std::string name() const override { return "mock"; }
  bool ordered() const override { return true; }

  int calls() const { return calls_.load(); }
  std::size_t remaining(PromptKind kind) const;

 private:
  mutable std::mutex mutex_;
  std::map<PromptKind, std::deque<std::string>> script_;
  std::atomic<int> calls_{0};
};

/// OpenAI-compatible chat-completions client: POSTs
/// {"model", "messages", "temperature"?} and reads choices[0].message.content.
class HttpChatProvider : public ChatProvider {
 public:
  explicit HttpChatProvider(const ProviderConfig& cfg);
  std::string complete(const ChatRequest& request) override;
  std::string name() const override { return "http_chat"; }

 private:
  std::string scheme_host_port_;
  std::string path_;
  std::string api_key_;
  std::chrono::seconds timeout_;
};

class ResponseCache {
 public:
  explicit ResponseCache(std::filesystem::path dir);
  /// Digest over the message texts, model, temperature and attempt index.
  static std::string key_for(const ChatRequest& request, const std::string& provider);
  std::optional<std::string> get(const std::string& key) const;
  void put(const std::string& key, const std::string& response) const;

 private:
  std::filesystem::path dir_;
};

struct PromptTemplates {
  std::string candidate;
  std::string test_cases;
  std::string reasoning;
  std::string summary;

  /// The templates under prompts/, embedded at build time.
  static PromptTemplates defaults();
  /// Reads <kind>.txt from `dir`, falling back to the default for missing files.
  static PromptTemplates load(const std::filesystem::path& dir);
  const std::string& get(PromptKind kind) const;
};

/// Replaces {name} placeholders present in `values`; other braces are left alone.
std::string render(const std::string& tmpl, const std::map<std::string, std::string>& values);

/// Provider dispatch with response caching, retry with exponential backoff
/// and a bound on concurrent requests. Callable from multiple threads.
class Gateway {
 public:
  Gateway(ProviderConfig cfg, std::shared_ptr<ChatProvider> provider,
          PromptTemplates templates = PromptTemplates::defaults());

  /// Builds the configured provider. A mock script directory resolves to
  /// <dir>/<problem_id>.json.
  static Gateway from_config(const ProviderConfig& cfg, const PromptTemplates& templates,
                             const std::string& problem_id = "");

  std::string complete(const ChatRequest& request);

  /// Runs fn(0..count-1), concurrently up to the request bound unless the
  /// provider is order-sensitive. Results keep index order; the first
  /// exception is rethrown after all tasks finish.
  template <typename Fn>
  auto map_attempts(int count, Fn fn) -> std::vector<decltype(fn(0))>;

  ChatRequest request(PromptKind kind, std::vector<ChatMessage> messages, int attempt) const;

  const ProviderConfig& config() const { return cfg_; }
  const PromptTemplates& templates() const { return templates_; }
  const ChatProvider& provider() const { return *provider_; }
  int provider_calls() const { return shared_->provider_calls.load(); }
  int cache_hits() const { return shared_->cache_hits.load(); }

 private:
  struct Shared {
    explicit Shared(int limit) : slots(limit) {}
    std::counting_semaphore<1024> slots;
    std::atomic<int> provider_calls{0};
    std::atomic<int> cache_hits{0};
  };

  ProviderConfig cfg_;
  std::shared_ptr<ChatProvider> provider_;
  PromptTemplates templates_;
  std::optional<ResponseCache> cache_;
  std::shared_ptr<Shared> shared_;
};

template <typename Fn>
auto Gateway::map_attempts(int count, Fn fn) -> std::vector<decltype(fn(0))> {
  using R = decltype(fn(0));
  std::vector<std::optional<R>> slots(static_cast<std::size_t>(std::max(count, 0)));
  std::exception_ptr error;
  std::mutex error_mutex;
  auto run = [&](int i) {
    try {
      slots[static_cast<std::size_t>(i)] = fn(i);
    } catch (...) {
      std::lock_guard lock(error_mutex);
      if (!error) error = std::current_exception();
    }
  };
  const int workers = provider_->ordered() ? 1 : std::min(count, cfg_.max_concurrent_requests);
  if (workers <= 1) {
    for (int i = 0; i < count; ++i) run(i);
  } else {
    std::atomic<int> next{0};
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (int i = next++; i < count; i = next++) run(i);
      });
  }
  if (error) std::rethrow_exception(error);
  std::vector<R> out;
  out.reserve(slots.size());
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

}  // namespace vrank
