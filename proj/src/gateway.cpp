#include "vrank/gateway.hpp"

#include <cstdlib>
#include <fstream>
#include <regex>
#include <sstream>

#include <httplib.h>

#include "prompts_embedded.hpp"
#include "vrank/digest.hpp"
#include "vrank/json_io.hpp"

namespace vrank {

namespace fs = std::filesystem;

namespace {

constexpr PromptKind kAllKinds[] = {PromptKind::candidate, PromptKind::test_cases, PromptKind::reasoning,
                                    PromptKind::summary};

class SlotGuard {
 public:
  explicit SlotGuard(std::counting_semaphore<1024>& s) : s_(s) { s_.acquire(); }
  ~SlotGuard() { s_.release(); }
  SlotGuard(const SlotGuard&) = delete;
  SlotGuard& operator=(const SlotGuard&) = delete;

 private:
  std::counting_semaphore<1024>& s_;
};

}  // namespace

std::string to_string(PromptKind kind) {
  switch (kind) {
    case PromptKind::candidate: return "candidate";
    case PromptKind::test_cases: return "test_cases";
    case PromptKind::reasoning: return "reasoning";
    case PromptKind::summary: return "summary";
  }
  return "unknown";
}

PromptKind prompt_kind_from_string(const std::string& text) {
  for (auto k : kAllKinds)
    if (to_string(k) == text) return k;
  throw Error(Errc::parse_error, "unknown prompt kind '" + text + "'");
}

void ProviderConfig::validate() const {
  if (max_concurrent_requests < 1 || max_concurrent_requests > 1024)
    throw Error(Errc::invalid_config, "max_concurrent_requests must be in [1, 1024]");
  if (retry_limit < 0) throw Error(Errc::invalid_config, "retry_limit must be >= 0");
  if (temperature && (*temperature < 0.0 || *temperature > 2.0))
    throw Error(Errc::invalid_config, "temperature must be in [0, 2]");
  if (provider == ProviderKind::mock && mock_script.empty())
    throw Error(Errc::invalid_config, "mock provider needs a script path");
  if (provider == ProviderKind::http_chat && endpoint.empty())
    throw Error(Errc::invalid_config, "http provider needs an endpoint");
}

// --- mock -------------------------------------------------------------------

MockProvider::MockProvider(std::map<PromptKind, std::deque<std::string>> script)
    : script_(std::move(script)) {}

std::shared_ptr<MockProvider> MockProvider::from_json(const nlohmann::json& script) {
  std::map<PromptKind, std::deque<std::string>> queues;
  try {
    if (script.is_array()) {
      for (const auto& entry : script)
        queues[prompt_kind_from_string(entry.at("kind").get<std::string>())].push_back(
            entry.at("response").get<std::string>());
    } else if (script.is_object()) {
      for (const auto& [kind, responses] : script.items())
        for (const auto& r : responses) queues[prompt_kind_from_string(kind)].push_back(r.get<std::string>());
    } else {
      throw Error(Errc::parse_error, "mock script must be a JSON list or object");
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::parse_error, std::string("mock script: ") + e.what());
  }
  return std::make_shared<MockProvider>(std::move(queues));
}

std::shared_ptr<MockProvider> MockProvider::from_file(const fs::path& path) {
  return from_json(read_json_file(path));
}

std::string MockProvider::complete(const ChatRequest& request) {
  std::lock_guard lock(mutex_);
  ++calls_;
  auto& queue = script_[request.kind];
  if (queue.empty())
    throw ProviderError("mock script exhausted for prompt kind '" + to_string(request.kind) + "'", false);
  auto response = std::move(queue.front());
  queue.pop_front();
  return response;
}

std::size_t MockProvider::remaining(PromptKind kind) const {
  std::lock_guard lock(mutex_);
  auto it = script_.find(kind);
  return it == script_.end() ? 0 : it->second.size();
}

// --- http -------------------------------------------------------------------

HttpChatProvider::HttpChatProvider(const ProviderConfig& cfg) : timeout_(cfg.request_timeout) {
  static const std::regex kUrl(R"(^(https?://[^/]+)(/.*)?$)");
  std::smatch match;
  if (!std::regex_match(cfg.endpoint, match, kUrl))
    throw Error(Errc::invalid_config, "malformed endpoint URL '" + cfg.endpoint + "'");
  scheme_host_port_ = match[1].str();
  path_ = match[2].matched ? match[2].str() : "/";
#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
  if (scheme_host_port_.rfind("https", 0) == 0)
    throw Error(Errc::invalid_config, "built without TLS support; cannot reach " + cfg.endpoint);
#endif
  if (!cfg.api_key_env.empty()) {
    if (const char* key = std::getenv(cfg.api_key_env.c_str())) api_key_ = key;
  }
}

std::string HttpChatProvider::complete(const ChatRequest& request) {
  nlohmann::json body = {{"model", request.model}, {"messages", nlohmann::json::array()}};
  for (const auto& m : request.messages) body["messages"].push_back({{"role", m.role}, {"content", m.content}});
  if (request.temperature) body["temperature"] = *request.temperature;

  httplib::Client client(scheme_host_port_);
  client.set_connection_timeout(timeout_);
  client.set_read_timeout(timeout_);
  client.set_write_timeout(timeout_);
  httplib::Headers headers;
  if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);

  auto res = client.Post(path_, headers, body.dump(), "application/json");
  if (!res) throw ProviderError("request to " + scheme_host_port_ + " failed: " + httplib::to_string(res.error()), true);
  if (res->status == 429 || res->status >= 500)
    throw ProviderError("HTTP " + std::to_string(res->status) + " from " + scheme_host_port_, true);
  if (res->status != 200)
    throw ProviderError("HTTP " + std::to_string(res->status) + ": " + res->body.substr(0, 200), false);
  try {
    auto reply = nlohmann::json::parse(res->body);
    return reply.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw ProviderError(std::string("unexpected chat-completion payload: ") + e.what(), false);
  }
}

// --- cache ------------------------------------------------------------------

ResponseCache::ResponseCache(fs::path dir) : dir_(std::move(dir)) { fs::create_directories(dir_); }

std::string ResponseCache::key_for(const ChatRequest& request, const std::string& provider) {
  nlohmann::json k = {{"provider", provider},
                      {"model", request.model},
                      {"temperature", request.temperature ? nlohmann::json(*request.temperature) : nlohmann::json()},
                      {"attempt", request.attempt},
                      {"messages", nlohmann::json::array()}};
  for (const auto& m : request.messages) k["messages"].push_back({m.role, m.content});
  return sha256_hex(k.dump());
}

std::optional<std::string> ResponseCache::get(const std::string& key) const {
  const auto path = dir_ / (key + ".json");
  std::error_code ec;
  if (!fs::exists(path, ec)) return std::nullopt;
  try {
    return read_json_file(path).at("response").get<std::string>();
  } catch (const std::exception&) {
    return std::nullopt;  // torn or foreign file: treat as a miss
  }
}

void ResponseCache::put(const std::string& key, const std::string& response) const {
  const auto final_path = dir_ / (key + ".json");
  std::ostringstream tmp_name;
  tmp_name << key << ".tmp." << std::hash<std::thread::id>{}(std::this_thread::get_id());
  const auto tmp_path = dir_ / tmp_name.str();
  write_file(tmp_path, nlohmann::json{{"response", response}}.dump());
  fs::rename(tmp_path, final_path);  // atomic replace
}

// --- templates --------------------------------------------------------------

PromptTemplates PromptTemplates::defaults() {
  return {std::string(embedded::kCandidatePrompt), std::string(embedded::kTestCasesPrompt),
          std::string(embedded::kReasoningPrompt), std::string(embedded::kSummaryPrompt)};
}

PromptTemplates PromptTemplates::load(const fs::path& dir) {
  auto t = defaults();
  for (auto kind : kAllKinds) {
    const auto path = dir / (to_string(kind) + ".txt");
    std::error_code ec;
    if (!fs::exists(path, ec)) continue;
    auto text = read_file(path);
    switch (kind) {
      case PromptKind::candidate: t.candidate = std::move(text); break;
      case PromptKind::test_cases: t.test_cases = std::move(text); break;
      case PromptKind::reasoning: t.reasoning = std::move(text); break;
      case PromptKind::summary: t.summary = std::move(text); break;
    }
  }
  return t;
}

const std::string& PromptTemplates::get(PromptKind kind) const {
  switch (kind) {
    case PromptKind::candidate: return candidate;
    case PromptKind::test_cases: return test_cases;
    case PromptKind::reasoning: return reasoning;
    case PromptKind::summary: return summary;
  }
  return candidate;
}

std::string render(const std::string& tmpl, const std::map<std::string, std::string>& values) {
  std::string out;
  out.reserve(tmpl.size());
  for (std::size_t i = 0; i < tmpl.size();) {
    if (tmpl[i] == '{') {
      auto close = tmpl.find('}', i + 1);
      if (close != std::string::npos) {
        auto it = values.find(tmpl.substr(i + 1, close - i - 1));
        if (it != values.end()) {
          out += it->second;
          i = close + 1;
          continue;
        }
      }
    }
    out.push_back(tmpl[i++]);
  }
  return out;
}

// --- gateway ----------------------------------------------------------------

Gateway::Gateway(ProviderConfig cfg, std::shared_ptr<ChatProvider> provider, PromptTemplates templates)
    : cfg_(std::move(cfg)),
      provider_(std::move(provider)),
      templates_(std::move(templates)),
      shared_(std::make_shared<Shared>(std::clamp(cfg_.max_concurrent_requests, 1, 1024))) {
  if (!provider_) throw Error(Errc::invalid_config, "gateway needs a provider");
  if (!cfg_.cache_dir.empty()) cache_.emplace(cfg_.cache_dir);
}

Gateway Gateway::from_config(const ProviderConfig& cfg, const PromptTemplates& templates,
                             const std::string& problem_id) {
  cfg.validate();
  std::shared_ptr<ChatProvider> provider;
  if (cfg.provider == ProviderKind::mock) {
    auto script = cfg.mock_script;
    std::error_code ec;
    if (fs::is_directory(script, ec)) script /= problem_id + ".json";
    if (!fs::exists(script, ec)) throw Error(Errc::invalid_config, "mock script not found: " + script.string());
    provider = MockProvider::from_file(script);
  } else {
    provider = std::make_shared<HttpChatProvider>(cfg);
  }
  return Gateway(cfg, std::move(provider), templates);
}

ChatRequest Gateway::request(PromptKind kind, std::vector<ChatMessage> messages, int attempt) const {
  return ChatRequest{kind, std::move(messages), cfg_.model, cfg_.temperature, attempt};
}

std::string Gateway::complete(const ChatRequest& request) {
  std::string key;
  if (cache_) {
    key = ResponseCache::key_for(request, provider_->name());
    if (auto hit = cache_->get(key)) {
      ++shared_->cache_hits;
      return *hit;
    }
  }
  for (int retry = 0;; ++retry) {
    try {
      std::string response;
      {
        SlotGuard slot(shared_->slots);
        ++shared_->provider_calls;
        response = provider_->complete(request);
      }
      if (cache_) cache_->put(key, response);
      return response;
    } catch (const ProviderError& e) {
      if (!e.transient() || retry >= cfg_.retry_limit) throw;
    } catch (const std::exception& e) {
      if (retry >= cfg_.retry_limit) throw ProviderError(e.what(), true);
    }
    std::this_thread::sleep_for(cfg_.backoff * (1 << std::min(retry, 16)));
  }
}

}  // namespace vrank
