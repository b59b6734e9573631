#include "vrank/config.hpp"

#include "vrank/json_io.hpp"

namespace vrank {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path resolve_path(const json& j, const char* key, const fs::path& base, const fs::path& fallback) {
  if (!j.contains(key) || j.at(key).is_null()) return fallback;
  fs::path p = j.at(key).get<std::string>();
  if (p.is_relative() && !base.empty()) p = base / p;
  return p.lexically_normal();
}

void parse_provider(const json& j, const fs::path& base, ProviderConfig& p) {
  const auto kind = j.value("kind", std::string(p.provider == ProviderKind::mock ? "mock" : "http_chat"));
  if (kind == "mock") {
    p.provider = ProviderKind::mock;
  } else if (kind == "http_chat" || kind == "openai") {
    p.provider = ProviderKind::http_chat;
  } else {
    throw Error(Errc::invalid_config, "unknown provider kind '" + kind + "'");
  }
  p.endpoint = j.value("endpoint", p.endpoint);
  p.api_key_env = j.value("api_key_env", p.api_key_env);
  p.model = j.value("model", p.model);
  if (j.contains("temperature"))
    p.temperature = j.at("temperature").is_null() ? std::nullopt : std::optional(j.at("temperature").get<double>());
  p.max_concurrent_requests = j.value("max_concurrent_requests", p.max_concurrent_requests);
  p.retry_limit = j.value("retry_limit", p.retry_limit);
  p.cache_dir = resolve_path(j, "cache_dir", base, p.cache_dir);
  p.mock_script = resolve_path(j, "mock_script", base, p.mock_script);
  p.backoff = std::chrono::milliseconds(j.value("backoff_ms", static_cast<long>(p.backoff.count())));
  p.request_timeout = std::chrono::seconds(j.value("request_timeout_s", static_cast<long>(p.request_timeout.count())));
}

void parse_simulator(const json& j, const fs::path& base, SimulatorSettings& s) {
  if (j.contains("kind")) s.kind = simulator_kind_from_string(j.at("kind").get<std::string>());
  s.compile_command = j.value("compile_command", s.compile_command);
  s.run_command = j.value("run_command", s.run_command);
  s.mocksim = resolve_path(j, "mocksim", base, s.mocksim);
  s.table = resolve_path(j, "table", base, s.table);
  s.timeout = std::chrono::milliseconds(j.value("timeout_ms", static_cast<long>(s.timeout.count())));
  s.compile_timeout =
      std::chrono::milliseconds(j.value("compile_timeout_ms", static_cast<long>(s.compile_timeout.count())));
  s.scratch_root = resolve_path(j, "scratch_root", base, s.scratch_root);
  s.keep_failed = j.value("keep_failed", s.keep_failed);
  s.max_parallel = j.value("max_parallel", s.max_parallel);
}

}  // namespace

SimulatorKind simulator_kind_from_string(const std::string& text) {
  if (text == "mock") return SimulatorKind::mock;
  if (text == "iverilog") return SimulatorKind::iverilog;
  if (text == "verilator") return SimulatorKind::verilator;
  if (text == "custom") return SimulatorKind::custom;
  throw Error(Errc::invalid_config, "unknown simulator '" + text + "'");
}

SimulatorConfig SimulatorSettings::build() const {
  SimulatorConfig cfg;
  switch (kind) {
    case SimulatorKind::mock:
      if (mocksim.empty() || table.empty())
        throw Error(Errc::invalid_config, "mock simulator needs a mocksim executable and a table");
      cfg = mock_simulator(mocksim, table);
      break;
    case SimulatorKind::iverilog:
      cfg = iverilog_simulator();
      break;
    case SimulatorKind::verilator:
      cfg = verilator_simulator();
      break;
    case SimulatorKind::custom:
      cfg.compile_command_template = compile_command;
      cfg.run_command_template = run_command;
      break;
  }
  cfg.timeout = timeout;
  cfg.compile_timeout = compile_timeout;
  cfg.scratch_root = scratch_root;
  cfg.keep_failed = keep_failed;
  cfg.max_parallel_simulations = max_parallel;
  cfg.validate();
  return cfg;
}

PromptTemplates AppConfig::templates() const {
  return prompts_dir ? PromptTemplates::load(*prompts_dir) : PromptTemplates::defaults();
}

AppConfig parse_config(const json& doc, const fs::path& base_dir) {
  if (!doc.is_object()) throw Error(Errc::invalid_config, "config must be a JSON object");
  AppConfig cfg;
  try {
    if (doc.contains("provider")) parse_provider(doc.at("provider"), base_dir, cfg.provider);
    if (doc.contains("simulator")) parse_simulator(doc.at("simulator"), base_dir, cfg.simulator);
    if (doc.contains("run")) cfg.run = doc.at("run").get<RunParams>();
    if (doc.contains("prompts_dir")) cfg.prompts_dir = resolve_path(doc, "prompts_dir", base_dir, {});
    cfg.runs_dir = resolve_path(doc, "runs_dir", base_dir, cfg.runs_dir);
    cfg.repetitions = doc.value("repetitions", cfg.repetitions);
    cfg.max_parallel_problems = doc.value("max_parallel_problems", cfg.max_parallel_problems);
  } catch (const json::exception& e) {
    throw Error(Errc::invalid_config, e.what());
  }
  return cfg;
}

AppConfig load_config(const fs::path& path) {
  std::error_code ec;
  if (!fs::is_regular_file(path, ec)) throw Error(Errc::config_error, "config file not found: " + path.string());
  json doc;
  try {
    doc = json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw Error(Errc::config_error, path.string() + ": " + e.what());
  }
  return parse_config(doc, path.parent_path());
}

}  // namespace vrank
