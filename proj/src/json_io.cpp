#include "vrank/json_io.hpp"

#include <fstream>
#include <sstream>

#include "vrank/error.hpp"

namespace vrank {

namespace {

template <typename T>
json optional_to_json(const std::optional<T>& value) {
  return value ? json(*value) : json(nullptr);
}

template <typename T>
std::optional<T> optional_from_json(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  return it->get<T>();
}

std::string provenance_kind_name(ProvenanceKind kind) {
  return kind == ProvenanceKind::llm ? "llm" : "injected";
}

std::string representative_name(RepresentativeMode mode) {
  return mode == RepresentativeMode::deterministic ? "deterministic" : "seeded_random";
}

}  // namespace

void to_json(json& j, const Problem& p) {
  j = json{{"id", p.id},
           {"spec_text", p.spec_text},
           {"module_interface", p.module_interface},
           {"reference_testbench", optional_to_json(p.reference_testbench)}};
}

void from_json(const json& j, Problem& p) {
  auto pick = [&](const char* native, const char* alias) -> std::optional<std::string> {
    for (const char* key : {native, alias}) {
      auto it = j.find(key);
      if (it != j.end() && !it->is_null()) return it->get<std::string>();
    }
    return std::nullopt;
  };
  p.id = pick("id", "task_id").value_or("");
  p.spec_text = pick("spec_text", "prompt").value_or("");
  p.module_interface = pick("module_interface", "module_header").value_or("");
  p.reference_testbench = pick("reference_testbench", "test");
}

void to_json(json& j, const Provenance& p) {
  j = json{{"kind", provenance_kind_name(p.kind)}, {"provider", p.provider}, {"model", p.model}};
}

void from_json(const json& j, Provenance& p) {
  const auto kind = j.value("kind", std::string("llm"));
  if (kind == "llm") {
    p.kind = ProvenanceKind::llm;
  } else if (kind == "injected") {
    p.kind = ProvenanceKind::injected;
  } else {
    throw Error(Errc::parse_error, "unknown provenance kind '" + kind + "'");
  }
  p.provider = j.value("provider", std::string());
  p.model = j.value("model", std::string());
}

void to_json(json& j, const Candidate& c) {
  j = json{{"index", c.index}, {"source", c.source}, {"provenance", c.provenance}};
}

void from_json(const json& j, Candidate& c) {
  c.index = j.at("index").get<int>();
  c.source = j.at("source").get<std::string>();
  c.provenance = j.value("provenance", Provenance{});
}

void to_json(json& j, const TestCase& t) {
  j = json{{"index", t.index},
           {"stimulus", t.stimulus},
           {"description", optional_to_json(t.description)}};
}

void from_json(const json& j, TestCase& t) {
  t.index = j.at("index").get<int>();
  t.stimulus = j.at("stimulus").get<std::string>();
  t.description = optional_from_json<std::string>(j, "description");
}

void to_json(json& j, const Testbench& t) {
  j = json{{"source", t.source}, {"case_count", t.case_count}, {"marker_prefix", t.marker_prefix}};
}

void from_json(const json& j, Testbench& t) {
  t.source = j.at("source").get<std::string>();
  t.case_count = j.at("case_count").get<int>();
  t.marker_prefix = j.value("marker_prefix", std::string("VRANK"));
}

void to_json(json& j, const ExecutionTrace& t) {
  j = json{{"status", to_string(t.status)}, {"records", t.records}};
}

void from_json(const json& j, ExecutionTrace& t) {
  t.status = trace_status_from_string(j.at("status").get<std::string>());
  t.records = j.value("records", std::vector<std::string>{});
}

void to_json(json& j, const Cluster& c) {
  j = json{{"members", c.members}, {"canonical_trace", c.canonical_trace}, {"failed", c.failed}};
}

void from_json(const json& j, Cluster& c) {
  c.members = j.at("members").get<std::vector<int>>();
  c.canonical_trace = j.at("canonical_trace").get<ExecutionTrace>();
  c.failed = j.at("failed").get<bool>();
}

std::string score_to_string(const Score& s) {
  if (s.denominator() == 1) return std::to_string(s.numerator());
  return std::to_string(s.numerator()) + "/" + std::to_string(s.denominator());
}

Score score_from_string(const std::string& text) {
  try {
    auto slash = text.find('/');
    if (slash == std::string::npos) return Score(std::stoll(text));
    return Score(std::stoll(text.substr(0, slash)), std::stoll(text.substr(slash + 1)));
  } catch (const std::exception&) {
    throw Error(Errc::parse_error, "malformed score '" + text + "'");
  }
}

void to_json(json& j, const ScoredCluster& s) {
  j = json{{"cluster", s.cluster},
           {"score", score_to_string(s.score)},
           {"score_value", boost::rational_cast<double>(s.score)}};
}

void from_json(const json& j, ScoredCluster& s) {
  s.cluster = j.at("cluster").get<Cluster>();
  s.score = score_from_string(j.at("score").get<std::string>());
}

void to_json(json& j, const ReferencePrediction& p) {
  j = json{{"attempt", p.attempt},
           {"parsed", optional_to_json(p.parsed)},
           {"raw_reasoning", p.raw_reasoning},
           {"raw_summary", p.raw_summary}};
}

void from_json(const json& j, ReferencePrediction& p) {
  p.attempt = j.at("attempt").get<int>();
  p.parsed = optional_from_json<std::map<std::string, std::string>>(j, "parsed");
  p.raw_reasoning = j.value("raw_reasoning", std::string());
  p.raw_summary = j.value("raw_summary", std::string());
}

void to_json(json& j, const CotParams& p) {
  j = json{{"enabled", p.enabled},
           {"x", p.x},
           {"th", p.th},
           {"depth", p.depth},
           {"strict_greater", p.strict_greater}};
}

void from_json(const json& j, CotParams& p) {
  CotParams d;
  p.enabled = j.value("enabled", d.enabled);
  p.x = j.value("x", d.x);
  p.th = j.value("th", d.th);
  p.depth = j.value("depth", d.depth);
  p.strict_greater = j.value("strict_greater", d.strict_greater);
}

void to_json(json& j, const RunParams& p) {
  j = json{{"n", p.n},
           {"m_min", p.m_min},
           {"loss", to_string(p.loss)},
           {"cot", p.cot},
           {"representative", representative_name(p.representative)},
           {"seed", p.seed},
           {"marker_prefix", p.marker_prefix},
           {"settle_delay", p.settle_delay}};
}

void from_json(const json& j, RunParams& p) {
  RunParams d;
  p.n = j.value("n", d.n);
  p.m_min = j.value("m_min", d.m_min);
  p.loss = loss_kind_from_string(j.value("loss", to_string(d.loss)));
  p.cot = j.value("cot", d.cot);
  const auto rep = j.value("representative", representative_name(d.representative));
  if (rep == "deterministic") {
    p.representative = RepresentativeMode::deterministic;
  } else if (rep == "seeded_random" || rep == "random") {
    p.representative = RepresentativeMode::seeded_random;
  } else {
    throw Error(Errc::invalid_config, "unknown representative mode '" + rep + "'");
  }
  p.seed = j.value("seed", d.seed);
  p.marker_prefix = j.value("marker_prefix", d.marker_prefix);
  p.settle_delay = j.value("settle_delay", d.settle_delay);
}

void to_json(json& j, const CotDecision& d) {
  j = json{{"incumbent", d.incumbent},
           {"challenger", d.challenger},
           {"case_index", optional_to_json(d.case_index)},
           {"predictions", d.predictions},
           {"match_count", d.match_count},
           {"required", d.required},
           {"swap", d.swap},
           {"note", d.note}};
}

void from_json(const json& j, CotDecision& d) {
  d.incumbent = j.at("incumbent").get<int>();
  d.challenger = j.at("challenger").get<int>();
  d.case_index = optional_from_json<int>(j, "case_index");
  d.predictions = j.value("predictions", std::vector<ReferencePrediction>{});
  d.match_count = j.value("match_count", 0);
  d.required = j.value("required", 0);
  d.swap = j.value("swap", false);
  d.note = j.value("note", std::string());
}

void to_json(json& j, const RunReport& r) {
  j = json{{"problem_id", r.problem_id},
           {"params", r.params},
           {"candidates", r.candidates},
           {"test_cases", r.test_cases},
           {"testbench", optional_to_json(r.testbench)},
           {"traces", r.traces},
           {"scored_clusters", r.scored_clusters},
           {"cluster_order", r.cluster_order},
           {"cot_decisions", r.cot_decisions},
           {"final_ranking", r.final_ranking},
           {"timings", r.timings},
           {"error", optional_to_json(r.error)}};
}

void from_json(const json& j, RunReport& r) {
  r.problem_id = j.at("problem_id").get<std::string>();
  r.params = j.value("params", RunParams{});
  r.candidates = j.value("candidates", std::vector<Candidate>{});
  r.test_cases = j.value("test_cases", std::vector<TestCase>{});
  r.testbench = optional_from_json<Testbench>(j, "testbench");
  r.traces = j.value("traces", std::vector<ExecutionTrace>{});
  r.scored_clusters = j.value("scored_clusters", std::vector<ScoredCluster>{});
  r.cluster_order = j.value("cluster_order", std::vector<int>{});
  r.cot_decisions = j.value("cot_decisions", std::vector<CotDecision>{});
  r.final_ranking = j.value("final_ranking", std::vector<int>{});
  r.timings = j.value("timings", std::map<std::string, double>{});
  r.error = optional_from_json<std::string>(j, "error");
}

std::string dump_report(const RunReport& report) {
  return json(report).dump(2) + "\n";
}

RunReport parse_report(const std::string& text) {
  try {
    return json::parse(text).get<RunReport>();
  } catch (const json::exception& e) {
    throw Error(Errc::parse_error, std::string("run report: ") + e.what());
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io_error, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::io_error, "cannot write " + path.string());
  out << content;
  if (!out) throw Error(Errc::io_error, "short write to " + path.string());
}

json read_json_file(const std::filesystem::path& path) {
  const auto text = read_file(path);
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw Error(Errc::parse_error, path.string() + ": " + e.what());
  }
}

std::vector<Problem> read_manifest(const std::filesystem::path& path) {
  const auto text = read_file(path);
  std::vector<Problem> problems;
  try {
    auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '[') {
      problems = json::parse(text).get<std::vector<Problem>>();
    } else {
      std::istringstream lines(text);
      std::string line;
      while (std::getline(lines, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        problems.push_back(json::parse(line).get<Problem>());
      }
    }
  } catch (const json::exception& e) {
    throw Error(Errc::parse_error, path.string() + ": " + e.what());
  }
  validate_manifest(problems);
  return problems;
}

std::string dump_traces_jsonl(const std::vector<ExecutionTrace>& traces) {
  std::string out;
  for (std::size_t i = 0; i < traces.size(); ++i) {
    json line = traces[i];
    line["candidate"] = i;
    out += line.dump() + "\n";
  }
  return out;
}

std::vector<ExecutionTrace> parse_traces_jsonl(const std::string& text) {
  std::vector<std::pair<int, ExecutionTrace>> indexed;
  std::istringstream lines(text);
  std::string line;
  try {
    while (std::getline(lines, line)) {
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      auto j = json::parse(line);
      indexed.emplace_back(j.at("candidate").get<int>(), j.get<ExecutionTrace>());
    }
  } catch (const json::exception& e) {
    throw Error(Errc::parse_error, std::string("traces.jsonl: ") + e.what());
  }
  std::vector<ExecutionTrace> traces(indexed.size());
  std::vector<bool> seen(indexed.size(), false);
  for (auto& [i, t] : indexed) {
    if (i < 0 || static_cast<std::size_t>(i) >= traces.size() || seen[i])
      throw Error(Errc::parse_error, "traces.jsonl: bad candidate index " + std::to_string(i));
    seen[i] = true;
    traces[i] = std::move(t);
  }
  return traces;
}

}  // namespace vrank
