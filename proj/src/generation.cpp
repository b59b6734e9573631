#include "vrank/generation.hpp"

#include <regex>
#include <sstream>

#include "vrank/testbench.hpp"

namespace vrank {

namespace {

std::string trim_blank_lines(const std::string& text) {
  std::istringstream in(text);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  auto blank = [](const std::string& l) { return l.find_first_not_of(" \t") == std::string::npos; };
  std::size_t b = 0;
  std::size_t e = lines.size();
  while (b < e && blank(lines[b])) ++b;
  while (e > b && blank(lines[e - 1])) --e;
  std::string out;
  for (auto i = b; i < e; ++i) out += lines[i] + "\n";
  return out;
}

std::vector<std::string> all_fenced_blocks(const std::string& text) {
  std::vector<std::string> blocks;
  std::size_t pos = 0;
  while (true) {
    auto rest = text.substr(pos);
    auto block = first_fenced_block(rest);
    if (!block) break;
    blocks.push_back(*block);
    auto open = rest.find("```");
    auto body = rest.find('\n', open) + 1;
    pos += body + block->size() + 3;
  }
  return blocks;
}

/// The stimulus block of one case, recovered from an assembled testbench.
std::string case_text_from_testbench(const Testbench& tb, int case_index) {
  std::istringstream in(tb.source);
  std::string line;
  std::string out;
  bool inside = false;
  const std::string header = "// case " + std::to_string(case_index);
  while (std::getline(in, line)) {
    auto first = line.find_first_not_of(" \t");
    auto trimmed = first == std::string::npos ? std::string() : line.substr(first);
    if (!inside) {
      if (trimmed == header || trimmed.rfind(header + ":", 0) == 0) {
        inside = true;
        out += trimmed + "\n";
      }
      continue;
    }
    if (trimmed.rfind("$display", 0) == 0) break;
    out += trimmed + "\n";
  }
  return out;
}

std::string join(const std::vector<std::string>& items, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) out += (i ? sep : "") + items[i];
  return out;
}

}  // namespace

std::optional<std::string> first_fenced_block(const std::string& text) {
  auto open = text.find("```");
  if (open == std::string::npos) return std::nullopt;
  auto body = text.find('\n', open);
  if (body == std::string::npos) return std::nullopt;
  ++body;
  auto close = text.find("```", body);
  if (close == std::string::npos) return std::nullopt;
  return text.substr(body, close - body);
}

std::optional<std::string> first_json_object(const std::string& text) {
  for (auto start = text.find('{'); start != std::string::npos; start = text.find('{', start + 1)) {
    int depth = 0;
    bool in_string = false;
    bool escaped = false;
    for (auto i = start; i < text.size(); ++i) {
      char c = text[i];
      if (in_string) {
        if (escaped) {
          escaped = false;
        } else if (c == '\\') {
          escaped = true;
        } else if (c == '"') {
          in_string = false;
        }
        continue;
      }
      if (c == '"') {
        in_string = true;
      } else if (c == '{') {
        ++depth;
      } else if (c == '}' && --depth == 0) {
        return text.substr(start, i - start + 1);
      }
    }
  }
  return std::nullopt;
}

std::vector<TestCase> parse_test_cases(const std::string& response) {
  auto blocks = all_fenced_blocks(response);
  const std::string body = blocks.empty() ? response : join(blocks, "\n");

  static const std::regex kMarker(R"(^\s*//\s*CASE\b:?\s*(.*?)\s*$)", std::regex::icase);
  std::vector<TestCase> cases;
  std::optional<TestCase> current;
  auto flush = [&] {
    if (!current) return;
    current->stimulus = trim_blank_lines(current->stimulus);
    if (!current->stimulus.empty()) {
      current->index = static_cast<int>(cases.size());
      cases.push_back(std::move(*current));
    }
    current.reset();
  };

  std::istringstream in(body);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::smatch match;
    if (std::regex_match(line, match, kMarker)) {
      flush();
      current = TestCase{};
      if (match[1].length() > 0) current->description = match[1].str();
    } else if (current) {
      current->stimulus += line + "\n";
    }
  }
  flush();
  return cases;
}

std::optional<std::map<std::string, std::string>> parse_prediction(const std::string& response) {
  std::size_t offset = 0;
  while (offset < response.size()) {
    auto candidate = first_json_object(response.substr(offset));
    if (!candidate) return std::nullopt;
    offset = response.find(*candidate, offset) + 1;

    nlohmann::json j = nlohmann::json::parse(*candidate, nullptr, false);
    if (j.is_discarded() || !j.is_object()) continue;

    auto collect = [](const nlohmann::json& obj) {
      std::map<std::string, std::string> fields;
      for (const auto& [key, value] : obj.items()) {
        if (value.is_string()) {
          fields[key] = value.get<std::string>();
        } else if (value.is_number_unsigned() ||
                   (value.is_number_integer() && value.get<std::int64_t>() >= 0)) {
          std::ostringstream os;
          os << std::hex << value.get<std::uint64_t>();
          fields[key] = os.str();
        } else if (value.is_boolean()) {
          fields[key] = value.get<bool>() ? "1" : "0";
        }
      }
      return fields;
    };
    auto fields = collect(j);
    if (fields.empty() && j.size() == 1 && j.begin()->is_object()) fields = collect(*j.begin());
    if (!fields.empty()) return fields;
  }
  return std::nullopt;
}

std::vector<Candidate> generate_candidates(const Problem& problem, int n, Gateway& gateway) {
  if (n < 1) throw Error(Errc::invalid_argument, "generate_candidates needs n >= 1");
  validate(problem);
  const auto prompt = render(gateway.templates().candidate,
                             {{"spec", problem.spec_text}, {"interface", problem.module_interface}});
  const Provenance provenance{ProvenanceKind::llm, gateway.provider().name(), gateway.config().model};
  return gateway.map_attempts(n, [&](int i) {
    auto response = gateway.complete(gateway.request(PromptKind::candidate, {{"user", prompt}}, i));
    auto source = first_fenced_block(response).value_or(response);
    if (source.empty()) source = "// empty response\n";
    return Candidate{i, std::move(source), provenance};
  });
}

std::vector<TestCase> generate_test_cases(const Problem& problem, int m_min, Gateway& gateway) {
  if (m_min < 1) throw Error(Errc::invalid_argument, "generate_test_cases needs m_min >= 1");
  validate(problem);
  const auto prompt =
      render(gateway.templates().test_cases, {{"spec", problem.spec_text},
                                              {"interface", problem.module_interface},
                                              {"m_min", std::to_string(m_min)}});
  std::size_t best = 0;
  for (int attempt = 0; attempt <= gateway.config().retry_limit; ++attempt) {
    auto response = gateway.complete(gateway.request(PromptKind::test_cases, {{"user", prompt}}, attempt));
    auto cases = parse_test_cases(response);
    if (static_cast<int>(cases.size()) >= m_min) return cases;
    best = std::max(best, cases.size());
  }
  throw Error(Errc::insufficient_test_cases, "best attempt parsed " + std::to_string(best) + " of " +
                                                 std::to_string(m_min) + " required test cases");
}

std::vector<ReferencePrediction> reason_reference(const Problem& problem, const Testbench& testbench,
                                                  int case_index, int x, Gateway& gateway,
                                                  const TestCase* test_case) {
  if (x < 1) throw Error(Errc::invalid_argument, "reason_reference needs x >= 1");
  if (case_index < 0 || case_index >= testbench.case_count)
    throw Error(Errc::invalid_argument, "case index " + std::to_string(case_index) + " out of range");

  std::string case_text;
  if (test_case) {
    case_text = "// case " + std::to_string(case_index);
    if (test_case->description) case_text += ": " + *test_case->description;
    case_text += "\n" + test_case->stimulus;
  } else {
    case_text = case_text_from_testbench(testbench, case_index);
  }
  const auto outputs = join(scan_interface(problem.module_interface).output_names(), ", ");
  const std::map<std::string, std::string> values = {
      {"spec", problem.spec_text},      {"interface", problem.module_interface},
      {"testbench", testbench.source},  {"case_index", std::to_string(case_index)},
      {"case", case_text},              {"outputs", outputs},
      {"prefix", testbench.marker_prefix}};
  const auto reasoning_prompt = render(gateway.templates().reasoning, values);
  const auto summary_prompt = render(gateway.templates().summary, values);

  return gateway.map_attempts(x, [&](int attempt) {
    std::vector<ChatMessage> conversation = {{"user", reasoning_prompt}};
    ReferencePrediction p;
    p.attempt = attempt;
    p.raw_reasoning = gateway.complete(gateway.request(PromptKind::reasoning, conversation, attempt));
    conversation.push_back({"assistant", p.raw_reasoning});
    conversation.push_back({"user", summary_prompt});
    p.raw_summary = gateway.complete(gateway.request(PromptKind::summary, conversation, attempt));
    p.parsed = parse_prediction(p.raw_summary);
    return p;
  });
}

}  // namespace vrank
