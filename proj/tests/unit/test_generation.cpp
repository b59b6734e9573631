#include <doctest.h>

#include "oracles.hpp"
#include "vrank/error.hpp"
#include "vrank/generation.hpp"
#include "vrank/json_io.hpp"
#include "vrank/testbench.hpp"

using namespace vrank;
using namespace std::chrono_literals;

namespace {

const Problem kProblem{"p", "add a and b", "module top_module(input [3:0] a, input [3:0] b, output [4:0] sum);",
                       std::nullopt};

Gateway scripted(const char* script, int retry_limit = 2) {
  ProviderConfig cfg;
  cfg.retry_limit = retry_limit;
  cfg.backoff = 1ms;
  return Gateway(cfg, MockProvider::from_json(json::parse(script)));
}

}  // namespace

TEST_CASE("fenced block extraction") {
  CHECK(first_fenced_block("text\n```verilog\nmodule m;\nendmodule\n```\nmore") == "module m;\nendmodule\n");
  CHECK(first_fenced_block("```\na\n```\n```\nb\n```") == "a\n");
  CHECK_FALSE(first_fenced_block("no fence"));
  CHECK_FALSE(first_fenced_block("```verilog\nunterminated"));
}

TEST_CASE("property: a fenced body is recovered verbatim") {
  testing::Rng rng(8);
  const std::string alphabet = "abc \n;{}()=`'\"#";
  for (int iter = 0; iter < 1000; ++iter) {
    std::string body;
    const int len = testing::uniform(rng, 0, 60);
    for (int i = 0; i < len; ++i) body += alphabet[testing::uniform(rng, 0, static_cast<int>(alphabet.size()) - 1)];
    if ((body + "```").find("```") != body.size()) continue;
    const std::string prose = "Sure, here it is:\n";
    REQUIRE(first_fenced_block(prose + "```verilog\n" + body + "```\ntrailing") == body);
  }
}

TEST_CASE("first_json_object skips braces inside strings") {
  CHECK(first_json_object(R"(Answer: {"out": "}{", "n": {"a": 1}} done)") == R"({"out": "}{", "n": {"a": 1}})");
  CHECK_FALSE(first_json_object("{ never closed"));
  CHECK_FALSE(first_json_object("none"));
}

TEST_CASE("test case parsing") {
  const auto cases = parse_test_cases(
      "Intro\n```verilog\n// CASE: zero\na = 0; b = 0;\n\n// case\na = 1;\n#5 b = 2;\n//CASE:\n\n```\n"
      "```verilog\n// CASE: second block\na = 15;\n```\n");
  REQUIRE(cases.size() == 3);
  CHECK(cases[0].index == 0);
  CHECK(cases[0].description == std::optional<std::string>("zero"));
  CHECK(cases[0].stimulus == "a = 0; b = 0;\n");
  CHECK(cases[1].stimulus == "a = 1;\n#5 b = 2;\n");
  CHECK_FALSE(cases[1].description);
  CHECK(cases[2].index == 2);
  CHECK(cases[2].description == std::optional<std::string>("second block"));
  CHECK(parse_test_cases("// CASE: a\nx = 1;\n").size() == 1);
  CHECK(parse_test_cases("no markers here").empty());
}

TEST_CASE("prediction parsing normalizes scalars") {
  const auto p = parse_prediction(R"(Reference: {"sum": "1F", "carry": true, "n": 26, "skip": [1]})");
  REQUIRE(p);
  CHECK(p->at("sum") == "1F");
  CHECK(p->at("carry") == "1");
  CHECK(p->at("n") == "1a");
  CHECK_FALSE(p->contains("skip"));
  const auto nested = parse_prediction(R"({"outputs": {"y": "3"}})");
  REQUIRE(nested);
  CHECK(nested->at("y") == "3");
  CHECK_FALSE(parse_prediction("I am not sure."));
  CHECK_FALSE(parse_prediction("{\"list\": [1, 2]}"));
}

TEST_CASE("candidates come from fences, raw text or a placeholder") {
  auto gw = scripted(R"({"candidate": ["```verilog\nmodule a;\nendmodule\n```", "module raw;", ""]})");
  const auto cands = generate_candidates(kProblem, 3, gw);
  REQUIRE(cands.size() == 3);
  CHECK(cands[0].source == "module a;\nendmodule\n");
  CHECK(cands[1].source == "module raw;");
  CHECK(cands[2].source == "// empty response\n");
  CHECK(cands[2].index == 2);
  CHECK(cands[0].provenance.kind == ProvenanceKind::llm);
  CHECK(cands[0].provenance.provider == "mock");
  CHECK_THROWS_AS(generate_candidates(kProblem, 0, gw), Error);
}

TEST_CASE("test case generation re-prompts until m_min cases parse") {
  auto gw = scripted(R"({"test_cases": ["// CASE: only\na = 1;", "// CASE: x\na = 1;\n// CASE: y\na = 2;"]})");
  CHECK(generate_test_cases(kProblem, 2, gw).size() == 2);

  auto short_gw = scripted(R"({"test_cases": ["// CASE\na = 1;", "// CASE\na = 1;"]})", 1);
  try {
    generate_test_cases(kProblem, 3, short_gw);
    FAIL("expected insufficient_test_cases");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::insufficient_test_cases);
  }
}

TEST_CASE("reference reasoning yields x predictions, unparseable ones empty") {
  const std::vector<TestCase> cases = {{0, "a = 1; b = 2;", std::string("small")}};
  const auto tb = assemble_testbench(cases, kProblem.module_interface);
  auto gw = scripted(R"({"reasoning": ["r0", "r1", "r2"],
                         "summary": ["{\"sum\": \"03\"}", "I think 3", "```json\n{\"sum\": 3}\n```"]})");
  const auto preds = reason_reference(kProblem, tb, 0, 3, gw);
  REQUIRE(preds.size() == 3);
  CHECK(preds[0].attempt == 0);
  CHECK(preds[0].raw_reasoning == "r0");
  CHECK(preds[0].parsed->at("sum") == "03");
  CHECK_FALSE(preds[1].parsed);
  CHECK(preds[1].raw_summary == "I think 3");
  CHECK(preds[2].parsed->at("sum") == "3");
}
