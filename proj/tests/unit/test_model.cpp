#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "vrank/error.hpp"
#include "vrank/json_io.hpp"

using namespace vrank;
namespace fs = std::filesystem;

namespace {

RunReport sample_report() {
  RunReport r;
  r.problem_id = "p1";
  r.params.n = 3;
  r.params.loss = LossKind::case_wise;
  r.params.cot.x = 3;
  r.params.seed = 42;
  r.candidates = {{0, "module a; endmodule\n", {ProvenanceKind::llm, "mock", "m"}},
                  {1, "module b; endmodule\n", {ProvenanceKind::injected, "file", ""}},
                  {2, "x", {ProvenanceKind::llm, "mock", "m"}}};
  r.test_cases = {{0, "a = 1;", std::string("first")}, {1, "a = 2;", std::nullopt}};
  r.testbench = Testbench{"module vrank_tb; endmodule\n", 2, "VRANK"};
  r.traces = {{TraceStatus::ok, {"VRANK 0 a=1 y=2", "VRANK 1 a=2 y=4"}},
              {TraceStatus::ok, {"VRANK 0 a=1 y=2", "VRANK 1 a=2 y=5"}},
              failed_trace(TraceStatus::timeout)};
  r.scored_clusters = {{{{0}, r.traces[0], false}, Score(5, 2)},
                       {{{1}, r.traces[1], false}, Score(5, 2)},
                       {{{2}, r.traces[2], true}, Score(0)}};
  r.cluster_order = {1, 0, 2};
  CotDecision d;
  d.incumbent = 0;
  d.challenger = 1;
  d.case_index = 1;
  d.predictions = {{0, std::map<std::string, std::string>{{"y", "5"}}, "because", "{\"y\": \"5\"}"},
                   {1, std::nullopt, "hm", "no json"}};
  d.match_count = 1;
  d.required = 1;
  d.swap = true;
  r.cot_decisions = {d};
  r.final_ranking = {1, 0, 2};
  return r;
}

fs::path temp_file(const std::string& name, const std::string& content) {
  auto p = fs::temp_directory_path() / ("vrank-test-model-" + name);
  std::ofstream(p) << content;
  return p;
}

}  // namespace

TEST_CASE("report survives a JSON round trip byte for byte") {
  const auto report = sample_report();
  const auto text = dump_report(report);
  const auto back = parse_report(text);
  CHECK(back == report);
  CHECK(dump_report(back) == text);
}

TEST_CASE("scores serialize as exact rationals") {
  CHECK(score_to_string(Score(5, 2)) == "5/2");
  CHECK(score_to_string(Score(4)) == "4");
  CHECK(score_from_string("10/4") == Score(5, 2));
  CHECK(score_from_string("-3") == Score(-3));
  CHECK_THROWS_AS(score_from_string("1/0"), Error);
  CHECK_THROWS_AS(score_from_string("abc"), Error);
}

TEST_CASE("trace status and loss names round trip") {
  for (auto s : {TraceStatus::ok, TraceStatus::compile_error, TraceStatus::runtime_error, TraceStatus::timeout,
                 TraceStatus::malformed_output})
    CHECK(trace_status_from_string(to_string(s)) == s);
  CHECK(loss_kind_from_string("strict") == LossKind::strict);
  CHECK(loss_kind_from_string("case") == LossKind::case_wise);
  CHECK_THROWS_AS(loss_kind_from_string("fuzzy"), Error);
}

TEST_CASE("problem validation") {
  Problem p{"id", "spec", "module m(input a); endmodule", std::nullopt};
  CHECK_NOTHROW(validate(p));
  p.id.clear();
  CHECK_THROWS_AS(validate(p), Error);
  Problem q{"id", "spec", "", std::nullopt};
  CHECK_THROWS_AS(validate(q), Error);
  Problem a{"same", "", "module m(input a);", std::nullopt};
  CHECK_THROWS_AS(validate_manifest({a, a}), Error);
}

TEST_CASE("manifest accepts JSONL with benchmark field names and JSON arrays") {
  const auto jsonl = temp_file(
      "m.jsonl",
      R"({"task_id": "t1", "prompt": "do it", "module_header": "module top_module(input a, output b);", "test": "tb"})"
      "\n\n"
      R"({"id": "t2", "spec_text": "s", "module_interface": "module top_module(input a, output b);"})"
      "\n");
  const auto problems = read_manifest(jsonl);
  REQUIRE(problems.size() == 2);
  CHECK(problems[0].id == "t1");
  CHECK(problems[0].spec_text == "do it");
  CHECK(problems[0].reference_testbench == std::optional<std::string>("tb"));
  CHECK_FALSE(problems[1].reference_testbench);

  const auto array = temp_file("m.json", R"([{"id": "a", "module_interface": "module m(input x);"}])");
  CHECK(read_manifest(array).size() == 1);

  const auto broken = temp_file("bad.jsonl", "{not json\n");
  CHECK_THROWS_AS(read_manifest(broken), Error);
}

TEST_CASE("traces.jsonl round trip keeps order and status") {
  const auto report = sample_report();
  const auto text = dump_traces_jsonl(report.traces);
  CHECK(std::count(text.begin(), text.end(), '\n') == 3);
  CHECK(parse_traces_jsonl(text) == report.traces);
}

TEST_CASE("error messages carry their code") {
  const Error e(Errc::domain_error, "k too large");
  CHECK(e.code() == Errc::domain_error);
  CHECK(std::string(e.what()) == "domain_error: k too large");
}
