#include <doctest.h>

#include "oracles.hpp"
#include "vrank/error.hpp"
#include "vrank/testbench.hpp"

using namespace vrank;

namespace {

const char* kAdder = "module top_module(\n  input [3:0] a,\n  input [3:0] b,\n  output [4:0] sum\n);";

std::vector<TestCase> cases(int m) {
  std::vector<TestCase> out;
  for (int i = 0; i < m; ++i) out.push_back({i, "a = " + std::to_string(i) + "; b = 1;", std::nullopt});
  return out;
}

}  // namespace

TEST_CASE("ANSI header with parameters, signed ports and comments") {
  const auto iface = scan_interface(
      "// adder\nmodule top #(parameter W = 8, parameter D = 2) (\n"
      "  input wire clk, /* clock */\n  input signed [W-1:0] x, y,\n  output reg [W:0] z,\n  inout io\n);");
  CHECK(iface.module_name == "top");
  REQUIRE(iface.ports.size() == 5);
  CHECK(iface.ports[0].name == "clk");
  CHECK(iface.ports[1].is_signed);
  CHECK(iface.ports[1].range == "[W-1:0]");
  CHECK(iface.ports[2].name == "y");
  CHECK(iface.ports[2].range == "[W-1:0]");
  CHECK(iface.ports[3].direction == PortDirection::output);
  CHECK(iface.ports[3].range == "[W:0]");
  CHECK(iface.ports[4].direction == PortDirection::inout);
  CHECK(iface.output_names() == std::vector<std::string>{"z", "io"});
  CHECK(iface.has_port("clk"));
  CHECK_FALSE(iface.has_port("W"));
}

TEST_CASE("non-ANSI declarations in the module body") {
  const auto iface = scan_interface("module m(a, b, q);\n  input a;\n  input [1:0] b;\n  output q;\n  reg q;\n");
  CHECK(iface.module_name == "m");
  REQUIRE(iface.ports.size() == 3);
  CHECK(iface.ports[1].range == "[1:0]");
  CHECK(iface.output_names() == std::vector<std::string>{"q"});
}

TEST_CASE("interfaces without a module or ports are rejected") {
  CHECK_THROWS_AS(scan_interface("wire x;"), Error);
  CHECK_THROWS_AS(scan_interface("module m;"), Error);
}

TEST_CASE("one marker print per case, in index order") {
  const auto tb = assemble_testbench(cases(4), kAdder);
  CHECK(tb.case_count == 4);
  CHECK(tb.marker_prefix == "VRANK");
  CHECK(count_marker_emissions(tb.source, "VRANK") == 4);
  CHECK(tb.source.find("$display(\"VRANK %0d a=%h b=%h sum=%h\", vrank_case, a, b, sum);") != std::string::npos);
  CHECK(tb.source.find("top_module dut (") != std::string::npos);
  const auto p0 = tb.source.find("vrank_case = 0;");
  const auto p3 = tb.source.find("vrank_case = 3;");
  CHECK(p0 < p3);
  CHECK(tb.source.find("always #") == std::string::npos);
  CHECK(tb.source.find("$finish;") != std::string::npos);
}

TEST_CASE("cases are emitted by index regardless of input order") {
  auto c = cases(3);
  std::swap(c[0], c[2]);
  const auto tb = assemble_testbench(c, kAdder);
  CHECK(tb.source.find("vrank_case = 0;") < tb.source.find("vrank_case = 1;"));
  CHECK(tb.source.find("vrank_case = 1;") < tb.source.find("vrank_case = 2;"));
}

TEST_CASE("a clock is generated only for an undriven clk port") {
  const char* seq = "module c(input clk, input reset, output reg [3:0] q);";
  const auto free_running = assemble_testbench({{0, "reset = 1; @(posedge clk);", std::nullopt}}, seq);
  CHECK(free_running.source.find("always #5 clk = ~clk;") != std::string::npos);
  const auto driven = assemble_testbench({{0, "clk = 0; #5 clk = 1;", std::nullopt}}, seq);
  CHECK(driven.source.find("always #") == std::string::npos);
}

TEST_CASE("marker prefix and settle delay are configurable") {
  TestbenchOptions o;
  o.marker_prefix = "TRACE_X";
  o.settle_delay = 3;
  const auto tb = assemble_testbench(cases(2), kAdder, o);
  CHECK(count_marker_emissions(tb.source, "TRACE_X") == 2);
  CHECK(count_marker_emissions(tb.source, "VRANK") == 0);
  CHECK(tb.source.find("#3;") != std::string::npos);
}

TEST_CASE("invalid case sets are rejected") {
  CHECK_THROWS_AS(assemble_testbench({}, kAdder), Error);
  auto gap = cases(3);
  gap[2].index = 5;
  CHECK_THROWS_AS(assemble_testbench(gap, kAdder), Error);
  auto dup = cases(2);
  dup[1].index = 0;
  CHECK_THROWS_AS(assemble_testbench(dup, kAdder), Error);
  TestbenchOptions bad;
  bad.marker_prefix = "has space";
  CHECK_THROWS_AS(assemble_testbench(cases(1), kAdder, bad), Error);
}

TEST_CASE("property: marker count equals case count for random case sets") {
  testing::Rng rng(11);
  for (int iter = 0; iter < 200; ++iter) {
    const int m = testing::uniform(rng, 1, 40);
    auto c = cases(m);
    std::shuffle(c.begin(), c.end(), rng);
    const auto tb = assemble_testbench(c, kAdder);
    REQUIRE(count_marker_emissions(tb.source, "VRANK") == m);
    REQUIRE(tb.case_count == m);
  }
}
