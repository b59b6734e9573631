#pragma once

#include <string>
#include <vector>

#include "vrank/model.hpp"

namespace vrank {

enum class PortDirection { input, output, inout };

struct Port {
  PortDirection direction = PortDirection::input;
  std::string name;
  std::string range;  // e.g. "[7:0]", empty for scalars
  bool is_signed = false;
};

struct ModuleInterface {
  std::string module_name;
  std::vector<Port> ports;

  std::vector<std::string> output_names() const;
  bool has_port(const std::string& name) const;
};

/// Scans a module header for its name and input/output/inout declarations.
/// Handles ANSI headers and non-ANSI bodies; it is not a Verilog parser.
/// Throws Error{interface_parse_error} when no module name or no ports are found.
ModuleInterface scan_interface(const std::string& module_interface);

struct TestbenchOptions {
  std::string marker_prefix = "VRANK";
  int settle_delay = 10;   // time units between a case's stimulus and its print
  int clock_half_period = 5;
};

/// Builds a print-only testbench: one DUT instance, each case's stimulus in
/// index order, and after each case a single `$display` of
/// `<prefix> <index> <in>=<hex> ... <out>=<hex>`. A free-running clock is added
/// only when the DUT has a `clk` port and no stimulus drives it.
Testbench assemble_testbench(const std::vector<TestCase>& cases, const std::string& module_interface,
                             const TestbenchOptions& options = {});

/// Number of marker `$display` emissions in an assembled source.
int count_marker_emissions(const std::string& source, const std::string& marker_prefix);

}  // namespace vrank
