#include "vrank/testbench.hpp"

#include <algorithm>
#include <cctype>
#include <optional>
#include <regex>
#include <set>
#include <sstream>

#include "vrank/error.hpp"

namespace vrank {

namespace {

std::string strip_comments(const std::string& text) {
  std::string out;
  out.reserve(text.size());
  for (std::size_t i = 0; i < text.size();) {
    if (text.compare(i, 2, "//") == 0) {
      while (i < text.size() && text[i] != '\n') ++i;
    } else if (text.compare(i, 2, "/*") == 0) {
      auto end = text.find("*/", i + 2);
      i = end == std::string::npos ? text.size() : end + 2;
      out.push_back(' ');
    } else if (text[i] == '"') {
      // string literals cannot hold declarations; skip them whole
      ++i;
      while (i < text.size() && text[i] != '"') i += text[i] == '\\' ? 2 : 1;
      ++i;
      out.push_back(' ');
    } else {
      out.push_back(text[i++]);
    }
  }
  return out;
}

bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '$';
}

std::vector<std::string> tokenize(const std::string& text) {
  std::vector<std::string> tokens;
  for (std::size_t i = 0; i < text.size();) {
    char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
    } else if (is_ident_start(c)) {
      std::size_t j = i;
      while (j < text.size() && is_ident_char(text[j])) ++j;
      tokens.push_back(text.substr(i, j - i));
      i = j;
    } else if (c == '[') {
      int depth = 0;
      std::size_t j = i;
      std::string range;
      for (; j < text.size(); ++j) {
        if (text[j] == '[') ++depth;
        if (text[j] == ']') --depth;
        if (!std::isspace(static_cast<unsigned char>(text[j]))) range.push_back(text[j]);
        if (depth == 0) break;
      }
      tokens.push_back(range);
      i = j + 1;
    } else {
      tokens.emplace_back(1, c);
      ++i;
    }
  }
  return tokens;
}

std::optional<PortDirection> direction_of(const std::string& token) {
  if (token == "input") return PortDirection::input;
  if (token == "output") return PortDirection::output;
  if (token == "inout") return PortDirection::inout;
  return std::nullopt;
}

bool is_type_keyword(const std::string& t) {
  static const std::set<std::string> kTypes = {"wire", "reg", "logic", "var", "tri",
                                               "unsigned", "bit", "integer", "supply0",
                                               "supply1", "wand", "wor", "uwire"};
  return kTypes.count(t) > 0;
}

std::string indent_block(const std::string& text, const std::string& pad) {
  std::istringstream in(text);
  std::string line;
  std::string out;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t'))
      line.pop_back();
    if (line.empty()) continue;
    out += pad + line + "\n";
  }
  return out;
}

std::string one_line(std::string text) {
  std::replace(text.begin(), text.end(), '\n', ' ');
  std::replace(text.begin(), text.end(), '\r', ' ');
  return text;
}

}  // namespace

std::vector<std::string> ModuleInterface::output_names() const {
  std::vector<std::string> names;
  for (const auto& p : ports)
    if (p.direction != PortDirection::input) names.push_back(p.name);
  return names;
}

bool ModuleInterface::has_port(const std::string& name) const {
  return std::any_of(ports.begin(), ports.end(), [&](const Port& p) { return p.name == name; });
}

ModuleInterface scan_interface(const std::string& module_interface) {
  const auto tokens = tokenize(strip_comments(module_interface));
  ModuleInterface result;

  std::size_t i = 0;
  while (i < tokens.size() && tokens[i] != "module" && tokens[i] != "macromodule") ++i;
  if (i + 1 >= tokens.size() || !is_ident_start(tokens[i + 1][0]))
    throw Error(Errc::interface_parse_error, "no module declaration found");
  result.module_name = tokens[i + 1];
  i += 2;

  // parameter port list
  if (i < tokens.size() && tokens[i] == "#") {
    ++i;
    int depth = 0;
    for (; i < tokens.size(); ++i) {
      if (tokens[i] == "(") ++depth;
      if (tokens[i] == ")" && --depth == 0) {
        ++i;
        break;
      }
    }
  }

  std::set<std::string> seen;
  while (i < tokens.size() && tokens[i] != "endmodule") {
    auto dir = direction_of(tokens[i]);
    if (!dir) {
      ++i;
      continue;
    }
    ++i;
    Port proto{*dir, "", "", false};
    for (; i < tokens.size(); ++i) {
      const auto& t = tokens[i];
      if (t == "signed") {
        proto.is_signed = true;
      } else if (is_type_keyword(t)) {
        continue;
      } else if (t[0] == '[') {
        proto.range = t;
      } else {
        break;
      }
    }
    // comma-separated names until the next direction keyword or terminator
    while (i < tokens.size()) {
      const auto& t = tokens[i];
      if (t == ";" || t == ")" || direction_of(t)) break;
      if (t == ",") {
        ++i;
        continue;
      }
      if (t == "=") {
        int depth = 0;
        for (++i; i < tokens.size(); ++i) {
          if (tokens[i] == "(" || tokens[i] == "{") ++depth;
          if (tokens[i] == ")" || tokens[i] == "}") {
            if (depth == 0) break;
            --depth;
          }
          if (depth == 0 && (tokens[i] == "," || tokens[i] == ";")) break;
        }
        continue;
      }
      if (is_ident_start(t[0]) && !is_type_keyword(t) && t != "signed") {
        if (seen.insert(t).second) {
          Port p = proto;
          p.name = t;
          result.ports.push_back(p);
        }
      }
      ++i;
    }
  }

  if (result.ports.empty())
    throw Error(Errc::interface_parse_error,
                "no input/output declarations in interface of '" + result.module_name + "'");
  return result;
}

Testbench assemble_testbench(const std::vector<TestCase>& cases, const std::string& module_interface,
                             const TestbenchOptions& options) {
  if (cases.empty()) throw Error(Errc::invalid_argument, "cannot assemble a testbench with no test cases");
  if (options.marker_prefix.empty() ||
      options.marker_prefix.find_first_of(" \t\n\"\\%") != std::string::npos)
    throw Error(Errc::invalid_argument, "marker prefix must be a non-empty single token");
  const auto iface = scan_interface(module_interface);

  std::vector<const TestCase*> ordered;
  for (const auto& c : cases) ordered.push_back(&c);
  std::sort(ordered.begin(), ordered.end(),
            [](const TestCase* a, const TestCase* b) { return a->index < b->index; });
  for (std::size_t k = 0; k < ordered.size(); ++k) {
    if (ordered[k]->index != static_cast<int>(k))
      throw Error(Errc::invalid_argument, "test case indices must be exactly 0..m-1");
  }

  static const std::regex kDrivesClk(R"(\bclk\s*<?=[^=])");
  const bool stimulus_drives_clk = std::any_of(ordered.begin(), ordered.end(), [](const TestCase* c) {
    return std::regex_search(c->stimulus, kDrivesClk);
  });
  const bool add_clock = iface.has_port("clk") && !stimulus_drives_clk;

  std::vector<const Port*> printed;
  for (const auto& p : iface.ports)
    if (p.direction == PortDirection::input) printed.push_back(&p);
  for (const auto& p : iface.ports)
    if (p.direction != PortDirection::input) printed.push_back(&p);

  std::string fmt = options.marker_prefix + " %0d";
  std::string args;
  for (const auto* p : printed) {
    fmt += " " + p->name + "=%h";
    args += ", " + p->name;
  }

  std::ostringstream tb;
  tb << "`timescale 1ns/1ps\n";
  tb << "module vrank_tb;\n";
  for (const auto& p : iface.ports) {
    tb << "  " << (p.direction == PortDirection::input ? "reg" : "wire");
    if (p.is_signed) tb << " signed";
    if (!p.range.empty()) tb << " " << p.range;
    tb << " " << p.name << ";\n";
  }
  tb << "  integer vrank_case;\n\n";
  tb << "  " << iface.module_name << " dut (\n";
  for (std::size_t k = 0; k < iface.ports.size(); ++k) {
    const auto& name = iface.ports[k].name;
    tb << "    ." << name << "(" << name << ")" << (k + 1 < iface.ports.size() ? "," : "") << "\n";
  }
  tb << "  );\n\n";
  if (add_clock) {
    tb << "  initial clk = 1'b0;\n";
    tb << "  always #" << options.clock_half_period << " clk = ~clk;\n\n";
  }
  tb << "  initial begin\n";
  for (const auto* c : ordered) {
    tb << "    // case " << c->index;
    if (c->description && !c->description->empty()) tb << ": " << one_line(*c->description);
    tb << "\n";
    tb << "    vrank_case = " << c->index << ";\n";
    tb << "    begin\n" << indent_block(c->stimulus, "      ") << "    end\n";
    tb << "    #" << options.settle_delay << ";\n";
    tb << "    $display(\"" << fmt << "\", vrank_case" << args << ");\n";
  }
  tb << "    $finish;\n";
  tb << "  end\n";
  tb << "endmodule\n";

  Testbench result{tb.str(), static_cast<int>(ordered.size()), options.marker_prefix};
  return result;
}

int count_marker_emissions(const std::string& source, const std::string& marker_prefix) {
  const std::string needle = "$display(\"" + marker_prefix + " ";
  int count = 0;
  for (auto pos = source.find(needle); pos != std::string::npos; pos = source.find(needle, pos + 1))
    ++count;
  return count;
}

}  // namespace vrank
