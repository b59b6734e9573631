#include "vrank/simulation.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

#include "vrank/error.hpp"
#include "vrank/json_io.hpp"
#include "vrank/subprocess.hpp"

namespace vrank {

namespace fs = std::filesystem;

namespace {

bool has_placeholder(const std::string& tmpl, std::string_view name) {
  return tmpl.find(std::string("{") + std::string(name) + "}") != std::string::npos;
}

std::string substitute(std::string tmpl, const std::map<std::string, std::string>& values) {
  for (const auto& [key, value] : values) {
    const std::string needle = "{" + key + "}";
    for (auto pos = tmpl.find(needle); pos != std::string::npos; pos = tmpl.find(needle, pos + value.size()))
      tmpl.replace(pos, needle.size(), value);
  }
  return tmpl;
}

bool on_path(const std::string& exe) {
  const char* path = std::getenv("PATH");
  if (!path) return false;
  std::istringstream dirs(path);
  std::string dir;
  while (std::getline(dirs, dir, ':')) {
    std::error_code ec;
    if (!dir.empty() && fs::exists(fs::path(dir) / exe, ec)) return true;
  }
  return false;
}

class ScratchDir {
 public:
  explicit ScratchDir(const fs::path& root) {
    fs::path base = root.empty() ? fs::temp_directory_path() : root;
    fs::create_directories(base);
    std::string tmpl = (base / "vrank-sim-XXXXXX").string();
    if (::mkdtemp(tmpl.data()) == nullptr) throw Error(Errc::io_error, "mkdtemp failed under " + base.string());
    path_ = tmpl;
  }
  ScratchDir(const ScratchDir&) = delete;
  ScratchDir& operator=(const ScratchDir&) = delete;
  ~ScratchDir() {
    if (keep_) return;
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  const fs::path& path() const { return path_; }
  void keep() { keep_ = true; }

 private:
  fs::path path_;
  bool keep_ = false;
};

SimulationOutcome simulate_in(const ScratchDir& dir, const std::string& source,
                              const std::string& testbench_source, const SimulatorConfig& cfg,
                              SimRole role) {
  const auto candidate_file = dir.path() / "candidate.v";
  const auto testbench_file = dir.path() / "testbench.v";
  const auto binary = dir.path() / "sim.out";
  write_file(candidate_file, source);
  write_file(testbench_file, testbench_source);
  const std::map<std::string, std::string> values = {
      {"candidate", shell_quote(candidate_file.string())},
      {"testbench", shell_quote(testbench_file.string())},
      {"binary", shell_quote(binary.string())},
      {"workdir", shell_quote(dir.path().string())},
      {"role", role == SimRole::trace ? "trace" : "judge"},
  };

  SimulationOutcome outcome;
  if (!cfg.compile_command_template.empty()) {
    auto compile = run_shell(substitute(cfg.compile_command_template, values), dir.path(), cfg.compile_timeout);
    outcome.err = compile.err;
    if (compile.timed_out) {
      outcome.timed_out = true;
      return outcome;
    }
    if (!compile.exited || compile.exit_code != 0) return outcome;
  }
  outcome.compiled = true;

  auto run = run_shell(substitute(cfg.run_command_template, values), dir.path(), cfg.timeout);
  outcome.out = std::move(run.out);
  outcome.err += run.err;
  outcome.timed_out = run.timed_out;
  outcome.exit_code = run.exit_code;
  outcome.exited_cleanly = run.exited && run.exit_code == 0 && !run.timed_out;
  return outcome;
}

std::string to_lower(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

std::string bits_to_hex(std::string bits) {
  while (bits.size() % 4 != 0) bits.insert(bits.begin(), '0');
  std::string hex;
  for (std::size_t i = 0; i < bits.size(); i += 4) {
    auto group = bits.substr(i, 4);
    if (group.find_first_not_of("01") == std::string::npos) {
      hex.push_back("0123456789abcdef"[std::stoi(group, nullptr, 2)]);
    } else if (group.find_first_not_of('z') == std::string::npos) {
      hex.push_back('z');
    } else {
      hex.push_back('x');
    }
  }
  return hex;
}

std::optional<std::string> digits_to_bits(const std::string& digits, int bits_per_digit) {
  std::string bits;
  for (char c : digits) {
    if (c == 'x' || c == 'z') {
      bits.append(bits_per_digit, c);
      continue;
    }
    int v = c - '0';
    if (v < 0 || v >= (1 << bits_per_digit)) return std::nullopt;
    for (int b = bits_per_digit - 1; b >= 0; --b) bits.push_back(((v >> b) & 1) ? '1' : '0');
  }
  return bits;
}

std::string decimal_to_hex(const std::string& digits) {
  if (digits.empty() || digits.size() > 19 || digits.find_first_not_of("0123456789") != std::string::npos)
    return digits;
  std::ostringstream os;
  os << std::hex << std::stoull(digits);
  return os.str();
}

}  // namespace

void SimulatorConfig::validate() const {
  if (run_command_template.empty()) throw Error(Errc::invalid_config, "simulator run command is empty");
  const std::string all = compile_command_template + " " + run_command_template;
  if (!has_placeholder(all, "candidate") || !has_placeholder(all, "testbench"))
    throw Error(Errc::invalid_config, "simulator commands must reference {candidate} and {testbench}");
  if (max_parallel_simulations < 1) throw Error(Errc::invalid_config, "max_parallel_simulations must be >= 1");
  if (timeout.count() <= 0) throw Error(Errc::invalid_config, "simulation timeout must be positive");
}

SimulatorConfig iverilog_simulator() {
  SimulatorConfig cfg;
  cfg.compile_command_template = "iverilog -g2012 -o {binary} {testbench} {candidate}";
  cfg.run_command_template = "vvp -n {binary}";
  return cfg;
}

SimulatorConfig verilator_simulator() {
  // pip-packaged Verilator ships as verilator-cli and expects PYTHON3 from make.
  // The runtime objects and a precompiled runtime header are built once and
  // cached per Verilator version; later compiles only build the design.
  const std::string exe = on_path("verilator") ? "verilator" : "verilator-cli";
  SimulatorConfig cfg;
  cfg.compile_command_template = R"SH(set -e
V=)SH" + exe + R"SH(
export MAKEFLAGS='PYTHON3=python3 OPT_FAST=-O0 OPT_SLOW=-O0 OPT_GLOBAL=-O0'
INC="$("$V" --getenv VERILATOR_ROOT)/include"
RT="${VRANK_VERILATOR_CACHE:-${XDG_CACHE_HOME:-$HOME/.cache}/vrank/verilator}/$("$V" --version | tr -c 'A-Za-z0-9.' _)"
OBJ={workdir}/obj
"$V" --cc --exe --main --timing -Wno-fatal -Wno-lint -Wno-style -Wno-TIMESCALEMOD --prefix Vsim --Mdir "$OBJ" -o {binary} {testbench} {candidate} >/dev/null
if [ -f "$RT/ready" ]; then
  cp "$RT"/verilated*.o "$OBJ"/ && touch "$OBJ"/verilated*.o
  make -s -C "$OBJ" -f Vsim.mk CXXFLAGS="-std=c++20 -include $RT/vrank_rt.h" >/dev/null
else
  make -s -C "$OBJ" -f Vsim.mk CXXFLAGS=-std=c++20 >/dev/null
  mkdir -p "$(dirname "$RT")"
  T=$(mktemp -d "$RT.tmp.XXXXXX")
  cp "$OBJ"/verilated*.o "$T"/
  printf '#include "verilated.h"\n#include "verilated_timing.h"\n' > "$T/vrank_rt.h"
  c++ -O0 -std=c++20 -DVL_TIME_CONTEXT -I"$INC" -I"$INC/vltstd" -DVERILATOR=1 -DVM_COVERAGE=0 -DVM_SC=0 \
    -DVM_TIMING=1 -DVM_TRACE=0 -DVM_TRACE_FST=0 -DVM_TRACE_VCD=0 -DVM_TRACE_SAIF=0 \
    -x c++-header "$T/vrank_rt.h" -o "$T/vrank_rt.h.gch" 2>/dev/null || true
  touch "$T/ready"
  mv -T "$T" "$RT" 2>/dev/null || rm -rf "$T"
fi)SH";
  cfg.run_command_template = "{binary}";
  return cfg;
}

SimulatorConfig mock_simulator(const fs::path& mocksim_path, const fs::path& table) {
  SimulatorConfig cfg;
  // commands run inside the scratch directory
  const auto exe = shell_quote(mocksim_path.is_absolute() ? mocksim_path.string() : fs::absolute(mocksim_path).string());
  const auto tab = shell_quote(fs::absolute(table).string());
  cfg.compile_command_template = exe + " compile --table " + tab + " --candidate {candidate}";
  cfg.run_command_template = exe + " run --table " + tab + " --role {role} --candidate {candidate} --testbench {testbench}";
  return cfg;
}

std::string normalize_record(const std::string& line) {
  std::istringstream in(line);
  std::string token;
  std::string out;
  while (in >> token) {
    auto eq = token.find('=');
    if (eq != std::string::npos) {
      for (auto i = eq + 1; i < token.size(); ++i)
        token[i] = static_cast<char>(std::tolower(static_cast<unsigned char>(token[i])));
    }
    if (!out.empty()) out.push_back(' ');
    out += token;
  }
  return out;
}

ExecutionTrace parse_trace(const std::string& stdout_text, const Testbench& testbench) {
  const auto m = static_cast<std::size_t>(testbench.case_count);
  std::vector<std::optional<std::string>> slots(m);
  std::istringstream lines(stdout_text);
  std::string line;
  while (std::getline(lines, line)) {
    auto record = normalize_record(line);
    std::istringstream tokens(record);
    std::string head;
    std::string index_text;
    tokens >> head;
    if (head != testbench.marker_prefix) continue;
    tokens >> index_text;
    if (index_text.empty() || index_text.find_first_not_of("0123456789") != std::string::npos ||
        index_text.size() > 9)
      return failed_trace(TraceStatus::malformed_output);
    auto index = static_cast<std::size_t>(std::stoul(index_text));
    if (index >= m || slots[index]) return failed_trace(TraceStatus::malformed_output);
    slots[index] = std::move(record);
  }
  ExecutionTrace trace;
  trace.records.reserve(m);
  for (auto& slot : slots) {
    if (!slot) return failed_trace(TraceStatus::malformed_output);
    trace.records.push_back(std::move(*slot));
  }
  return trace;
}

std::map<std::string, std::string> record_fields(const std::string& record) {
  std::map<std::string, std::string> fields;
  std::istringstream in(record);
  std::string token;
  while (in >> token) {
    auto eq = token.find('=');
    if (eq == std::string::npos || eq == 0) continue;
    fields[token.substr(0, eq)] = token.substr(eq + 1);
  }
  return fields;
}

std::string canonical_value(const std::string& value) {
  std::string v;
  for (char c : to_lower(value))
    if (!std::isspace(static_cast<unsigned char>(c)) && c != '_') v.push_back(c);
  if (v.empty()) return v;

  std::string hex = v;
  if (auto tick = v.find('\''); tick != std::string::npos) {
    std::size_t pos = tick + 1;
    if (pos < v.size() && v[pos] == 's') ++pos;
    if (pos < v.size()) {
      const char base = v[pos];
      const std::string digits = v.substr(pos + 1);
      std::optional<std::string> bits;
      switch (base) {
        case 'h': hex = digits; break;
        case 'b': bits = digits_to_bits(digits, 1); break;
        case 'o': bits = digits_to_bits(digits, 3); break;
        case 'd': hex = decimal_to_hex(digits); break;
        default: break;
      }
      if (bits) hex = bits_to_hex(*bits);
    }
  } else if (v.rfind("0x", 0) == 0 && v.size() > 2) {
    hex = v.substr(2);
  } else if (v.rfind("0b", 0) == 0 && v.size() > 2) {
    if (auto bits = digits_to_bits(v.substr(2), 1)) hex = bits_to_hex(*bits);
  }
  auto first = hex.find_first_not_of('0');
  if (first == std::string::npos) return "0";
  return hex.substr(first);
}

SimulationOutcome simulate(const std::string& source, const std::string& testbench_source,
                           const SimulatorConfig& cfg, SimRole role) {
  ScratchDir dir(cfg.scratch_root);
  auto outcome = simulate_in(dir, source, testbench_source, cfg, role);
  if (cfg.keep_failed && !outcome.exited_cleanly) dir.keep();
  return outcome;
}

ExecutionTrace run_candidate(const Candidate& candidate, const Testbench& testbench,
                             const SimulatorConfig& cfg) {
  ScratchDir dir(cfg.scratch_root);
  const auto outcome = simulate_in(dir, candidate.source, testbench.source, cfg, SimRole::trace);
  ExecutionTrace trace;
  if (!outcome.compiled) {
    trace = failed_trace(outcome.timed_out ? TraceStatus::timeout : TraceStatus::compile_error);
  } else if (outcome.timed_out) {
    trace = failed_trace(TraceStatus::timeout);
  } else if (!outcome.exited_cleanly) {
    trace = failed_trace(TraceStatus::runtime_error);
  } else {
    trace = parse_trace(outcome.out, testbench);
  }
  if (cfg.keep_failed && !trace.ok()) {
    dir.keep();
    write_file(dir.path() / "stdout.txt", outcome.out);
    write_file(dir.path() / "stderr.txt", outcome.err);
  }
  return trace;
}

std::vector<ExecutionTrace> run_all(const std::vector<Candidate>& candidates, const Testbench& testbench,
                                    const SimulatorConfig& cfg) {
  if (candidates.empty()) throw Error(Errc::invalid_argument, "run_all needs at least one candidate");
  cfg.validate();
  std::vector<ExecutionTrace> traces(candidates.size());
  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr error;
  auto worker = [&] {
    for (auto i = next++; i < candidates.size(); i = next++) {
      try {
        traces[i] = run_candidate(candidates[i], testbench, cfg);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    }
  };
  const auto workers = std::min<std::size_t>(static_cast<std::size_t>(cfg.max_parallel_simulations),
                                             candidates.size());
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  if (error) std::rethrow_exception(error);
  return traces;
}

}  // namespace vrank
