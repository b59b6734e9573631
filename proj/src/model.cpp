#include "vrank/model.hpp"

#include <set>

#include "vrank/error.hpp"

namespace vrank {

std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::invalid_argument: return "invalid_argument";
    case Errc::invalid_config: return "invalid_config";
    case Errc::config_error: return "config_error";
    case Errc::provider_unreachable: return "provider_unreachable";
    case Errc::insufficient_test_cases: return "insufficient_test_cases";
    case Errc::interface_parse_error: return "interface_parse_error";
    case Errc::no_distinguishing_case: return "no_distinguishing_case";
    case Errc::domain_error: return "domain_error";
    case Errc::missing_reference_testbench: return "missing_reference_testbench";
    case Errc::io_error: return "io_error";
    case Errc::parse_error: return "parse_error";
  }
  return "unknown";
}

void validate(const Problem& problem) {
  if (problem.id.empty()) throw Error(Errc::invalid_argument, "problem id is empty");
  if (problem.module_interface.empty())
    throw Error(Errc::invalid_argument, "problem '" + problem.id + "' has no module interface");
}

void validate_manifest(const std::vector<Problem>& manifest) {
  std::set<std::string> seen;
  for (const auto& p : manifest) {
    validate(p);
    if (!seen.insert(p.id).second)
      throw Error(Errc::invalid_argument, "duplicate problem id '" + p.id + "'");
  }
}

std::string to_string(TraceStatus status) {
  switch (status) {
    case TraceStatus::ok: return "ok";
    case TraceStatus::compile_error: return "compile_error";
    case TraceStatus::runtime_error: return "runtime_error";
    case TraceStatus::timeout: return "timeout";
    case TraceStatus::malformed_output: return "malformed_output";
  }
  return "unknown";
}

TraceStatus trace_status_from_string(const std::string& text) {
  for (auto s : {TraceStatus::ok, TraceStatus::compile_error, TraceStatus::runtime_error,
                 TraceStatus::timeout, TraceStatus::malformed_output}) {
    if (to_string(s) == text) return s;
  }
  throw Error(Errc::parse_error, "unknown trace status '" + text + "'");
}

std::string to_string(LossKind kind) {
  return kind == LossKind::strict ? "strict" : "case";
}

LossKind loss_kind_from_string(const std::string& text) {
  if (text == "strict") return LossKind::strict;
  if (text == "case") return LossKind::case_wise;
  throw Error(Errc::invalid_config, "loss must be 'strict' or 'case', got '" + text + "'");
}

}  // namespace vrank
