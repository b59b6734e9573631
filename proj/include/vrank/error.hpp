#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace vrank {

enum class Errc {
  invalid_argument,
  invalid_config,
  config_error,
  provider_unreachable,
  insufficient_test_cases,
  interface_parse_error,
  no_distinguishing_case,
  domain_error,
  missing_reference_testbench,
  io_error,
  parse_error,
};

std::string_view to_string(Errc code);

/// Every recoverable failure in the library surfaces as this exception; the
/// code names the failure class, what() carries the detail.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace vrank
