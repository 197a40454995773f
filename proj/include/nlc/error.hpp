#pragma once

#include <stdexcept>
#include <string>

namespace nlc {

enum class ErrorCode {
  invalid_argument = 1,
  config,
  domain,
  singular_ratio,
  singular_current,
  zero_amplitude_on_path,
  singular_system,
  resonant_denominator,
  zero_transmission,
  non_convergence,
  unconverged_truncation,
  grid_mismatch,
  io,
};

const char* error_name(ErrorCode code);

class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string& what)
    : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

private:
  ErrorCode code_;
};

} // namespace nlc
