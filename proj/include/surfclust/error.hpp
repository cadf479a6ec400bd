#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace surfclust {

enum class ErrorKind {
  invalid_domain,
  overflow_guard,
  out_of_domain,
  bad_index,
  length_mismatch,
  dimension_mismatch,
  rank_deficient,
  insufficient_data,
  label_out_of_range,
  empty_set,
  singular_covariance,
  invalid_config,
  invalid_sizes,
  grid_mismatch,
  parse_error,
  corrupt_input,
  io_error,
};

std::string_view to_string(ErrorKind kind);

/// Numerical failures (as opposed to bad input) map to a distinct CLI exit code.
bool is_numerical(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind), detail_(message) {}

  ErrorKind kind() const noexcept { return kind_; }
  /// Message without the kind prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorKind kind_;
  std::string detail_;
};

}  // namespace surfclust
