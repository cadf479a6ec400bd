#include "surfclust/error.hpp"

namespace surfclust {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_domain: return "invalid-domain";
    case ErrorKind::overflow_guard: return "overflow-guard";
    case ErrorKind::out_of_domain: return "out-of-domain";
    case ErrorKind::bad_index: return "bad-index";
    case ErrorKind::length_mismatch: return "length-mismatch";
    case ErrorKind::dimension_mismatch: return "dimension-mismatch";
    case ErrorKind::rank_deficient: return "rank-deficient";
    case ErrorKind::insufficient_data: return "insufficient-data";
    case ErrorKind::label_out_of_range: return "label-out-of-range";
    case ErrorKind::empty_set: return "empty-set";
    case ErrorKind::singular_covariance: return "singular-covariance";
    case ErrorKind::invalid_config: return "invalid-config";
    case ErrorKind::invalid_sizes: return "invalid-sizes";
    case ErrorKind::grid_mismatch: return "grid-mismatch";
    case ErrorKind::parse_error: return "parse-error";
    case ErrorKind::corrupt_input: return "corrupt-input";
    case ErrorKind::io_error: return "io-error";
  }
  return "unknown";
}

bool is_numerical(ErrorKind kind) {
  return kind == ErrorKind::rank_deficient || kind == ErrorKind::singular_covariance;
}

}  // namespace surfclust
