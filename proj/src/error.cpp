#include "revaudit/error.hpp"

namespace revaudit {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::parse: return "parse_error";
    case ErrorKind::referential: return "referential_error";
    case ErrorKind::validation: return "validation_error";
    case ErrorKind::infeasible: return "infeasible";
    case ErrorKind::rank_deficient: return "rank_deficient";
    case ErrorKind::sample_size: return "sample_size";
    case ErrorKind::no_data: return "no_data";
    case ErrorKind::missing_artifact: return "missing_artifact";
    case ErrorKind::io: return "io_error";
    case ErrorKind::usage: return "usage_error";
  }
  return "error";
}

}  // namespace revaudit
