#include "contagion/error.hpp"

namespace contagion {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Parse: return "parse error";
    case ErrorKind::Schema: return "schema error";
    case ErrorKind::Range: return "range error";
    case ErrorKind::Conflict: return "conflict error";
    case ErrorKind::NotFound: return "not-found error";
    case ErrorKind::Lookup: return "lookup error";
    case ErrorKind::Shape: return "shape error";
    case ErrorKind::Domain: return "domain error";
    case ErrorKind::Degenerate: return "degenerate-input error";
    case ErrorKind::Data: return "data error";
    case ErrorKind::Parameter: return "parameter error";
    case ErrorKind::Config: return "config error";
  }
  return "error";
}

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NotFound:
      return 3;
    case ErrorKind::Config:
    case ErrorKind::Parameter:
      return 4;
    default:
      return 2;
  }
}

}  // namespace contagion
