#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace contagion {

enum class ErrorKind {
  Parse,       // malformed record
  Schema,      // well-formed record violating the file schema
  Range,       // value outside its allowed interval
  Conflict,    // duplicate key
  NotFound,    // requested user absent
  Lookup,      // provider has no entry for an id
  Shape,       // dimension or topic/window mismatch
  Domain,      // negative entry where nonnegative is required
  Degenerate,  // input on which the quantity is undefined
  Data,        // internally inconsistent records
  Parameter,   // caller-supplied parameter out of range
  Config,      // invalid command-line / generator configuration
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Process exit code associated with an error kind: 2 for input-data
// problems, 3 for a missing user, 4 for configuration problems.
int exit_code(ErrorKind kind);

}  // namespace contagion
