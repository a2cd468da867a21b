#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cartan {

enum class ErrorKind {
  input,          // malformed or non-finite input
  order_mismatch, // matrices of different order
  singularity,    // (near-)singular group element or gauge
  branch,         // spectrum on the principal-log branch cut
  domain,         // point or path outside a chart / parameter domain
  closure,        // loop whose endpoints differ
  blow_up,        // non-finite ODE state
  sampling,       // holonomy sampling could not stay on the principal branch
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Every failure raised by the library. The message is meant to be shown
/// verbatim by front ends.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + " error: " + what),
        kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace cartan
