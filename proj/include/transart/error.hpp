#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace transart {

/// Domain error raised by every toolkit operation.
///
/// `kind()` is a stable identifier such as "DuplicateId" or "BackendUnavailable";
/// the CLI reports it verbatim and tests match on it.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& message)
      : std::runtime_error(message), kind_(std::move(kind)) {}

  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

[[noreturn]] inline void fail(std::string kind, const std::string& message) {
  throw Error(std::move(kind), message);
}

}  // namespace transart
