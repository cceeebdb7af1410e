#pragma once

#include <stdexcept>
#include <string>

namespace canheight {

/// Broad failure classes. `Input` errors come from malformed or invalid user
/// data; `Computation` errors are contract violations discovered while
/// computing (exceptional targets, exhausted budgets, lost precision).
enum class ErrorKind {
  Input,
  DegenerateMap,
  ExceptionalTarget,
  Budget,
  Precision,
  Computation,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

}  // namespace canheight
