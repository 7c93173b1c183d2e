#pragma once

#include <stdexcept>
#include <string>

namespace vrm {

/// A documented precondition of an operation does not hold. `condition`
/// names the violated requirement, e.g. "N >= 8(b-a)^2/xi^2".
class PreconditionError : public std::invalid_argument {
 public:
  PreconditionError(std::string condition, const std::string& detail)
      : std::invalid_argument(condition + ": " + detail), condition_(std::move(condition)) {}

  const std::string& condition() const noexcept { return condition_; }

 private:
  std::string condition_;
};

/// The requested quantity has no closed form for this input (e.g. the
/// marginal CDF of a regression task's label).
class UnsupportedError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

inline void require(bool ok, const char* condition, const std::string& detail = {}) {
  if (!ok) throw PreconditionError(condition, detail.empty() ? "violated" : detail);
}

}  // namespace vrm
