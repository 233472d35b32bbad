#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace padic {

enum class Errc {
  InvalidArgument,
  InfiniteValuation,
  NotPAdicInteger,
  MismatchedPrime,
  InsufficientDepth,
  InsufficientPrecision,
  BelowThreshold,
  BudgetExceeded,
  NoSolution,
  Hypothesis,
  Parse,
};

const char* errc_name(Errc e);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

/// Raised when a theorem's hypotheses are not met. Each entry of `failed`
/// names one violated inequality, e.g. "sum tau_i > n+1".
class HypothesisError : public Error {
 public:
  explicit HypothesisError(std::vector<std::string> failed);
  const std::vector<std::string>& failed() const noexcept { return failed_; }

 private:
  std::vector<std::string> failed_;
};

/// Collects hypothesis failures and throws them together.
class HypothesisCheck {
 public:
  void require(bool ok, std::string what) {
    if (!ok) failed_.push_back(std::move(what));
  }
  bool ok() const noexcept { return failed_.empty(); }
  const std::vector<std::string>& failed() const noexcept { return failed_; }
  void throw_if_failed() const {
    if (!failed_.empty()) throw HypothesisError(failed_);
  }

 private:
  std::vector<std::string> failed_;
};

}  // namespace padic
