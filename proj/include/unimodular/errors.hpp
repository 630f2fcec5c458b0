#pragma once

#include <stdexcept>
#include <string>

namespace unimodular {

// Exit codes shared by the CLI: 0 pass, 1 goodness-of-fit failure,
// 2 input error, 3 numeric non-convergence.
enum class ExitCode : int { pass = 0, gof_failure = 1, input_error = 2, non_convergence = 3 };

/// Invalid argument or domain violation supplied by the caller.
class InputError : public std::invalid_argument {
 public:
  explicit InputError(const std::string& what) : std::invalid_argument(what) {}
};

/// A numerical procedure failed to reach its requested accuracy.
class NonConvergence : public std::runtime_error {
 public:
  explicit NonConvergence(const std::string& what) : std::runtime_error(what) {}
};

/// Truncated-contour tail bound is larger than the tolerance; raise T or n.
class TailBoundExceeded : public NonConvergence {
 public:
  explicit TailBoundExceeded(const std::string& what) : NonConvergence(what) {}
};

/// The averaged characteristic polynomial has a complex-conjugate root pair.
class ComplexRootPair : public NonConvergence {
 public:
  explicit ComplexRootPair(const std::string& what) : NonConvergence(what) {}
};

inline void require(bool condition, const std::string& message) {
  if (!condition) throw InputError(message);
}

}  // namespace unimodular
