#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace dioph {

/// Base class for all errors raised by this library.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// A decision (floor, comparison, interval membership) could not be
/// certified before the precision cap was reached.
struct AmbiguousAtMaxPrecision : Error {
  explicit AmbiguousAtMaxPrecision(const std::string& msg)
      : Error("ambiguous at max precision: " + msg) {}
};

struct DomainError : Error {
  explicit DomainError(const std::string& msg) : Error(msg) {}
};

struct NotInvertible : Error {
  explicit NotInvertible(const std::string& msg) : Error(msg) {}
};

struct NotCoprime : Error {
  explicit NotCoprime(const std::string& msg) : Error(msg) {}
};

struct EmptyRange : Error {
  explicit EmptyRange(const std::string& msg) : Error(msg) {}
};

struct WorkCapExceeded : Error {
  explicit WorkCapExceeded(const std::string& msg) : Error(msg) {}
};

struct InvalidQuery : Error {
  explicit InvalidQuery(const std::string& msg) : Error(msg) {}
};

/// h*alpha hit an integer, so the Erdos-Turan precondition fails at h.
struct IntegerMultiple : Error {
  std::int64_t h;
  explicit IntegerMultiple(std::int64_t h_)
      : Error("h*alpha is an integer at h=" + std::to_string(h_)), h(h_) {}
};

/// A counting bound that is a theorem was exceeded; this signals a bug.
struct LemmaViolation : Error {
  std::int64_t H;
  explicit LemmaViolation(std::int64_t H_)
      : Error("bound violated at H=" + std::to_string(H_)), H(H_) {}
};

struct SkippedSmallN : Error {
  explicit SkippedSmallN(const std::string& msg) : Error(msg) {}
};

struct ClosureViolation : Error {
  explicit ClosureViolation(const std::string& msg) : Error(msg) {}
};

struct ParseError : Error {
  explicit ParseError(const std::string& msg) : Error(msg) {}
};

struct ValidationError : Error {
  explicit ValidationError(const std::string& msg) : Error(msg) {}
};

}  // namespace dioph
