#pragma once

#include <stdexcept>
#include <string>

namespace ellip {

// Every failure mode carries a code naming the violated hypothesis, so tests
// can assert on the reason rather than on message text.
enum class Errc {
  NotSymmetric,
  NotPositiveDefinite,
  OddDiagonal,
  NotIntegral,
  NumericalBreakdown,
  ModulusTooLarge,
  Overflow,
  LengthMismatch,
  NonInvertible,
  NotSquarefreeOddPart,
  SingularFactor,
  MismatchDetected,
  EmptyPointSet,
  DegenerateData,
  DegenerateGegenbauer,
  GridTooCoarse,
  QuadratureNonConvergence,
  UsageError,
};

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Errc code() const { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) { throw Error(code, what); }

}  // namespace ellip
