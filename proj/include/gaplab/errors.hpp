#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace gaplab {

// Error taxonomy shared by every module. The CLI maps any GaplabError to
// exit code 1 and prints "<kind>: <message>" on stderr; library callers can
// branch on kind() or on the concrete type.
class GaplabError : public std::runtime_error {
 public:
  GaplabError(std::string kind, const std::string& msg)
      : std::runtime_error(kind + ": " + msg), kind_(std::move(kind)) {}
  const std::string& kind() const { return kind_; }

 private:
  std::string kind_;
};

struct InvalidParameterError : GaplabError {
  explicit InvalidParameterError(const std::string& msg)
      : GaplabError("invalid-parameter", msg) {}
};

struct ParseError : GaplabError {
  explicit ParseError(const std::string& msg) : GaplabError("parse", msg) {}
};

// A distinct assignment with the same unperturbed energy sits inside the
// enumeration radius, so the per-level series is not defined.
struct DegenerateNeighborhoodError : GaplabError {
  DegenerateNeighborhoodError(const std::string& msg, std::string offending_bits)
      : GaplabError("degenerate-neighborhood", msg + " (offending assignment " + offending_bits + ")"),
        offending(std::move(offending_bits)) {}
  std::string offending;  // bitstring of the equal-energy assignment
};

struct PairTooCloseError : GaplabError {
  explicit PairTooCloseError(const std::string& msg) : GaplabError("pair-too-close", msg) {}
};

struct ResonantIntermediateError : GaplabError {
  ResonantIntermediateError(const std::string& msg, std::string intermediate_bits)
      : GaplabError("resonant-intermediate", msg + " (intermediate " + intermediate_bits + ")"),
        intermediate(std::move(intermediate_bits)) {}
  std::string intermediate;  // bitstring of the zero-cost intermediate
};

struct SizeLimitError : GaplabError {
  explicit SizeLimitError(const std::string& msg) : GaplabError("size", msg) {}
};

struct ConvergenceError : GaplabError {
  ConvergenceError(const std::string& msg, double achieved)
      : GaplabError("convergence", msg + " (achieved residual " + std::to_string(achieved) + ")"),
        achieved_residual(achieved) {}
  double achieved_residual;
};

struct IoError : GaplabError {
  explicit IoError(const std::string& msg) : GaplabError("io", msg) {}
};

}  // namespace gaplab
