#pragma once

#include <stdexcept>
#include <string>

namespace hjmcal {

// Error categories map to process exit codes: data errors -> 2, solver failures -> 3.
enum class ErrorCategory { Data, Solver };

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory cat, std::string kind, const std::string& what)
      : std::runtime_error(kind + ": " + what), cat_(cat), kind_(std::move(kind)) {}
  ErrorCategory category() const noexcept { return cat_; }
  const std::string& kind() const noexcept { return kind_; }

 private:
  ErrorCategory cat_;
  std::string kind_;
};

class DataError : public Error {
 public:
  DataError(std::string kind, const std::string& what)
      : Error(ErrorCategory::Data, std::move(kind), what) {}
};

class SolverError : public Error {
 public:
  SolverError(std::string kind, const std::string& what)
      : Error(ErrorCategory::Solver, std::move(kind), what) {}
};

// Data-shaped failures.
struct InfeasibleQuotes : DataError {
  explicit InfeasibleQuotes(const std::string& w) : DataError("InfeasibleQuotes", w) {}
};
struct EmptyInput : DataError {
  explicit EmptyInput(const std::string& w) : DataError("EmptyInput", w) {}
};
struct OutOfGrid : DataError {
  explicit OutOfGrid(const std::string& w) : DataError("OutOfGrid", w) {}
};
struct NonPositivePrice : DataError {
  explicit NonPositivePrice(const std::string& w) : DataError("NonPositivePrice", w) {}
};
struct DegenerateWeights : DataError {
  explicit DegenerateWeights(const std::string& w) : DataError("DegenerateWeights", w) {}
};
struct PriceOutOfBounds : DataError {
  explicit PriceOutOfBounds(const std::string& w) : DataError("PriceOutOfBounds", w) {}
};
struct DivergentIntegral : DataError {
  explicit DivergentIntegral(const std::string& w) : DataError("DivergentIntegral", w) {}
};
struct NegativeIncrement : DataError {
  explicit NegativeIncrement(const std::string& w) : DataError("NegativeIncrement", w) {}
};
struct NoValidGrouping : DataError {
  explicit NoValidGrouping(const std::string& w) : DataError("NoValidGrouping", w) {}
};
struct GridMismatch : DataError {
  explicit GridMismatch(const std::string& w) : DataError("GridMismatch", w) {}
};
struct BadConfig : DataError {
  explicit BadConfig(const std::string& w) : DataError("BadConfig", w) {}
};

// Solver-shaped failures.
struct SolverStall : SolverError {
  explicit SolverStall(const std::string& w) : SolverError("SolverStall", w) {}
};
struct Infeasible : SolverError {
  explicit Infeasible(const std::string& w) : SolverError("Infeasible", w) {}
};
struct InfeasibleConstraint : SolverError {
  explicit InfeasibleConstraint(const std::string& w) : SolverError("InfeasibleConstraint", w) {}
};
struct ExtractionDegenerate : SolverError {
  explicit ExtractionDegenerate(const std::string& w) : SolverError("ExtractionDegenerate", w) {}
};
struct NoPositiveRoot : SolverError {
  explicit NoPositiveRoot(const std::string& w) : SolverError("NoPositiveRoot", w) {}
};
struct NoConvergence : SolverError {
  explicit NoConvergence(const std::string& w) : SolverError("NoConvergence", w) {}
};
struct QuadratureNoConvergence : SolverError {
  explicit QuadratureNoConvergence(const std::string& w)
      : SolverError("QuadratureNoConvergence", w) {}
};

}  // namespace hjmcal
