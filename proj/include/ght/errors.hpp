#ifndef GHT_ERRORS_HPP
#define GHT_ERRORS_HPP

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace ght {

struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

// Raised for the numeric failures the CLI maps to exit code 1.
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct PoleError : NumericError {
  std::complex<double> pole;
  PoleError(const std::string& what, std::complex<double> p) : NumericError(what), pole(p) {}
};

struct ContinuationError : NumericError {
  using NumericError::NumericError;
};

struct StepRefinementError : NumericError {
  using NumericError::NumericError;
};

struct QuadratureError : NumericError {
  double achieved;
  QuadratureError(const std::string& what, double tol) : NumericError(what), achieved(tol) {}
};

struct BracketingError : NumericError {
  using NumericError::NumericError;
};

struct RefinementError : NumericError {
  using NumericError::NumericError;
};

struct AssemblyError : NumericError {
  double worst_distance;
  AssemblyError(const std::string& what, double d) : NumericError(what), worst_distance(d) {}
};

struct QualityError : NumericError {
  std::vector<int> offenders;
  QualityError(const std::string& what, std::vector<int> tris)
      : NumericError(what), offenders(std::move(tris)) {}
};

struct GeometryError : NumericError {
  using NumericError::NumericError;
};

struct GenerationError : NumericError {
  using NumericError::NumericError;
};

struct StalledError : NumericError {
  using NumericError::NumericError;
};

struct IncomparableError : NumericError {
  using NumericError::NumericError;
};

}  // namespace ght

#endif
