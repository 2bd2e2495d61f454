#ifndef GHT_SUITES_HPP
#define GHT_SUITES_HPP

#include <string>
#include <vector>

#include <json.hpp>

namespace ght {

struct SuiteOptions {
  unsigned seed = 1;
  std::string fixture;  // relaxed qtz mesh written by the nets suite and read by the xval suite
  int res = 96;
};

struct SuiteResult {
  int id = 0;
  std::string name;
  bool passed = false;
  double seconds = 0;
  std::string summary;      // one line with the measured values
  nlohmann::json metrics;   // every measured value and threshold
};

// Acceptance checks, one per criterion, in order:
// 1 theta, 2 gauss, 3 period, 4 curve, 5 topology, 6 minimality, 7 embedded, 8 nets, 9 xval, 10 gradient.
const std::vector<std::string>& suite_names();
SuiteResult run_suite(const std::string& name, const SuiteOptions& options);

// Re tau of the member with the given c/a (secant on the traced family), for cross-validation.
double re_tau_for_c_over_a(double c_over_a, double guess = 0.5);

}  // namespace ght

#endif
