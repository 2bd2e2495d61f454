// Acceptance checks: one PASS/FAIL line per criterion. Exit code 0 only if every selected criterion passes.
#include <CLI11.hpp>
#include <iostream>

#include "ght/errors.hpp"
#include "ght/suites.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Acceptance checks for the gyrating H'-T family"};
  int criterion = 0;
  ght::SuiteOptions opts;
  app.add_option("--criterion", criterion, "Criterion number 1-10 (0 runs all)")->check(CLI::Range(0, 10));
  app.add_option("--fixture", opts.fixture, "Relaxed qtz mesh shared by criteria 8 and 9");
  app.add_option("--seed", opts.seed, "Sampling seed");
  app.add_option("--res", opts.res, "Resolution of the surface criteria");
  CLI11_PARSE(app, argc, argv);

  const auto& names = ght::suite_names();
  bool all = true;
  for (int k = 1; k <= int(names.size()); ++k) {
    if (criterion != 0 && k != criterion) continue;
    ght::SuiteResult r;
    try {
      r = ght::run_suite(names[k - 1], opts);
    } catch (const std::exception& e) {
      r.id = k;
      r.name = names[k - 1];
      r.summary = std::string("error: ") + e.what();
    }
    all = all && r.passed;
    std::cout << (r.passed ? "PASS" : "FAIL") << " [" << r.id << "] " << r.name << ": " << r.summary << " ("
              << r.seconds << " s)" << std::endl;
  }
  return all ? 0 : 1;
}
