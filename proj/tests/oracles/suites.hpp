#pragma once

// Oracle suites shared by the unit tests and the acceptance report. Each suite
// runs a fixed number of randomized cases from a fixed seed and reports the
// first disagreement it finds.

#include <cstdint>
#include <string>

namespace oracle {

struct SuiteResult {
  bool passed = true;
  int cases = 0;
  std::string detail;  // first failure, or a short summary on success
};

SuiteResult necklace_suite(int max_points = 16);
SuiteResult lbp_suite(int images = 50, std::uint64_t seed = 1);
SuiteResult hog_suite(int images = 20, std::uint64_t seed = 2);
SuiteResult mlp_gradient_suite(int seeds = 20, double h = 1e-5, double max_relative = 1e-4);
SuiteResult svm_kkt_suite(int problems = 10, double tol = 1e-3, std::uint64_t seed = 4);
SuiteResult cart_suite(int problems = 20, std::uint64_t seed = 5);
SuiteResult fold_suite(int triples = 200, std::uint64_t seed = 6);
SuiteResult featstore_suite(int matrices = 100, std::uint64_t seed = 7);

}  // namespace oracle
