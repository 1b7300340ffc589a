#ifndef HORIZON_CHECKS_HPP
#define HORIZON_CHECKS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "horizon/gradcheck.hpp"

namespace horizon::checks {

struct SuiteResult {
  std::string name;
  nn::GradCheckReport report;
};

// Finite-difference suites for the tape primitives and the recurrent cells
// on 1-channel 3x3 spatial instances. `which` is one of: primitives,
// standard, naive_residual, residual_dense, tcn, all.
std::vector<SuiteResult> gradcheck_suite(const std::string& which,
                                         double tolerance, std::uint64_t seed);

bool all_pass(const std::vector<SuiteResult>& results);

}  // namespace horizon::checks

#endif
