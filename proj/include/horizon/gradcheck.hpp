#ifndef HORIZON_GRADCHECK_HPP
#define HORIZON_GRADCHECK_HPP

#include <functional>
#include <string>
#include <vector>

#include "horizon/tape.hpp"

namespace horizon::nn {

struct GradCheckEntry {
  std::string name;
  double max_rel_error = 0.0;
  bool pass = false;
};

struct GradCheckReport {
  std::vector<GradCheckEntry> entries;
  double tolerance = 0.0;
  bool pass = false;
};

// Compares reverse-mode gradients of a deterministic scalar function against
// central finite differences. Relative error per element is
// |g_a - g_n| / max(|g_a|, |g_n|, 1e-8); a parameter passes iff its max stays
// within the tolerance.
GradCheckReport grad_check(
    const std::function<NodeId(Tape&, BoundParams&)>& fn, ParamStore& params,
    double tolerance, double step = 1e-5);

}  // namespace horizon::nn

#endif
