#include "horizon/gradcheck.hpp"

#include <cmath>

namespace horizon::nn {

namespace {

double eval(const std::function<NodeId(Tape&, BoundParams&)>& fn,
            ParamStore& params) {
  Tape tape;
  BoundParams bound(tape, params);
  NodeId loss = fn(tape, bound);
  return tape.value(loss).item();
}

}  // namespace

GradCheckReport grad_check(
    const std::function<NodeId(Tape&, BoundParams&)>& fn, ParamStore& params,
    double tolerance, double step) {
  GradCheckReport report;
  report.tolerance = tolerance;

  params.zero_grads();
  {
    Tape tape;
    BoundParams bound(tape, params);
    NodeId loss = fn(tape, bound);
    tape.backward(loss);
    bound.accumulate_grads(params);
  }

  report.pass = true;
  for (auto& p : params.all()) {
    GradCheckEntry entry;
    entry.name = p.name;
    for (std::int64_t i = 0; i < p.value.size(); ++i) {
      double saved = p.value[i];
      p.value[i] = saved + step;
      double f_plus = eval(fn, params);
      p.value[i] = saved - step;
      double f_minus = eval(fn, params);
      p.value[i] = saved;
      double g_n = (f_plus - f_minus) / (2.0 * step);
      double g_a = p.grad[i];
      double rel = std::fabs(g_a - g_n) /
                   std::max({std::fabs(g_a), std::fabs(g_n), 1e-8});
      entry.max_rel_error = std::max(entry.max_rel_error, rel);
    }
    entry.pass = entry.max_rel_error <= tolerance;
    report.pass = report.pass && entry.pass;
    report.entries.push_back(std::move(entry));
  }
  return report;
}

}  // namespace horizon::nn
