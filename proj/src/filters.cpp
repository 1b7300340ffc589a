#include "horizon/filters.hpp"

#include "horizon/errors.hpp"

namespace horizon::filters {

geom::HorizonParams smooth_step(SmoothingState& state,
                                const geom::HorizonParams& x) {
  if (!(state.alpha > 0.0) || state.alpha > 1.0)
    throw BadAlpha("alpha must be in (0, 1]");
  if (!state.primed) {
    state.s = x;
    state.primed = true;
    return state.s;
  }
  state.s.omega = state.alpha * x.omega + (1.0 - state.alpha) * state.s.omega;
  state.s.theta = state.alpha * x.theta + (1.0 - state.alpha) * state.s.theta;
  return state.s;
}

std::vector<geom::HorizonParams> exp_smooth(
    const std::vector<geom::HorizonParams>& series, double alpha) {
  if (series.empty()) throw EmptyInput("exp_smooth: empty series");
  if (!(alpha > 0.0) || alpha > 1.0) throw BadAlpha("alpha must be in (0, 1]");
  SmoothingState state;
  state.alpha = alpha;
  std::vector<geom::HorizonParams> out;
  out.reserve(series.size());
  for (const auto& x : series) out.push_back(smooth_step(state, x));
  return out;
}

geom::HorizonParams mean_baseline(
    const std::vector<std::vector<geom::HorizonParams>>& train_sequences) {
  double sum_omega = 0.0;
  double sum_theta = 0.0;
  std::size_t n = 0;
  for (const auto& seq : train_sequences)
    for (const auto& p : seq) {
      sum_omega += p.omega;
      sum_theta += p.theta;
      ++n;
    }
  if (n == 0) throw EmptyInput("mean_baseline: no frames");
  return {sum_omega / static_cast<double>(n),
          sum_theta / static_cast<double>(n)};
}

}  // namespace horizon::filters
