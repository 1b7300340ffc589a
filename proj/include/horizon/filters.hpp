#ifndef HORIZON_FILTERS_HPP
#define HORIZON_FILTERS_HPP

#include <vector>

#include "horizon/geometry.hpp"

namespace horizon::filters {

// Exponential smoothing state: s_t = alpha * x_t + (1 - alpha) * s_{t-1},
// initialized with s_0 = x_0. Offset and slope are smoothed independently.
struct SmoothingState {
  double alpha = 0.5;
  geom::HorizonParams s;
  bool primed = false;
};

geom::HorizonParams smooth_step(SmoothingState& state,
                                const geom::HorizonParams& x);

std::vector<geom::HorizonParams> exp_smooth(
    const std::vector<geom::HorizonParams>& series, double alpha);

// Constant predictor: arithmetic mean of omega and theta over all frames.
geom::HorizonParams mean_baseline(
    const std::vector<std::vector<geom::HorizonParams>>& train_sequences);

}  // namespace horizon::filters

#endif
