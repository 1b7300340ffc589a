#ifndef HORIZON_LOSS_HPP
#define HORIZON_LOSS_HPP

#include "horizon/geometry.hpp"
#include "horizon/tape.hpp"

namespace horizon::loss {

using nn::NodeId;
using nn::Tape;

// Cosine blending schedule over epochs: lambda(t) = 1/2 + 1/2 cos(pi t / T).
struct ScheduleState {
  int t = 0;
  int max_epochs = 1;
};

// Unit-transition Huber: (x - x_hat)^2 / 2 for |x - x_hat| <= 1,
// |x - x_hat| - 1/2 otherwise.
double huber(double x, double x_hat);

double loss_omega_theta(const geom::HorizonParams& pred,
                        const geom::HorizonParams& gt);

// Forward value identical to metrics::max_horizon_error (same code path).
double loss_horizon(const geom::HorizonParams& pred,
                    const geom::HorizonParams& gt,
                    const geom::ImageDims& dims);

double lambda_schedule(const ScheduleState& s);

// lambda * L_{omega,theta} + (1 - lambda) * L_e
double combined_loss(const ScheduleState& s, const geom::HorizonParams& pred,
                     const geom::HorizonParams& gt,
                     const geom::ImageDims& dims);

// ---- tape-registered versions, differentiable in (omega, theta) ----

NodeId loss_omega_theta_node(Tape& tape, NodeId omega, NodeId theta,
                             const geom::HorizonParams& gt);

// Subgradient rules: when d_{y,0} = d_{y,W} the gradient flows through the
// x = 0 branch; |.| at zero returns gradient 0.
NodeId loss_horizon_node(Tape& tape, NodeId omega, NodeId theta,
                         const geom::HorizonParams& gt,
                         const geom::ImageDims& dims);

NodeId combined_loss_node(Tape& tape, const ScheduleState& s, NodeId omega,
                          NodeId theta, const geom::HorizonParams& gt,
                          const geom::ImageDims& dims);

}  // namespace horizon::loss

#endif
