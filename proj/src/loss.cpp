#include "horizon/loss.hpp"

#include <cmath>

#include "horizon/metrics.hpp"

namespace horizon::loss {

namespace {
constexpr double kPi = 3.14159265358979323846;

void validate(const ScheduleState& s) {
  if (s.max_epochs <= 0) throw BadConfig("schedule needs max_epochs > 0");
  if (s.t < 0 || s.t > s.max_epochs)
    throw BadConfig("schedule epoch outside [0, T]");
}
}  // namespace

double huber(double x, double x_hat) {
  double d = x - x_hat;
  return std::fabs(d) <= 1.0 ? 0.5 * d * d : std::fabs(d) - 0.5;
}

double loss_omega_theta(const geom::HorizonParams& pred,
                        const geom::HorizonParams& gt) {
  return huber(pred.omega, gt.omega) + huber(pred.theta, gt.theta);
}

double loss_horizon(const geom::HorizonParams& pred,
                    const geom::HorizonParams& gt,
                    const geom::ImageDims& dims) {
  return metrics::max_horizon_error(pred, gt, dims);
}

double lambda_schedule(const ScheduleState& s) {
  validate(s);
  return 0.5 + 0.5 * std::cos(kPi * static_cast<double>(s.t) /
                              static_cast<double>(s.max_epochs));
}

double combined_loss(const ScheduleState& s, const geom::HorizonParams& pred,
                     const geom::HorizonParams& gt,
                     const geom::ImageDims& dims) {
  double lambda = lambda_schedule(s);
  return lambda * loss_omega_theta(pred, gt) +
         (1.0 - lambda) * loss_horizon(pred, gt, dims);
}

NodeId loss_omega_theta_node(Tape& tape, NodeId omega, NodeId theta,
                             const geom::HorizonParams& gt) {
  return nn::add(tape, nn::huber_op(tape, omega, gt.omega),
                 nn::huber_op(tape, theta, gt.theta));
}

NodeId loss_horizon_node(Tape& tape, NodeId omega, NodeId theta,
                         const geom::HorizonParams& gt,
                         const geom::ImageDims& dims) {
  if (tape.value(omega).size() != 1 || tape.value(theta).size() != 1)
    throw NotScalar("loss_horizon_node expects scalar omega/theta");
  geom::HorizonParams pred{tape.value(omega)[0], tape.value(theta)[0]};
  double value = metrics::max_horizon_error(pred, gt, dims);
  NodeId out = tape.push(nn::Tensor::scalar(value), nullptr);
  auto back = [omega, theta, gt, dims, out](Tape& t) {
    double g = t.grad_buffer(out)[0];
    geom::HorizonParams p{t.value(omega)[0], t.value(theta)[0]};
    double d0 = geom::y_at_x(p, 0.0, dims) - geom::y_at_x(gt, 0.0, dims);
    double dw = geom::y_at_x(p, dims.width, dims) -
                geom::y_at_x(gt, dims.width, dims);
    // The branch choice mirrors the forward max; ties take x = 0.
    double delta, x_star;
    if (std::fabs(d0) >= std::fabs(dw)) {
      delta = d0;
      x_star = 0.0;
    } else {
      delta = dw;
      x_star = dims.width;
    }
    double sign = delta > 0.0 ? 1.0 : (delta < 0.0 ? -1.0 : 0.0);
    double cos_t = std::cos(p.theta);
    t.grad_buffer(omega)[0] += g * (-sign / dims.height);
    t.grad_buffer(theta)[0] +=
        g * sign * (x_star - dims.width / 2.0) / (cos_t * cos_t) / dims.height;
  };
  return tape.rebind(out, back);
}

NodeId combined_loss_node(Tape& tape, const ScheduleState& s, NodeId omega,
                          NodeId theta, const geom::HorizonParams& gt,
                          const geom::ImageDims& dims) {
  double lambda = lambda_schedule(s);
  NodeId huber_term = loss_omega_theta_node(tape, omega, theta, gt);
  NodeId horizon_term = loss_horizon_node(tape, omega, theta, gt, dims);
  return nn::add(tape, nn::scale(tape, huber_term, lambda),
                 nn::scale(tape, horizon_term, 1.0 - lambda));
}

}  // namespace horizon::loss
