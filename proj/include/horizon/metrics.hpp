#ifndef HORIZON_METRICS_HPP
#define HORIZON_METRICS_HPP

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "horizon/geometry.hpp"

namespace horizon::metrics {

// Per-frame horizon estimates for one video, aligned with ground truth by
// frame index when evaluated.
struct PredictionTrajectory {
  std::string sequence_id;
  std::vector<std::pair<int, geom::HorizonParams>> frames;
};

// Per-frame max-horizon-error values (height-normalized, >= 0).
struct ErrorTrajectory {
  std::string sequence_id;
  std::vector<double> errors;
};

struct SequenceMetrics {
  double horizon_auc = 0.0;
  double mse = 0.0;
  double a_tv = 0.0;
  double pose_auc = 0.0;
  std::size_t frames = 0;
};

struct MetricsReport {
  double horizon_auc = 0.0;
  double mse = 0.0;
  double a_tv = 0.0;
  double pose_auc = 0.0;
  std::map<std::string, SequenceMetrics> per_sequence;
};

inline constexpr double kHorizonAucThreshold = 0.25;
// 5 degrees in radians
inline constexpr double kPoseAucThreshold = 5.0 * 3.14159265358979323846 / 180.0;

// max(d_{y,0}, d_{y,W}) / H with d_{y,x} = |y_pred(x) - y_gt(x)|. The
// difference is affine in x, so the maximum over [0, W] sits at an endpoint.
double max_horizon_error(const geom::HorizonParams& pred,
                         const geom::HorizonParams& gt,
                         const geom::ImageDims& dims);

// Exact area under the empirical CDF of the errors on [0, tau], normalized:
//   AUC = (1 / (N tau)) * sum_i max(tau - e_i, 0)
double auc_cumulative(const std::vector<double>& errors, double tau);

// Mean of squared per-frame errors over all frames of all trajectories.
double mse(const std::vector<ErrorTrajectory>& trajectories);

// Angular error with sign folding: xi = arccos(|p.p_hat| / (|p||p_hat|)).
double pose_angular_error(const geom::PoseVector& p,
                          const geom::PoseVector& p_hat);

double pose_auc(const std::vector<double>& xi_errors,
                double tau = kPoseAucThreshold);

// Mean absolute temporal derivative of the error trajectories, second-order
// stencils (central inside, one-sided at the ends), 1/M weighting with M the
// total frame count. Trajectories shorter than 3 frames throw TooShort.
double average_total_variation(const std::vector<ErrorTrajectory>& trajectories);

// Stencil derivatives for one trajectory; exposed for plot exports.
std::vector<double> temporal_derivative(const std::vector<double>& values);

// Full report for aligned prediction/ground-truth trajectories. The camera
// model is used for the pose metrics only.
MetricsReport evaluate(const std::vector<PredictionTrajectory>& predictions,
                       const std::vector<PredictionTrajectory>& ground_truth,
                       const geom::ImageDims& dims,
                       const geom::CameraModel& cam);

// (error, cdf) pairs of the cumulative error histogram, for CSV export.
std::vector<std::pair<double, double>> cumulative_histogram(
    std::vector<double> errors, double tau = kHorizonAucThreshold);

// All per-frame max horizon errors, pooled over sequences in id order; the
// same pairing rules as evaluate().
std::vector<double> pooled_horizon_errors(
    const std::vector<PredictionTrajectory>& predictions,
    const std::vector<PredictionTrajectory>& ground_truth,
    const geom::ImageDims& dims);

}  // namespace horizon::metrics

#endif
