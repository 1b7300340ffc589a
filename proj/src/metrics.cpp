#include "horizon/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "horizon/errors.hpp"

namespace horizon::metrics {

double max_horizon_error(const geom::HorizonParams& pred,
                         const geom::HorizonParams& gt,
                         const geom::ImageDims& dims) {
  double d0 = std::fabs(geom::y_at_x(pred, 0.0, dims) -
                        geom::y_at_x(gt, 0.0, dims));
  double dw = std::fabs(geom::y_at_x(pred, dims.width, dims) -
                        geom::y_at_x(gt, dims.width, dims));
  return std::max(d0, dw) / dims.height;
}

double auc_cumulative(const std::vector<double>& errors, double tau) {
  if (errors.empty()) throw EmptyInput("auc_cumulative: no errors");
  if (!(tau > 0.0)) throw Error("auc_cumulative: tau must be positive");
  double area = 0.0;
  for (double e : errors) area += std::max(tau - e, 0.0);
  return area / (static_cast<double>(errors.size()) * tau);
}

double mse(const std::vector<ErrorTrajectory>& trajectories) {
  std::size_t n = 0;
  double sum = 0.0;
  for (const auto& traj : trajectories) {
    for (double e : traj.errors) {
      sum += e * e;
      ++n;
    }
  }
  if (n == 0) throw EmptyInput("mse: no frames");
  return sum / static_cast<double>(n);
}

double pose_angular_error(const geom::PoseVector& p,
                          const geom::PoseVector& p_hat) {
  double np = p.p.norm();
  double nh = p_hat.p.norm();
  if (np < 1e-12 || nh < 1e-12)
    throw ZeroVector("pose_angular_error: zero vector");
  double c = std::fabs(p.p.dot(p_hat.p)) / (np * nh);
  return std::acos(std::min(c, 1.0));
}

double pose_auc(const std::vector<double>& xi_errors, double tau) {
  return auc_cumulative(xi_errors, tau);
}

std::vector<double> temporal_derivative(const std::vector<double>& values) {
  std::size_t n = values.size();
  if (n < 3) throw TooShort("temporal_derivative: need at least 3 frames");
  std::vector<double> out(n);
  // The one-sided stencils (-3f0 + 4f1 - f2)/2 are evaluated in adjacent-
  // difference form (3 d1 - d2)/2 so that constants annihilate exactly.
  out[0] = (3.0 * (values[1] - values[0]) - (values[2] - values[1])) / 2.0;
  for (std::size_t t = 1; t + 1 < n; ++t)
    out[t] = (values[t + 1] - values[t - 1]) / 2.0;
  out[n - 1] =
      (3.0 * (values[n - 1] - values[n - 2]) - (values[n - 2] - values[n - 3])) /
      2.0;
  return out;
}

double average_total_variation(
    const std::vector<ErrorTrajectory>& trajectories) {
  if (trajectories.empty()) throw EmptyInput("average_total_variation");
  double sum = 0.0;
  std::size_t total = 0;
  for (const auto& traj : trajectories) {
    auto deriv = temporal_derivative(traj.errors);
    for (double d : deriv) sum += std::fabs(d);
    total += deriv.size();
  }
  return sum / static_cast<double>(total);
}

namespace {

SequenceMetrics sequence_metrics(const ErrorTrajectory& errs,
                                 const std::vector<double>& xi) {
  SequenceMetrics m;
  m.horizon_auc = auc_cumulative(errs.errors, kHorizonAucThreshold);
  m.mse = mse({errs});
  m.a_tv = average_total_variation({errs});
  m.pose_auc = pose_auc(xi);
  m.frames = errs.errors.size();
  return m;
}

}  // namespace

MetricsReport evaluate(const std::vector<PredictionTrajectory>& predictions,
                       const std::vector<PredictionTrajectory>& ground_truth,
                       const geom::ImageDims& dims,
                       const geom::CameraModel& cam) {
  std::map<std::string, const PredictionTrajectory*> gt_by_id;
  for (const auto& gt : ground_truth)
    if (!gt_by_id.emplace(gt.sequence_id, &gt).second)
      throw FrameMismatch("evaluate: duplicate ground-truth sequence " +
                          gt.sequence_id);

  // Keyed by sequence id so the final reduction order does not depend on the
  // order the trajectories arrive in.
  std::map<std::string, std::pair<ErrorTrajectory, std::vector<double>>>
      per_seq;

  for (const auto& pred : predictions) {
    auto gt_it = gt_by_id.find(pred.sequence_id);
    if (gt_it == gt_by_id.end())
      throw FrameMismatch("evaluate: no ground truth for sequence " +
                          pred.sequence_id);
    const auto& gt = *gt_it->second;
    if (pred.frames.size() != gt.frames.size())
      throw FrameMismatch("evaluate: frame count differs in " +
                          pred.sequence_id);
    ErrorTrajectory errs;
    errs.sequence_id = pred.sequence_id;
    std::vector<double> xi;
    for (std::size_t t = 0; t < pred.frames.size(); ++t) {
      if (pred.frames[t].first != gt.frames[t].first)
        throw FrameMismatch("evaluate: frame indices differ in " +
                            pred.sequence_id);
      double e = max_horizon_error(pred.frames[t].second, gt.frames[t].second,
                                   dims);
      errs.errors.push_back(e);
      auto p = geom::pose_from_horizon(
          cam, geom::horizon_from_params(geom::normalized(pred.frames[t].second),
                                         dims));
      auto p_hat = geom::pose_from_horizon(
          cam, geom::horizon_from_params(geom::normalized(gt.frames[t].second),
                                         dims));
      xi.push_back(pose_angular_error(p, p_hat));
    }
    if (!per_seq.emplace(pred.sequence_id,
                         std::make_pair(std::move(errs), std::move(xi)))
             .second)
      throw FrameMismatch("evaluate: duplicate prediction sequence " +
                          pred.sequence_id);
  }
  if (per_seq.size() != gt_by_id.size())
    throw FrameMismatch("evaluate: prediction/ground-truth sequence sets differ");
  if (per_seq.empty()) throw EmptyInput("evaluate: no sequences");

  MetricsReport report;
  std::vector<ErrorTrajectory> error_trajectories;
  std::vector<double> all_errors;
  std::vector<double> all_xi;
  for (auto& [id, data] : per_seq) {
    report.per_sequence[id] = sequence_metrics(data.first, data.second);
    all_errors.insert(all_errors.end(), data.first.errors.begin(),
                      data.first.errors.end());
    all_xi.insert(all_xi.end(), data.second.begin(), data.second.end());
    error_trajectories.push_back(std::move(data.first));
  }

  report.horizon_auc = auc_cumulative(all_errors, kHorizonAucThreshold);
  report.mse = mse(error_trajectories);
  report.a_tv = average_total_variation(error_trajectories);
  report.pose_auc = pose_auc(all_xi);
  return report;
}

std::vector<double> pooled_horizon_errors(
    const std::vector<PredictionTrajectory>& predictions,
    const std::vector<PredictionTrajectory>& ground_truth,
    const geom::ImageDims& dims) {
  std::map<std::string, const PredictionTrajectory*> gt_by_id;
  for (const auto& gt : ground_truth) gt_by_id[gt.sequence_id] = &gt;
  std::map<std::string, std::vector<double>> per_seq;
  for (const auto& pred : predictions) {
    auto it = gt_by_id.find(pred.sequence_id);
    if (it == gt_by_id.end() || it->second->frames.size() != pred.frames.size())
      throw FrameMismatch("pooled_horizon_errors: misaligned sequence " +
                          pred.sequence_id);
    auto& errs = per_seq[pred.sequence_id];
    for (std::size_t t = 0; t < pred.frames.size(); ++t)
      errs.push_back(max_horizon_error(pred.frames[t].second,
                                       it->second->frames[t].second, dims));
  }
  std::vector<double> out;
  for (const auto& [id, errs] : per_seq)
    out.insert(out.end(), errs.begin(), errs.end());
  return out;
}

std::vector<std::pair<double, double>> cumulative_histogram(
    std::vector<double> errors, double tau) {
  if (errors.empty()) throw EmptyInput("cumulative_histogram");
  std::sort(errors.begin(), errors.end());
  std::vector<std::pair<double, double>> out;
  double n = static_cast<double>(errors.size());
  out.emplace_back(0.0, 0.0);
  std::size_t i = 0;
  while (i < errors.size() && errors[i] <= tau) {
    std::size_t j = i;
    while (j < errors.size() && errors[j] == errors[i]) ++j;
    out.emplace_back(errors[i], static_cast<double>(j) / n);
    i = j;
  }
  out.emplace_back(tau, static_cast<double>(i) / n);
  return out;
}

}  // namespace horizon::metrics
