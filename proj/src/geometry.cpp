#include "horizon/geometry.hpp"

#include <cmath>

namespace horizon::geom {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kDegenerateEps = 1e-12;
}  // namespace

void validate(const HorizonParams& params) {
  if (!std::isfinite(params.omega) || !std::isfinite(params.theta))
    throw Error("HorizonParams must be finite");
  if (params.theta <= -kPi / 2 || params.theta > kPi / 2)
    throw Error("theta outside (-pi/2, pi/2]");
}

void validate(const ImageDims& dims) {
  if (!(dims.width > 0.0) || !(dims.height > 0.0))
    throw Error("image dims must be positive");
}

void validate(const HomLine& line) {
  if (line.l.norm() < kDegenerateEps)
    throw ZeroVector("homogeneous line is the zero vector");
}

void validate(const CameraModel& cam) {
  const Mat3& K = cam.K;
  if (std::fabs(K(1, 0)) > 0.0 || std::fabs(K(2, 0)) > 0.0 ||
      std::fabs(K(2, 1)) > 0.0)
    throw Error("K must be upper triangular");
  if (std::fabs(K(2, 2) - 1.0) > kDegenerateEps) throw Error("K(2,2) must be 1");
  if (std::fabs(K.det()) < kDegenerateEps) throw Error("K must be invertible");
}

void validate(const Rotation& rot) {
  if (rot.R.orthonormality_error() > 1e-9)
    throw Error("rotation is not orthonormal");
  if (std::fabs(rot.R.det() - 1.0) > 1e-9)
    throw Error("rotation must have det +1");
}

void validate(const GravityVector& g) {
  if (std::fabs(g.g.norm() - 1.0) > 1e-12)
    throw Error("gravity vector must be unit length");
}

void validate(const PoseVector& p) {
  if (p.p.norm() < kDegenerateEps) throw ZeroVector("pose vector is zero");
}

HomLine horizon_from_params(const HorizonParams& params,
                            const ImageDims& dims) {
  validate(params);
  validate(dims);
  double s = std::sin(params.theta);
  double c = std::cos(params.theta);
  return HomLine{
      Vec3{s, -c, -(dims.width / 2.0) * s - params.omega * c}};
}

HorizonParams params_from_line(const HomLine& line, const ImageDims& dims) {
  validate(line);
  validate(dims);
  Vec3 l = line.l;
  double n = std::hypot(l.x, l.y);
  if (n < kDegenerateEps || std::fabs(l.y) / line.l.norm() < kDegenerateEps)
    throw VerticalLine("line has no finite slope in the image frame");
  // Fold the homogeneous sign so the y-coefficient matches -cos(theta) < 0.
  double sign = l.y > 0.0 ? -1.0 : 1.0;
  double sin_t = sign * l.x / n;
  double cos_t = -sign * l.y / n;
  double theta = std::atan2(sin_t, cos_t);
  double c2 = sign * l.z / n;  // equals -(W/2) sin(theta) - omega cos(theta)
  double omega = (-(dims.width / 2.0) * sin_t - c2) / cos_t;
  return HorizonParams{omega, theta};
}

double y_at_x(const HorizonParams& params, double x, const ImageDims& dims) {
  // Raw estimates may carry any finite theta; tan is pi-periodic so only the
  // singularity itself is rejected, not the canonical range.
  if (!std::isfinite(params.omega) || !std::isfinite(params.theta))
    throw Error("HorizonParams must be finite");
  validate(dims);
  if (std::fabs(std::cos(params.theta)) < kDegenerateEps)
    throw SlopeSingularity("tan(theta) undefined at theta = +-pi/2");
  return (x - dims.width / 2.0) * std::tan(params.theta) - params.omega;
}

HorizonParams normalized(const HorizonParams& params) {
  if (!std::isfinite(params.omega) || !std::isfinite(params.theta))
    throw Error("HorizonParams must be finite");
  // theta and theta +- pi describe the same line; fold into (-pi/2, pi/2].
  double theta = std::remainder(params.theta, kPi);
  if (theta <= -kPi / 2) theta += kPi;
  return HorizonParams{params.omega, theta};
}

HomLine horizon_from_gravity(const CameraModel& cam, const Rotation& rot,
                             const GravityVector& g) {
  validate(cam);
  validate(rot);
  validate(g);
  Vec3 l = cam.K.inverse().transposed() * (rot.R * g.g);
  if (l.norm() < kDegenerateEps)
    throw DegenerateProjection("K^{-T} R g vanishes");
  return HomLine{l};
}

PoseVector pose_from_horizon(const CameraModel& cam, const HomLine& line) {
  validate(cam);
  validate(line);
  return PoseVector{cam.K.transposed() * line.l};
}

HorizonParams transform_horizon(const HorizonParams& params,
                                const ImageDims& dims, double beta,
                                double shift_x, double shift_y) {
  validate(params);
  validate(dims);
  // Point map p -> R (p - c) + c + s with pivot c = (W/2, 0); lines map by the
  // inverse transpose.
  double cb = std::cos(beta);
  double sb = std::sin(beta);
  double cx = dims.width / 2.0;
  Mat3 M;
  M.m = {cb, -sb, cx - cb * cx + shift_x,
         sb, cb,  -sb * cx + shift_y,
         0.0, 0.0, 1.0};
  Vec3 l = M.inverse().transposed() * horizon_from_params(params, dims).l;
  try {
    return params_from_line(HomLine{l}, dims);
  } catch (const VerticalLine&) {
    throw SlopeSingularity("transformed horizon is vertical");
  }
}

}  // namespace horizon::geom
