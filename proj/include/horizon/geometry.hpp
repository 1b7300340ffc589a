#ifndef HORIZON_GEOMETRY_HPP
#define HORIZON_GEOMETRY_HPP

#include "horizon/errors.hpp"
#include "horizon/mat3.hpp"

namespace horizon::geom {

// Horizon line as offset/slope. omega is the signed offset in pixels at the
// centre column, theta the slope in radians, normalized to (-pi/2, pi/2].
// The line passes through y(omega, theta, x) = (x - W/2) * tan(theta) - omega,
// with y growing downward.
struct HorizonParams {
  double omega = 0.0;
  double theta = 0.0;
};

struct ImageDims {
  double width = 0.0;
  double height = 0.0;
};

// Homogeneous line coefficients; l and s*l (s != 0) denote the same line.
struct HomLine {
  Vec3 l{0.0, 0.0, 0.0};
};

// Intrinsic matrix K, upper triangular with K(2,2) = 1.
struct CameraModel {
  Mat3 K = Mat3::identity();
};

struct Rotation {
  Mat3 R = Mat3::identity();
};

// Unit gravity direction.
struct GravityVector {
  Vec3 g{0.0, 1.0, 0.0};
};

// Camera pose direction, defined up to scale and sign.
struct PoseVector {
  Vec3 p{0.0, 0.0, 0.0};
};

void validate(const HorizonParams& params);
void validate(const ImageDims& dims);
void validate(const HomLine& line);
void validate(const CameraModel& cam);
void validate(const Rotation& rot);
void validate(const GravityVector& g);
void validate(const PoseVector& p);

// Canonical homogeneous form of the offset/slope parametrisation:
//   l = [sin(theta), -cos(theta), -(W/2) sin(theta) - omega cos(theta)]
// so that l . (x, y(omega,theta,x), 1) = 0 for all x.
HomLine horizon_from_params(const HorizonParams& params, const ImageDims& dims);

// Inverse of horizon_from_params. Throws VerticalLine when the line has no
// finite slope in the image frame.
HorizonParams params_from_line(const HomLine& line, const ImageDims& dims);

// y(omega, theta, x) = (x - W/2) tan(theta) - omega.
// Throws SlopeSingularity when |cos(theta)| < 1e-12.
double y_at_x(const HorizonParams& params, double x, const ImageDims& dims);

// Folds theta into (-pi/2, pi/2]; theta and theta +- pi denote the same line,
// so raw estimates can be brought into canonical form without changing it.
HorizonParams normalized(const HorizonParams& params);

// h proportional to K^{-T} R g. Throws DegenerateProjection when the product
// has norm below 1e-12.
HomLine horizon_from_gravity(const CameraModel& cam, const Rotation& rot,
                             const GravityVector& g);

// p proportional to K^T l, defined up to scale and sign.
PoseVector pose_from_horizon(const CameraModel& cam, const HomLine& line);

// Image of the horizon under rotation by beta about the centre-column point
// where the offset is measured (x = W/2, y = 0 in the incidence frame; the
// synthetic renderer places the image centre there), followed by a shift of
// (shift_x, shift_y) pixels. Throws SlopeSingularity if the transformed line
// is vertical.
HorizonParams transform_horizon(const HorizonParams& params,
                                const ImageDims& dims, double beta,
                                double shift_x, double shift_y);

}  // namespace horizon::geom

#endif
