// Independent reference implementations used only by the tests. These stay
// deliberately naive and share no code with the library paths they check.
#ifndef HORIZON_TESTS_ORACLES_HPP
#define HORIZON_TESTS_ORACLES_HPP

#include <cmath>
#include <vector>

#include "horizon/geometry.hpp"
#include "horizon/tensor.hpp"

namespace oracles {

// ---- conv2d: direct quadruple loop, zero padding, cross-correlation ----
inline horizon::nn::Tensor conv2d_naive(const horizon::nn::Tensor& x,
                                        const horizon::nn::Tensor& w,
                                        const std::vector<double>& bias,
                                        int stride) {
  int c_in = x.dim(0), h = x.dim(1), wd = x.dim(2);
  int c_out = w.dim(0), kh = w.dim(2), kw = w.dim(3);
  int ph = (kh - 1) / 2, pw = (kw - 1) / 2;
  int ho = (h - 1) / stride + 1, wo = (wd - 1) / stride + 1;
  horizon::nn::Tensor y({c_out, ho, wo});
  for (int o = 0; o < c_out; ++o)
    for (int oy = 0; oy < ho; ++oy)
      for (int ox = 0; ox < wo; ++ox) {
        double acc = bias.empty() ? 0.0 : bias[static_cast<std::size_t>(o)];
        for (int c = 0; c < c_in; ++c)
          for (int a = 0; a < kh; ++a)
            for (int b = 0; b < kw; ++b) {
              int iy = oy * stride + a - ph;
              int ix = ox * stride + b - pw;
              if (iy < 0 || iy >= h || ix < 0 || ix >= wd) continue;
              acc += w.at(o, c, a, b) * x.at(c, iy, ix);
            }
        y.at(o, oy, ox) = acc;
      }
  return y;
}

// ---- scalar LSTM recurrences (1x1 spatial, 1 channel) ----
struct ScalarLstmWeights {
  double wxi, whi, bi;
  double wxf, whf, bf;
  double wxo, who, bo;
  double wxc, whc, bc;
  double wxy = 0, why = 0, whhy = 0;
};

struct ScalarState {
  double h = 0, c = 0;
};

inline double sig(double v) { return 1.0 / (1.0 + std::exp(-v)); }

struct ScalarStep {
  double y;
  ScalarState state;
};

inline ScalarStep scalar_standard(const ScalarLstmWeights& w, double x,
                                  ScalarState s) {
  double i = sig(w.wxi * x + w.whi * s.h + w.bi);
  double f = sig(w.wxf * x + w.whf * s.h + w.bf);
  double o = sig(w.wxo * x + w.who * s.h + w.bo);
  double c = f * s.c + i * std::tanh(w.wxc * x + w.whc * s.h + w.bc);
  double h = o * std::tanh(c);
  return {h, {h, c}};
}

inline ScalarStep scalar_naive_residual(const ScalarLstmWeights& w, double x,
                                        ScalarState s) {
  ScalarStep step = scalar_standard(w, x, s);
  return {step.y + x, step.state};
}

inline ScalarStep scalar_residual_dense(const ScalarLstmWeights& w, double x,
                                        ScalarState s) {
  double i = sig(w.wxi * x + w.whi * s.h + w.bi);
  double f = sig(w.wxf * x + w.whf * s.h + w.bf);
  double o = sig(w.wxo * x + w.who * s.h + w.bo);
  double c = f * s.c + i * std::tanh(w.wxc * x + w.whc * s.h + w.bc);
  double h_hat = o * c;
  double h = std::tanh(h_hat);
  double y_hat = w.wxy * x + w.why * s.h + w.whhy * h_hat;
  double y = std::tanh(y_hat + x);
  return {y, {h, c}};
}

// ---- line transform: map two points, refit ----
inline horizon::geom::HorizonParams transform_two_point(
    const horizon::geom::HorizonParams& p, const horizon::geom::ImageDims& dims,
    double beta, double sx, double sy) {
  using namespace horizon;
  double cx = dims.width / 2.0, cy = 0.0;
  auto map = [&](double x, double y) {
    double dx = x - cx, dy = y - cy;
    return std::pair<double, double>{
        std::cos(beta) * dx - std::sin(beta) * dy + cx + sx,
        std::sin(beta) * dx + std::cos(beta) * dy + cy + sy};
  };
  auto [x1, y1] = map(0.0, geom::y_at_x(p, 0.0, dims));
  auto [x2, y2] = map(dims.width, geom::y_at_x(p, dims.width, dims));
  Vec3 l = cross(Vec3{x1, y1, 1.0}, Vec3{x2, y2, 1.0});
  return geom::params_from_line(geom::HomLine{l}, dims);
}

// ---- AUC: numeric integration of the step CDF ----
inline double auc_riemann(const std::vector<double>& errors, double tau,
                          int cells = 100000) {
  double n = static_cast<double>(errors.size());
  double area = 0.0;
  double dx = tau / cells;
  for (int i = 0; i < cells; ++i) {
    double x = (i + 0.5) * dx;
    double count = 0.0;
    for (double e : errors)
      if (e <= x) count += 1.0;
    area += (count / n) * dx;
  }
  return area / tau;
}

// ---- A_TV stencils, direct textbook form ----
inline std::vector<double> stencil_derivatives(const std::vector<double>& f) {
  std::size_t n = f.size();
  std::vector<double> d(n);
  d[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / 2.0;
  for (std::size_t t = 1; t + 1 < n; ++t) d[t] = (f[t + 1] - f[t - 1]) / 2.0;
  d[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / 2.0;
  return d;
}

inline double a_tv_direct(const std::vector<std::vector<double>>& trajs) {
  double sum = 0.0;
  std::size_t m = 0;
  for (const auto& f : trajs) {
    for (double d : stencil_derivatives(f)) sum += std::fabs(d);
    m += f.size();
  }
  return sum / static_cast<double>(m);
}

// ---- elementary rotations for the rpy oracle ----
inline horizon::Mat3 rx(double a) {
  horizon::Mat3 m = horizon::Mat3::identity();
  m(1, 1) = std::cos(a); m(1, 2) = -std::sin(a);
  m(2, 1) = std::sin(a); m(2, 2) = std::cos(a);
  return m;
}
inline horizon::Mat3 ry(double a) {
  horizon::Mat3 m = horizon::Mat3::identity();
  m(0, 0) = std::cos(a); m(0, 2) = std::sin(a);
  m(2, 0) = -std::sin(a); m(2, 2) = std::cos(a);
  return m;
}
inline horizon::Mat3 rz(double a) {
  horizon::Mat3 m = horizon::Mat3::identity();
  m(0, 0) = std::cos(a); m(0, 1) = -std::sin(a);
  m(1, 0) = std::sin(a); m(1, 1) = std::cos(a);
  return m;
}

}  // namespace oracles

#endif
