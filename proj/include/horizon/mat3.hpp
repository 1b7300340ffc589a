#ifndef HORIZON_MAT3_HPP
#define HORIZON_MAT3_HPP

#include <array>
#include <cmath>

namespace horizon {

struct Vec3 {
  double x = 0.0, y = 0.0, z = 0.0;

  double& operator[](int i) { return i == 0 ? x : (i == 1 ? y : z); }
  double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }

  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }

  double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
  double norm() const { return std::sqrt(dot(*this)); }
};

// Row-major 3x3 matrix.
struct Mat3 {
  std::array<double, 9> m{};

  double& operator()(int r, int c) { return m[r * 3 + c]; }
  double operator()(int r, int c) const { return m[r * 3 + c]; }

  static Mat3 identity() {
    Mat3 out;
    out.m = {1, 0, 0, 0, 1, 0, 0, 0, 1};
    return out;
  }

  Mat3 operator*(const Mat3& o) const {
    Mat3 out;
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c)
        out(r, c) = (*this)(r, 0) * o(0, c) + (*this)(r, 1) * o(1, c) +
                    (*this)(r, 2) * o(2, c);
    return out;
  }

  Vec3 operator*(const Vec3& v) const {
    return {m[0] * v.x + m[1] * v.y + m[2] * v.z,
            m[3] * v.x + m[4] * v.y + m[5] * v.z,
            m[6] * v.x + m[7] * v.y + m[8] * v.z};
  }

  Mat3 transposed() const {
    Mat3 out;
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) out(r, c) = (*this)(c, r);
    return out;
  }

  double det() const {
    return m[0] * (m[4] * m[8] - m[5] * m[7]) -
           m[1] * (m[3] * m[8] - m[5] * m[6]) +
           m[2] * (m[3] * m[7] - m[4] * m[6]);
  }

  // Inverse via adjugate; caller checks det() against its own tolerance.
  Mat3 inverse() const {
    Mat3 adj;
    adj(0, 0) = m[4] * m[8] - m[5] * m[7];
    adj(0, 1) = m[2] * m[7] - m[1] * m[8];
    adj(0, 2) = m[1] * m[5] - m[2] * m[4];
    adj(1, 0) = m[5] * m[6] - m[3] * m[8];
    adj(1, 1) = m[0] * m[8] - m[2] * m[6];
    adj(1, 2) = m[2] * m[3] - m[0] * m[5];
    adj(2, 0) = m[3] * m[7] - m[4] * m[6];
    adj(2, 1) = m[1] * m[6] - m[0] * m[7];
    adj(2, 2) = m[0] * m[4] - m[1] * m[3];
    double d = det();
    Mat3 out;
    for (int i = 0; i < 9; ++i) out.m[i] = adj.m[i] / d;
    return out;
  }

  // max |A^T A - I| entry, used for orthonormality checks
  double orthonormality_error() const {
    Mat3 g = transposed() * (*this);
    double err = 0.0;
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) {
        double target = (r == c) ? 1.0 : 0.0;
        err = std::max(err, std::fabs(g(r, c) - target));
      }
    return err;
  }
};

inline Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

}  // namespace horizon

#endif
