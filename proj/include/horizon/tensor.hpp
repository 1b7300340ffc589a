#ifndef HORIZON_TENSOR_HPP
#define HORIZON_TENSOR_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "horizon/errors.hpp"

namespace horizon::nn {

// Dense row-major double tensor. Canonical axis orders are [C,H,W] for one
// frame and [D] for pooled features; scalars use shape {1}.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(std::vector<int> shape);
  static Tensor full(std::vector<int> shape, double value);
  static Tensor scalar(double value);

  const std::vector<int>& shape() const { return shape_; }
  int rank() const { return static_cast<int>(shape_.size()); }
  int dim(int i) const { return shape_[static_cast<std::size_t>(i)]; }
  std::int64_t size() const { return static_cast<std::int64_t>(data_.size()); }
  bool empty() const { return data_.empty(); }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }

  double& operator[](std::int64_t i) { return data_[static_cast<std::size_t>(i)]; }
  double operator[](std::int64_t i) const { return data_[static_cast<std::size_t>(i)]; }

  // [C,H,W] indexing
  double& at(int c, int y, int x) {
    return data_[static_cast<std::size_t>((c * shape_[1] + y) * shape_[2] + x)];
  }
  double at(int c, int y, int x) const {
    return data_[static_cast<std::size_t>((c * shape_[1] + y) * shape_[2] + x)];
  }
  // [O,C,A,B] indexing
  double& at(int o, int c, int a, int b) {
    return data_[static_cast<std::size_t>(
        ((o * shape_[1] + c) * shape_[2] + a) * shape_[3] + b)];
  }
  double at(int o, int c, int a, int b) const {
    return data_[static_cast<std::size_t>(
        ((o * shape_[1] + c) * shape_[2] + a) * shape_[3] + b)];
  }

  double item() const;

  bool same_shape(const Tensor& o) const { return shape_ == o.shape_; }
  std::string shape_string() const;

 private:
  std::vector<int> shape_;
  std::vector<double> data_;
};

// Throws NonFinite if any element is NaN or infinite.
void check_finite(const Tensor& t, const char* op);

}  // namespace horizon::nn

#endif
