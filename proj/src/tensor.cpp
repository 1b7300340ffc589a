#include "horizon/tensor.hpp"

#include <cmath>

namespace horizon::nn {

Tensor::Tensor(std::vector<int> shape) : shape_(std::move(shape)) {
  std::int64_t n = 1;
  for (int d : shape_) {
    if (d <= 0) throw ShapeMismatch("tensor dims must be positive");
    n *= d;
  }
  data_.assign(static_cast<std::size_t>(n), 0.0);
}

Tensor Tensor::full(std::vector<int> shape, double value) {
  Tensor t(std::move(shape));
  for (auto& v : t.data_) v = value;
  return t;
}

Tensor Tensor::scalar(double value) {
  Tensor t({1});
  t.data_[0] = value;
  return t;
}

double Tensor::item() const {
  if (data_.size() != 1) throw NotScalar("item() on non-scalar tensor");
  return data_[0];
}

std::string Tensor::shape_string() const {
  std::string s = "[";
  for (std::size_t i = 0; i < shape_.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(shape_[i]);
  }
  return s + "]";
}

void check_finite(const Tensor& t, const char* op) {
  for (std::int64_t i = 0; i < t.size(); ++i)
    if (!std::isfinite(t[i]))
      throw NonFinite(std::string(op) + " produced a non-finite value");
}

}  // namespace horizon::nn
