#include "horizon/tape.hpp"

#include <cmath>

#include "horizon/kernels.hpp"
#include "horizon/rng.hpp"

namespace horizon::nn {

NodeId Tape::leaf(Tensor value) {
  check_finite(value, "leaf");
  nodes_.push_back({std::move(value), Tensor{}, nullptr});
  return static_cast<NodeId>(nodes_.size()) - 1;
}

NodeId Tape::push(Tensor value, std::function<void(Tape&)> back) {
  check_finite(value, "op");
  nodes_.push_back({std::move(value), Tensor{}, std::move(back)});
  return static_cast<NodeId>(nodes_.size()) - 1;
}

Tensor Tape::grad(NodeId id) const {
  const Node& n = nodes_[static_cast<std::size_t>(id)];
  if (!n.grad.empty()) return n.grad;
  return Tensor(n.value.shape());
}

Tensor& Tape::grad_buffer(NodeId id) {
  Node& n = nodes_[static_cast<std::size_t>(id)];
  if (n.grad.empty()) n.grad = Tensor(n.value.shape());
  return n.grad;
}

void Tape::backward(NodeId loss) {
  if (nodes_[static_cast<std::size_t>(loss)].value.size() != 1)
    throw NotScalar("backward: loss node is not a scalar");
  grad_buffer(loss)[0] = 1.0;
  for (NodeId i = loss; i >= 0; --i) {
    Node& n = nodes_[static_cast<std::size_t>(i)];
    if (n.grad.empty() || !n.back) continue;
    n.back(*this);
  }
}

Parameter& ParamStore::add(const std::string& name, Tensor value) {
  if (index_.count(name)) throw Error("duplicate parameter name: " + name);
  Parameter p;
  p.name = name;
  p.grad = Tensor(value.shape());
  p.value = std::move(value);
  index_[name] = params_.size();
  params_.push_back(std::move(p));
  return params_.back();
}

Parameter& ParamStore::get(const std::string& name) {
  auto it = index_.find(name);
  if (it == index_.end()) throw Error("unknown parameter: " + name);
  return params_[it->second];
}

const Parameter& ParamStore::get(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) throw Error("unknown parameter: " + name);
  return params_[it->second];
}

bool ParamStore::contains(const std::string& name) const {
  return index_.count(name) > 0;
}

void ParamStore::zero_grads() {
  for (auto& p : params_)
    for (std::int64_t i = 0; i < p.grad.size(); ++i) p.grad[i] = 0.0;
}

BoundParams::BoundParams(Tape& tape, const ParamStore& store) : tape_(&tape) {
  for (const auto& p : store.all()) ids_[p.name] = tape.leaf(p.value);
}

NodeId BoundParams::id(const std::string& name) const {
  auto it = ids_.find(name);
  if (it == ids_.end()) throw Error("unbound parameter: " + name);
  return it->second;
}

void BoundParams::accumulate_grads(ParamStore& store, double scale) {
  for (auto& [name, node] : ids_) {
    if (!tape_->has_grad(node)) continue;
    Tensor g = tape_->grad(node);
    check_finite(g, "gradient");
    Tensor& acc = store.get(name).grad;
    for (std::int64_t i = 0; i < g.size(); ++i) acc[i] += scale * g[i];
  }
}

// ---- ops ----

NodeId conv2d(Tape& tape, NodeId input, NodeId kernel, NodeId bias,
              int stride) {
  const Tensor& x = tape.value(input);
  const Tensor& w = tape.value(kernel);
  kernels::Conv2dDims d = kernels::conv2d_dims(x, w, stride);
  const double* b = nullptr;
  if (bias != kNoNode) {
    const Tensor& bt = tape.value(bias);
    if (bt.rank() != 1 || bt.dim(0) != d.c_out)
      throw ShapeMismatch("conv2d bias must be [C_out]");
    b = bt.data();
  }
  Tensor y({d.c_out, d.h_out, d.w_out});
  kernels::conv2d_forward(x.data(), w.data(), b, y.data(), d);
  NodeId out = tape.push(std::move(y), nullptr);
  auto back = [input, kernel, bias, d, out](Tape& t) {
    const Tensor& dy = t.grad_buffer(out);
    kernels::conv2d_backward_input(dy.data(), t.value(kernel).data(),
                                   t.grad_buffer(input).data(), d);
    kernels::conv2d_backward_kernel(dy.data(), t.value(input).data(),
                                    t.grad_buffer(kernel).data(), d);
    if (bias != kNoNode)
      kernels::conv2d_backward_bias(dy.data(), t.grad_buffer(bias).data(), d);
  };
  // Rebind the closure now that the output id is known.
  return tape.rebind(out, back);
}

namespace {

template <typename Fwd, typename Dfn>
NodeId pointwise(Tape& tape, NodeId input, Fwd f, Dfn dfdx_from_xy) {
  const Tensor& x = tape.value(input);
  Tensor y(x.shape());
  for (std::int64_t i = 0; i < x.size(); ++i) y[i] = f(x[i]);
  NodeId out = tape.push(std::move(y), nullptr);
  auto back = [input, out, dfdx_from_xy](Tape& t) {
    const Tensor& dy = t.grad_buffer(out);
    const Tensor& xv = t.value(input);
    const Tensor& yv = t.value(out);
    Tensor& dx = t.grad_buffer(input);
    for (std::int64_t i = 0; i < dy.size(); ++i)
      dx[i] += dy[i] * dfdx_from_xy(xv[i], yv[i]);
  };
  return tape.rebind(out, back);
}

}  // namespace

NodeId sigmoid(Tape& tape, NodeId x) {
  return pointwise(
      tape, x, [](double v) { return 1.0 / (1.0 + std::exp(-v)); },
      [](double, double y) { return y * (1.0 - y); });
}

NodeId tanh_op(Tape& tape, NodeId x) {
  return pointwise(
      tape, x, [](double v) { return std::tanh(v); },
      [](double, double y) { return 1.0 - y * y; });
}

NodeId relu(Tape& tape, NodeId x) {
  return pointwise(
      tape, x, [](double v) { return v > 0.0 ? v : 0.0; },
      [](double xv, double) { return xv > 0.0 ? 1.0 : 0.0; });
}

NodeId hadamard(Tape& tape, NodeId a, NodeId b) {
  const Tensor& av = tape.value(a);
  const Tensor& bv = tape.value(b);
  if (!av.same_shape(bv))
    throw ShapeMismatch("hadamard: " + av.shape_string() + " vs " +
                        bv.shape_string());
  Tensor y(av.shape());
  for (std::int64_t i = 0; i < y.size(); ++i) y[i] = av[i] * bv[i];
  NodeId out = tape.push(std::move(y), nullptr);
  auto back = [a, b, out](Tape& t) {
    const Tensor& dy = t.grad_buffer(out);
    const Tensor& av2 = t.value(a);
    const Tensor& bv2 = t.value(b);
    Tensor& da = t.grad_buffer(a);
    Tensor& db = t.grad_buffer(b);
    for (std::int64_t i = 0; i < dy.size(); ++i) {
      da[i] += dy[i] * bv2[i];
      db[i] += dy[i] * av2[i];
    }
  };
  return tape.rebind(out, back);
}

NodeId add(Tape& tape, NodeId a, NodeId b) {
  const Tensor& av = tape.value(a);
  const Tensor& bv = tape.value(b);
  if (!av.same_shape(bv))
    throw ShapeMismatch("add: " + av.shape_string() + " vs " +
                        bv.shape_string());
  Tensor y(av.shape());
  for (std::int64_t i = 0; i < y.size(); ++i) y[i] = av[i] + bv[i];
  NodeId out = tape.push(std::move(y), nullptr);
  auto back = [a, b, out](Tape& t) {
    const Tensor& dy = t.grad_buffer(out);
    Tensor& da = t.grad_buffer(a);
    Tensor& db = t.grad_buffer(b);
    for (std::int64_t i = 0; i < dy.size(); ++i) {
      da[i] += dy[i];
      db[i] += dy[i];
    }
  };
  return tape.rebind(out, back);
}

NodeId scale(Tape& tape, NodeId x, double factor) {
  const Tensor& xv = tape.value(x);
  Tensor y(xv.shape());
  for (std::int64_t i = 0; i < y.size(); ++i) y[i] = factor * xv[i];
  NodeId out = tape.push(std::move(y), nullptr);
  auto back = [x, out, factor](Tape& t) {
    const Tensor& dy = t.grad_buffer(out);
    Tensor& dx = t.grad_buffer(x);
    for (std::int64_t i = 0; i < dy.size(); ++i) dx[i] += factor * dy[i];
  };
  return tape.rebind(out, back);
}

NodeId concat_channels(Tape& tape, const std::vector<NodeId>& parts) {
  if (parts.empty()) throw ShapeMismatch("concat_channels: no inputs");
  int h = tape.value(parts[0]).dim(1);
  int w = tape.value(parts[0]).dim(2);
  int c_total = 0;
  for (NodeId p : parts) {
    const Tensor& v = tape.value(p);
    if (v.rank() != 3 || v.dim(1) != h || v.dim(2) != w)
      throw ShapeMismatch("concat_channels: spatial dims differ");
    c_total += v.dim(0);
  }
  Tensor y({c_total, h, w});
  std::int64_t offset = 0;
  for (NodeId p : parts) {
    const Tensor& v = tape.value(p);
    for (std::int64_t i = 0; i < v.size(); ++i) y[offset + i] = v[i];
    offset += v.size();
  }
  NodeId out = tape.push(std::move(y), nullptr);
  auto back = [parts, out](Tape& t) {
    const Tensor& dy = t.grad_buffer(out);
    std::int64_t off = 0;
    for (NodeId p : parts) {
      Tensor& dp = t.grad_buffer(p);
      for (std::int64_t i = 0; i < dp.size(); ++i) dp[i] += dy[off + i];
      off += dp.size();
    }
  };
  return tape.rebind(out, back);
}

NodeId global_avg_pool(Tape& tape, NodeId x) {
  const Tensor& xv = tape.value(x);
  if (xv.rank() != 3) throw ShapeMismatch("global_avg_pool expects [C,H,W]");
  int c = xv.dim(0);
  std::int64_t plane = static_cast<std::int64_t>(xv.dim(1)) * xv.dim(2);
  Tensor y({c});
  for (int ch = 0; ch < c; ++ch) {
    double acc = 0.0;
    for (std::int64_t i = 0; i < plane; ++i) acc += xv[ch * plane + i];
    y[ch] = acc / static_cast<double>(plane);
  }
  NodeId out = tape.push(std::move(y), nullptr);
  auto back = [x, out, c, plane](Tape& t) {
    const Tensor& dy = t.grad_buffer(out);
    Tensor& dx = t.grad_buffer(x);
    for (int ch = 0; ch < c; ++ch) {
      double g = dy[ch] / static_cast<double>(plane);
      for (std::int64_t i = 0; i < plane; ++i) dx[ch * plane + i] += g;
    }
  };
  return tape.rebind(out, back);
}

NodeId fully_connected(Tape& tape, NodeId x, NodeId weight, NodeId bias) {
  const Tensor& xv = tape.value(x);
  const Tensor& wv = tape.value(weight);
  const Tensor& bv = tape.value(bias);
  if (xv.rank() != 1) throw ShapeMismatch("fully_connected expects x [D]");
  if (wv.rank() != 2 || wv.dim(0) != 1 || wv.dim(1) != xv.dim(0))
    throw ShapeMismatch("fully_connected weight must be [1,D]");
  if (bv.size() != 1) throw ShapeMismatch("fully_connected bias must be scalar");
  double acc = bv[0];
  for (std::int64_t i = 0; i < xv.size(); ++i) acc += wv[i] * xv[i];
  NodeId out = tape.push(Tensor::scalar(acc), nullptr);
  auto back = [x, weight, bias, out](Tape& t) {
    double g = t.grad_buffer(out)[0];
    const Tensor& xv2 = t.value(x);
    const Tensor& wv2 = t.value(weight);
    Tensor& dx = t.grad_buffer(x);
    Tensor& dw = t.grad_buffer(weight);
    for (std::int64_t i = 0; i < xv2.size(); ++i) {
      dx[i] += g * wv2[i];
      dw[i] += g * xv2[i];
    }
    t.grad_buffer(bias)[0] += g;
  };
  return tape.rebind(out, back);
}

NodeId sum_all(Tape& tape, NodeId x) {
  const Tensor& xv = tape.value(x);
  double acc = 0.0;
  for (std::int64_t i = 0; i < xv.size(); ++i) acc += xv[i];
  NodeId out = tape.push(Tensor::scalar(acc), nullptr);
  auto back = [x, out](Tape& t) {
    double g = t.grad_buffer(out)[0];
    Tensor& dx = t.grad_buffer(x);
    for (std::int64_t i = 0; i < dx.size(); ++i) dx[i] += g;
  };
  return tape.rebind(out, back);
}

NodeId sum_scalars(Tape& tape, const std::vector<NodeId>& xs) {
  if (xs.empty()) throw EmptyInput("sum_scalars: no inputs");
  double acc = 0.0;
  for (NodeId n : xs) {
    if (tape.value(n).size() != 1) throw NotScalar("sum_scalars: non-scalar");
    acc += tape.value(n)[0];
  }
  NodeId out = tape.push(Tensor::scalar(acc), nullptr);
  auto back = [xs, out](Tape& t) {
    double g = t.grad_buffer(out)[0];
    for (NodeId n : xs) t.grad_buffer(n)[0] += g;
  };
  return tape.rebind(out, back);
}

NodeId huber_op(Tape& tape, NodeId x, double target) {
  if (tape.value(x).size() != 1) throw NotScalar("huber_op: non-scalar input");
  double d = tape.value(x)[0] - target;
  double v = std::fabs(d) <= 1.0 ? 0.5 * d * d : std::fabs(d) - 0.5;
  NodeId out = tape.push(Tensor::scalar(v), nullptr);
  auto back = [x, out, target](Tape& t) {
    double g = t.grad_buffer(out)[0];
    double d2 = t.value(x)[0] - target;
    double slope = std::fabs(d2) <= 1.0 ? d2 : (d2 > 0.0 ? 1.0 : -1.0);
    t.grad_buffer(x)[0] += g * slope;
  };
  return tape.rebind(out, back);
}

Tensor uniform_init(std::vector<int> shape, int fan_in, horizon::Rng& rng) {
  Tensor t(std::move(shape));
  double bound = std::sqrt(1.0 / static_cast<double>(fan_in));
  for (std::int64_t i = 0; i < t.size(); ++i)
    t[i] = rng.uniform(-bound, bound);
  return t;
}

}  // namespace horizon::nn
