#ifndef HORIZON_TAPE_HPP
#define HORIZON_TAPE_HPP

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "horizon/tensor.hpp"

namespace horizon {
class Rng;
}

namespace horizon::nn {

using NodeId = int;
inline constexpr NodeId kNoNode = -1;

// Reverse-mode tape. Nodes are created in execution order, which is a valid
// topological order, so backward() is a single reverse sweep. A Tape is
// single-threaded; independent tapes may run concurrently.
class Tape {
 public:
  NodeId leaf(Tensor value);
  NodeId push(Tensor value, std::function<void(Tape&)> back);
  // Attach the backward closure once the node id is known (ops capture it).
  NodeId rebind(NodeId id, std::function<void(Tape&)> back) {
    nodes_[static_cast<std::size_t>(id)].back = std::move(back);
    return id;
  }

  const Tensor& value(NodeId id) const { return nodes_[static_cast<std::size_t>(id)].value; }
  bool has_grad(NodeId id) const { return !nodes_[static_cast<std::size_t>(id)].grad.empty(); }
  // Zero tensor when the node was not reached by backward().
  Tensor grad(NodeId id) const;
  // Accumulation buffer, allocated on first use.
  Tensor& grad_buffer(NodeId id);

  // Seeds d(loss)/d(loss) = 1 and sweeps the tape in reverse. The loss node
  // must hold a scalar (throws NotScalar otherwise).
  void backward(NodeId loss);

  std::size_t size() const { return nodes_.size(); }

 private:
  struct Node {
    Tensor value;
    Tensor grad;  // empty until touched by backward
    std::function<void(Tape&)> back;
  };
  std::vector<Node> nodes_;
};

// Named trainable tensor with a gradient accumulator of identical shape.
struct Parameter {
  std::string name;
  Tensor value;
  Tensor grad;
};

class ParamStore {
 public:
  Parameter& add(const std::string& name, Tensor value);
  Parameter& get(const std::string& name);
  const Parameter& get(const std::string& name) const;
  bool contains(const std::string& name) const;
  std::vector<Parameter>& all() { return params_; }
  const std::vector<Parameter>& all() const { return params_; }
  void zero_grads();

 private:
  std::vector<Parameter> params_;
  std::map<std::string, std::size_t> index_;
};

// One tape leaf per parameter; grads flow back into Parameter::grad.
class BoundParams {
 public:
  BoundParams(Tape& tape, const ParamStore& store);
  NodeId id(const std::string& name) const;
  // param.grad += scale * d(loss)/d(param); store must be the one bound
  void accumulate_grads(ParamStore& store, double scale = 1.0);

 private:
  Tape* tape_;
  std::map<std::string, NodeId> ids_;
};

// ---- primitive ops ----

// Cross-correlation, zero same-padding. bias may be kNoNode.
NodeId conv2d(Tape& tape, NodeId input, NodeId kernel, NodeId bias,
              int stride = 1);
NodeId sigmoid(Tape& tape, NodeId x);
NodeId tanh_op(Tape& tape, NodeId x);
NodeId relu(Tape& tape, NodeId x);
NodeId hadamard(Tape& tape, NodeId a, NodeId b);
NodeId add(Tape& tape, NodeId a, NodeId b);
NodeId scale(Tape& tape, NodeId x, double factor);
NodeId concat_channels(Tape& tape, const std::vector<NodeId>& parts);
NodeId global_avg_pool(Tape& tape, NodeId x);
// x: [D], weight: [1,D], bias: scalar -> scalar
NodeId fully_connected(Tape& tape, NodeId x, NodeId weight, NodeId bias);
NodeId sum_all(Tape& tape, NodeId x);
NodeId sum_scalars(Tape& tape, const std::vector<NodeId>& xs);
// Huber with unit transition point, target held constant.
NodeId huber_op(Tape& tape, NodeId x, double target);

// Uniform init in +-sqrt(1/fan_in).
Tensor uniform_init(std::vector<int> shape, int fan_in, horizon::Rng& rng);

}  // namespace horizon::nn

#endif
