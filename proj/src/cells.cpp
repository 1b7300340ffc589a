#include "horizon/cells.hpp"

#include "horizon/rng.hpp"

namespace horizon::cells {

using nn::add;
using nn::conv2d;
using nn::hadamard;
using nn::kNoNode;
using nn::sigmoid;
using nn::tanh_op;
using nn::Tensor;

CellState zero_state(Tape& tape, int channels, int height, int width) {
  CellState s;
  s.h = tape.leaf(Tensor({channels, height, width}));
  s.c = tape.leaf(Tensor({channels, height, width}));
  return s;
}

namespace {

NodeId gate_preact(Tape& t, NodeId x, NodeId h, NodeId wx, NodeId wh,
                   NodeId b) {
  return add(t, conv2d(t, x, wx, b), conv2d(t, h, wh, kNoNode));
}

struct GateOut {
  NodeId i, f, o, c_new;
};

GateOut gates_and_cell(Tape& t, const ConvLstmNodes& w, NodeId x,
                       const CellState& prev) {
  GateOut g;
  g.i = sigmoid(t, gate_preact(t, x, prev.h, w.w_xi, w.w_hi, w.b_i));
  g.f = sigmoid(t, gate_preact(t, x, prev.h, w.w_xf, w.w_hf, w.b_f));
  g.o = sigmoid(t, gate_preact(t, x, prev.h, w.w_xo, w.w_ho, w.b_o));
  NodeId cand = tanh_op(t, gate_preact(t, x, prev.h, w.w_xc, w.w_hc, w.b_c));
  g.c_new = add(t, hadamard(t, g.f, prev.c), hadamard(t, g.i, cand));
  return g;
}

}  // namespace

std::pair<NodeId, CellState> convlstm_step(Tape& tape, const ConvLstmNodes& w,
                                           NodeId x, const CellState& prev) {
  GateOut g = gates_and_cell(tape, w, x, prev);
  NodeId h = hadamard(tape, g.o, tanh_op(tape, g.c_new));
  return {h, CellState{h, g.c_new}};
}

std::pair<NodeId, CellState> residual_convlstm_step(Tape& tape,
                                                    const ConvLstmNodes& w,
                                                    NodeId x,
                                                    const CellState& prev) {
  GateOut g = gates_and_cell(tape, w, x, prev);
  NodeId h_hat = hadamard(tape, g.o, g.c_new);
  NodeId h = tanh_op(tape, h_hat);
  NodeId y_hat = add(tape,
                     add(tape, conv2d(tape, x, w.w_xy, kNoNode),
                         conv2d(tape, prev.h, w.w_hy, kNoNode)),
                     conv2d(tape, h_hat, w.w_hhat_y, kNoNode));
  NodeId y = tanh_op(tape, add(tape, y_hat, x));
  return {y, CellState{h, g.c_new}};
}

std::pair<NodeId, CellState> naive_residual_step(Tape& tape,
                                                 const ConvLstmNodes& w,
                                                 NodeId x,
                                                 const CellState& prev) {
  auto [h, state] = convlstm_step(tape, w, x, prev);
  NodeId y = add(tape, h, x);
  return {y, state};
}

std::vector<NodeId> tcn_causal_conv(Tape& tape,
                                    const std::vector<NodeId>& taps,
                                    NodeId bias,
                                    const std::vector<NodeId>& xs) {
  if (taps.empty()) throw ShapeMismatch("tcn_causal_conv: no taps");
  if (xs.empty()) throw EmptyInput("tcn_causal_conv: empty sequence");
  int m_taps = static_cast<int>(taps.size());
  std::vector<NodeId> out;
  out.reserve(xs.size());
  for (int t = 0; t < static_cast<int>(xs.size()); ++t) {
    NodeId acc = kNoNode;
    for (int m = 0; m < m_taps; ++m) {
      int src = t - m;
      if (src < 0) src = 0;  // replicate the first frame
      NodeId term =
          conv2d(tape, xs[static_cast<std::size_t>(src)],
                 taps[static_cast<std::size_t>(m)], m == 0 ? bias : kNoNode);
      acc = (acc == kNoNode) ? term : add(tape, acc, term);
    }
    out.push_back(acc);
  }
  return out;
}

int tcn_field_of_view(const TcnConfig& config) {
  int layers = static_cast<int>(config.taps_per_layer.size());
  int sum = 0;
  for (int m : config.taps_per_layer) {
    if (m < 1) throw BadConfig("tcn taps must be >= 1");
    sum += m;
  }
  return 1 - layers + sum;
}

CellVariant cell_variant_from_string(const std::string& name) {
  if (name == "standard") return CellVariant::standard;
  if (name == "naive_residual") return CellVariant::naive_residual;
  if (name == "residual_dense") return CellVariant::residual_dense;
  if (name == "disabled") return CellVariant::disabled;
  throw BadConfig("unknown cell variant: " + name);
}

std::string to_string(CellVariant variant) {
  switch (variant) {
    case CellVariant::standard: return "standard";
    case CellVariant::naive_residual: return "naive_residual";
    case CellVariant::residual_dense: return "residual_dense";
    case CellVariant::disabled: return "disabled";
  }
  return "?";
}

namespace {

std::string lstm_name(int layer, const char* tail) {
  return "lstm." + std::to_string(layer) + "." + tail;
}

bool residual_output(CellVariant v) {
  return v == CellVariant::residual_dense || v == CellVariant::disabled;
}

}  // namespace

HorizonNet::HorizonNet(HorizonNetConfig config, std::uint64_t seed)
    : config_(std::move(config)) {
  if (config_.backbone.empty()) throw BadConfig("backbone must not be empty");
  if (config_.lstm_kernel % 2 == 0)
    throw BadConfig("lstm kernel size must be odd");

  Rng rng(seed);
  int ch = config_.input_channels;
  for (std::size_t s = 0; s < config_.backbone.size(); ++s) {
    const auto& stage = config_.backbone[s];
    std::string base = "backbone." + std::to_string(s);
    params_.add(base + ".w", nn::uniform_init({stage.channels, ch, 3, 3},
                                              ch * 9, rng));
    params_.add(base + ".b", Tensor({stage.channels}));
    ch = stage.channels;
  }

  int k = config_.lstm_kernel;
  int hidden = config_.lstm_hidden;
  if (config_.variant == CellVariant::naive_residual && hidden != ch)
    throw BadConfig("naive residual cell needs hidden channels == input "
                    "channels (Y = H + X)");

  int in_ch = ch;
  for (int layer = 0; layer < config_.lstm_layers; ++layer) {
    auto gate = [&](const char* tail) {
      params_.add(lstm_name(layer, tail) + "_x",
                  nn::uniform_init({hidden, in_ch, k, k}, in_ch * k * k, rng));
      params_.add(lstm_name(layer, tail) + "_h",
                  nn::uniform_init({hidden, hidden, k, k}, hidden * k * k, rng));
    };
    gate("w_i");
    gate("w_f");
    gate("w_o");
    gate("w_c");
    params_.add(lstm_name(layer, "b_i"), Tensor({hidden}));
    // forget gate starts open, the usual recurrent-training stabilizer
    params_.add(lstm_name(layer, "b_f"), Tensor::full({hidden}, 1.0));
    params_.add(lstm_name(layer, "b_o"), Tensor({hidden}));
    params_.add(lstm_name(layer, "b_c"), Tensor({hidden}));
    if (residual_output(config_.variant)) {
      params_.add(lstm_name(layer, "w_xy"),
                  nn::uniform_init({in_ch, in_ch, k, k}, in_ch * k * k, rng));
      params_.add(lstm_name(layer, "w_hy"),
                  nn::uniform_init({in_ch, hidden, k, k}, hidden * k * k, rng));
      params_.add(lstm_name(layer, "w_hhat_y"),
                  nn::uniform_init({in_ch, hidden, k, k}, hidden * k * k, rng));
    }
    // next layer consumes this layer's output
    in_ch = residual_output(config_.variant) ? in_ch : hidden;
  }

  int pooled = in_ch;
  for (const char* head : {"omega", "theta"}) {
    params_.add(std::string("head.") + head + ".w",
                nn::uniform_init({1, pooled}, pooled, rng));
    params_.add(std::string("head.") + head + ".b", Tensor({1}));
  }
}

std::vector<std::pair<NodeId, NodeId>> HorizonNet::forward(
    Tape& tape, const nn::BoundParams& bound,
    const std::vector<nn::Tensor>& frames) const {
  if (frames.empty()) throw EmptyInput("forward: no frames");

  auto lstm_nodes = [&](int layer) {
    ConvLstmNodes n;
    n.w_xi = bound.id(lstm_name(layer, "w_i_x"));
    n.w_hi = bound.id(lstm_name(layer, "w_i_h"));
    n.b_i = bound.id(lstm_name(layer, "b_i"));
    n.w_xf = bound.id(lstm_name(layer, "w_f_x"));
    n.w_hf = bound.id(lstm_name(layer, "w_f_h"));
    n.b_f = bound.id(lstm_name(layer, "b_f"));
    n.w_xo = bound.id(lstm_name(layer, "w_o_x"));
    n.w_ho = bound.id(lstm_name(layer, "w_o_h"));
    n.b_o = bound.id(lstm_name(layer, "b_o"));
    n.w_xc = bound.id(lstm_name(layer, "w_c_x"));
    n.w_hc = bound.id(lstm_name(layer, "w_c_h"));
    n.b_c = bound.id(lstm_name(layer, "b_c"));
    if (residual_output(config_.variant)) {
      n.w_xy = bound.id(lstm_name(layer, "w_xy"));
      n.w_hy = bound.id(lstm_name(layer, "w_hy"));
      n.w_hhat_y = bound.id(lstm_name(layer, "w_hhat_y"));
    }
    return n;
  };

  std::vector<CellState> states(static_cast<std::size_t>(config_.lstm_layers));
  bool states_ready = false;

  std::vector<std::pair<NodeId, NodeId>> outputs;
  outputs.reserve(frames.size());

  for (const auto& frame : frames) {
    NodeId x = tape.leaf(frame);
    for (std::size_t s = 0; s < config_.backbone.size(); ++s) {
      std::string base = "backbone." + std::to_string(s);
      x = nn::relu(tape, conv2d(tape, x, bound.id(base + ".w"),
                                bound.id(base + ".b"),
                                config_.backbone[s].stride));
    }

    const Tensor& feat = tape.value(x);
    int fh = feat.dim(1);
    int fw = feat.dim(2);
    if (!states_ready || config_.variant == CellVariant::disabled) {
      for (auto& st : states)
        st = zero_state(tape, config_.lstm_hidden, fh, fw);
      states_ready = true;
    }

    for (int layer = 0; layer < config_.lstm_layers; ++layer) {
      ConvLstmNodes w = lstm_nodes(layer);
      std::pair<NodeId, CellState> step;
      switch (config_.variant) {
        case CellVariant::standard:
          step = convlstm_step(tape, w, x, states[layer]);
          break;
        case CellVariant::naive_residual:
          step = naive_residual_step(tape, w, x, states[layer]);
          break;
        case CellVariant::residual_dense:
        case CellVariant::disabled:
          step = residual_convlstm_step(tape, w, x, states[layer]);
          break;
      }
      x = step.first;
      states[layer] = step.second;
    }

    NodeId pooled = nn::global_avg_pool(tape, x);
    NodeId omega = nn::fully_connected(tape, pooled, bound.id("head.omega.w"),
                                       bound.id("head.omega.b"));
    NodeId theta = nn::fully_connected(tape, pooled, bound.id("head.theta.w"),
                                       bound.id("head.theta.b"));
    outputs.emplace_back(omega, theta);
  }
  return outputs;
}

}  // namespace horizon::cells
