#ifndef HORIZON_CELLS_HPP
#define HORIZON_CELLS_HPP

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "horizon/tape.hpp"

namespace horizon::cells {

using nn::NodeId;
using nn::Tape;

// Tape leaves for one recurrent layer. The w_?y kernels exist only for the
// residual/dense variant.
struct ConvLstmNodes {
  NodeId w_xi, w_hi, b_i;
  NodeId w_xf, w_hf, b_f;
  NodeId w_xo, w_ho, b_o;
  NodeId w_xc, w_hc, b_c;
  NodeId w_xy = nn::kNoNode;
  NodeId w_hy = nn::kNoNode;
  NodeId w_hhat_y = nn::kNoNode;
};

struct CellState {
  NodeId h = nn::kNoNode;
  NodeId c = nn::kNoNode;
};

CellState zero_state(Tape& tape, int channels, int height, int width);

// Standard ConvLSTM step:
//   i,f,o = sigmoid(W_x? * X + W_h? * H_prev + b_?)
//   C = f . C_prev + i . tanh(W_xc * X + W_hc * H_prev + b_c)
//   H = o . tanh(C),  Y = H
std::pair<NodeId, CellState> convlstm_step(Tape& tape,
                                           const ConvLstmNodes& w, NodeId x,
                                           const CellState& prev);

// Residual variant with dense output connection:
//   gates and C as standard; H_hat = o . C; H = tanh(H_hat)
//   Y_hat = W_xy * X + W_hy * H_prev + W_hhat_y * H_hat
//   Y = tanh(Y_hat + X)
std::pair<NodeId, CellState> residual_convlstm_step(Tape& tape,
                                                    const ConvLstmNodes& w,
                                                    NodeId x,
                                                    const CellState& prev);

// Standard step followed by Y = H + X, no extra nonlinearity.
std::pair<NodeId, CellState> naive_residual_step(Tape& tape,
                                                 const ConvLstmNodes& w,
                                                 NodeId x,
                                                 const CellState& prev);

// Causal temporal convolution: Y_t = sum_m taps[m] * X_{t-m+1} + bias.
// Out-of-range frames replicate the first frame. bias may be kNoNode.
std::vector<NodeId> tcn_causal_conv(Tape& tape,
                                    const std::vector<NodeId>& taps,
                                    NodeId bias,
                                    const std::vector<NodeId>& xs);

struct TcnConfig {
  std::vector<int> taps_per_layer;
};

// S_fov = 1 - L + sum M_l
int tcn_field_of_view(const TcnConfig& config);

enum class CellVariant { standard, naive_residual, residual_dense, disabled };

CellVariant cell_variant_from_string(const std::string& name);
std::string to_string(CellVariant variant);

struct BackboneStage {
  int channels = 0;
  int stride = 2;
};

struct HorizonNetConfig {
  int input_channels = 1;
  std::vector<BackboneStage> backbone;  // conv 3x3 + relu each
  CellVariant variant = CellVariant::residual_dense;
  int lstm_layers = 2;
  int lstm_hidden = 8;
  int lstm_kernel = 3;
};

// Backbone conv stack, two recurrent layers between the last conv and the
// global average pooling, then one fully connected head per output.
class HorizonNet {
 public:
  HorizonNet(HorizonNetConfig config, std::uint64_t seed);

  const HorizonNetConfig& config() const { return config_; }
  nn::ParamStore& params() { return params_; }
  const nn::ParamStore& params() const { return params_; }

  // Runs the whole sequence on one tape and returns per-frame (omega, theta)
  // scalar nodes. States start at zero and persist across frames; the
  // `disabled` variant resets them at every time step.
  std::vector<std::pair<NodeId, NodeId>> forward(
      Tape& tape, const nn::BoundParams& bound,
      const std::vector<nn::Tensor>& frames) const;

 private:
  HorizonNetConfig config_;
  nn::ParamStore params_;
};

}  // namespace horizon::cells

#endif
