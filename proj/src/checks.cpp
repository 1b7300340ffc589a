#include "horizon/checks.hpp"

#include "horizon/cells.hpp"
#include "horizon/loss.hpp"
#include "horizon/rng.hpp"

namespace horizon::checks {

using nn::BoundParams;
using nn::NodeId;
using nn::ParamStore;
using nn::Tape;
using nn::Tensor;

namespace {

// Magnitudes in [lo, hi] with random sign, keeping samples away from the
// kinks of relu/abs-style ops.
Tensor sampled(std::vector<int> shape, Rng& rng, double lo, double hi) {
  Tensor t(std::move(shape));
  for (std::int64_t i = 0; i < t.size(); ++i) {
    double mag = rng.uniform(lo, hi);
    t[i] = rng.uniform() < 0.5 ? -mag : mag;
  }
  return t;
}

using Builder = std::function<NodeId(Tape&, BoundParams&)>;

SuiteResult run_one(const std::string& name, ParamStore& params,
                    const Builder& fn, double tolerance) {
  return {name, nn::grad_check(fn, params, tolerance)};
}

std::vector<SuiteResult> primitive_suite(double tol, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<SuiteResult> out;

  {
    ParamStore p;
    p.add("x", sampled({2, 5, 5}, rng, 0.2, 0.9));
    p.add("w", sampled({3, 2, 3, 3}, rng, 0.2, 0.9));
    p.add("b", sampled({3}, rng, 0.2, 0.9));
    out.push_back(run_one("conv2d", p, [](Tape& t, BoundParams& b) {
      return nn::sum_all(t, nn::conv2d(t, b.id("x"), b.id("w"), b.id("b")));
    }, tol));
  }
  {
    ParamStore p;
    p.add("x", sampled({1, 5, 5}, rng, 0.2, 0.9));
    p.add("w", sampled({2, 1, 3, 3}, rng, 0.2, 0.9));
    p.add("b", sampled({2}, rng, 0.2, 0.9));
    out.push_back(run_one("conv2d_stride2", p, [](Tape& t, BoundParams& b) {
      return nn::sum_all(t, nn::conv2d(t, b.id("x"), b.id("w"), b.id("b"), 2));
    }, tol));
  }
  for (const char* op : {"sigmoid", "tanh", "relu"}) {
    ParamStore p;
    p.add("x", sampled({2, 3, 3}, rng, 0.2, 0.9));
    std::string op_name = op;
    out.push_back(run_one(op_name, p, [op_name](Tape& t, BoundParams& b) {
      NodeId x = b.id("x");
      NodeId y = op_name == "sigmoid" ? nn::sigmoid(t, x)
                 : op_name == "tanh"  ? nn::tanh_op(t, x)
                                      : nn::relu(t, x);
      return nn::sum_all(t, y);
    }, tol));
  }
  {
    ParamStore p;
    p.add("a", sampled({2, 3, 3}, rng, 0.2, 0.9));
    p.add("b", sampled({2, 3, 3}, rng, 0.2, 0.9));
    out.push_back(run_one("hadamard", p, [](Tape& t, BoundParams& b) {
      return nn::sum_all(t, nn::hadamard(t, b.id("a"), b.id("b")));
    }, tol));
    out.push_back(run_one("add_scale", p, [](Tape& t, BoundParams& b) {
      return nn::sum_all(t, nn::scale(t, nn::add(t, b.id("a"), b.id("b")), 0.7));
    }, tol));
  }
  {
    ParamStore p;
    p.add("a", sampled({1, 3, 3}, rng, 0.2, 0.9));
    p.add("b", sampled({2, 3, 3}, rng, 0.2, 0.9));
    out.push_back(run_one("concat_channels", p, [](Tape& t, BoundParams& b) {
      NodeId cat = nn::concat_channels(t, {b.id("a"), b.id("b")});
      // weight the channels so the split in the backward pass is exercised
      NodeId mask = t.leaf([&] {
        Tensor m({3, 3, 3});
        for (std::int64_t i = 0; i < m.size(); ++i)
          m[i] = 0.1 * static_cast<double>(i % 7) + 0.3;
        return m;
      }());
      return nn::sum_all(t, nn::hadamard(t, cat, mask));
    }, tol));
  }
  {
    ParamStore p;
    p.add("x", sampled({3, 4, 4}, rng, 0.2, 0.9));
    out.push_back(run_one("global_avg_pool", p, [](Tape& t, BoundParams& b) {
      return nn::sum_all(t, nn::global_avg_pool(t, b.id("x")));
    }, tol));
  }
  {
    ParamStore p;
    p.add("x", sampled({6}, rng, 0.2, 0.9));
    p.add("w", sampled({1, 6}, rng, 0.2, 0.9));
    p.add("b", sampled({1}, rng, 0.2, 0.9));
    out.push_back(run_one("fully_connected", p, [](Tape& t, BoundParams& b) {
      return nn::fully_connected(t, b.id("x"), b.id("w"), b.id("b"));
    }, tol));
  }
  {
    ParamStore p;
    p.add("x", Tensor::scalar(rng.uniform(0.1, 0.7)));  // |d| <= 0.8
    out.push_back(run_one("huber_quadratic", p, [](Tape& t, BoundParams& b) {
      return nn::huber_op(t, b.id("x"), 0.0);
    }, tol));
  }
  {
    ParamStore p;
    p.add("x", Tensor::scalar(rng.uniform(1.3, 2.5)));  // |d| >= 1.2
    out.push_back(run_one("huber_linear", p, [](Tape& t, BoundParams& b) {
      return nn::huber_op(t, b.id("x"), 0.0);
    }, tol));
  }
  {
    // away from the max tie and from delta = 0
    ParamStore p;
    p.add("omega", Tensor::scalar(3.0 + rng.uniform(-0.2, 0.2)));
    p.add("theta", Tensor::scalar(0.12 + rng.uniform(-0.01, 0.01)));
    geom::HorizonParams gt{1.0, 0.05};
    geom::ImageDims dims{20.0, 10.0};
    out.push_back(run_one("horizon_error", p, [gt, dims](Tape& t, BoundParams& b) {
      return loss::loss_horizon_node(t, b.id("omega"), b.id("theta"), gt, dims);
    }, tol));
    out.push_back(run_one("combined_loss", p, [gt, dims](Tape& t, BoundParams& b) {
      loss::ScheduleState s{1, 4};
      return loss::combined_loss_node(t, s, b.id("omega"), b.id("theta"), gt,
                                      dims);
    }, tol));
  }
  return out;
}

cells::ConvLstmNodes bind_cell(BoundParams& b, bool residual) {
  cells::ConvLstmNodes n;
  n.w_xi = b.id("w_xi");
  n.w_hi = b.id("w_hi");
  n.b_i = b.id("b_i");
  n.w_xf = b.id("w_xf");
  n.w_hf = b.id("w_hf");
  n.b_f = b.id("b_f");
  n.w_xo = b.id("w_xo");
  n.w_ho = b.id("w_ho");
  n.b_o = b.id("b_o");
  n.w_xc = b.id("w_xc");
  n.w_hc = b.id("w_hc");
  n.b_c = b.id("b_c");
  if (residual) {
    n.w_xy = b.id("w_xy");
    n.w_hy = b.id("w_hy");
    n.w_hhat_y = b.id("w_hhat_y");
  }
  return n;
}

ParamStore cell_params(Rng& rng, bool residual) {
  ParamStore p;
  p.add("x", sampled({1, 3, 3}, rng, 0.2, 0.9));
  p.add("h0", sampled({1, 3, 3}, rng, 0.1, 0.6));
  p.add("c0", sampled({1, 3, 3}, rng, 0.1, 0.6));
  for (const char* w : {"w_xi", "w_hi", "w_xf", "w_hf", "w_xo", "w_ho", "w_xc",
                        "w_hc"})
    p.add(w, sampled({1, 1, 3, 3}, rng, 0.1, 0.6));
  for (const char* b : {"b_i", "b_f", "b_o", "b_c"})
    p.add(b, sampled({1}, rng, 0.1, 0.6));
  if (residual)
    for (const char* w : {"w_xy", "w_hy", "w_hhat_y"})
      p.add(w, sampled({1, 1, 3, 3}, rng, 0.1, 0.6));
  return p;
}

std::vector<SuiteResult> cell_suite(const std::string& which, double tol,
                                    std::uint64_t seed) {
  Rng rng(seed);
  bool residual = which == "residual_dense";
  ParamStore p = cell_params(rng, residual);
  Builder fn = [which, residual](Tape& t, BoundParams& b) {
    cells::ConvLstmNodes w = bind_cell(b, residual);
    cells::CellState prev{b.id("h0"), b.id("c0")};
    std::pair<NodeId, cells::CellState> step;
    if (which == "standard")
      step = cells::convlstm_step(t, w, b.id("x"), prev);
    else if (which == "naive_residual")
      step = cells::naive_residual_step(t, w, b.id("x"), prev);
    else
      step = cells::residual_convlstm_step(t, w, b.id("x"), prev);
    return nn::sum_scalars(
        t, {nn::sum_all(t, step.first), nn::sum_all(t, step.second.h),
            nn::sum_all(t, step.second.c)});
  };
  return {run_one("cell_" + which, p, fn, tol)};
}

std::vector<SuiteResult> tcn_suite(double tol, std::uint64_t seed) {
  Rng rng(seed);
  ParamStore p;
  for (int t = 0; t < 4; ++t)
    p.add("x" + std::to_string(t), sampled({1, 3, 3}, rng, 0.2, 0.9));
  for (int m = 0; m < 3; ++m)
    p.add("tap" + std::to_string(m), sampled({1, 1, 3, 3}, rng, 0.1, 0.6));
  p.add("bias", sampled({1}, rng, 0.1, 0.6));
  Builder fn = [](Tape& t, BoundParams& b) {
    std::vector<NodeId> xs = {b.id("x0"), b.id("x1"), b.id("x2"), b.id("x3")};
    std::vector<NodeId> taps = {b.id("tap0"), b.id("tap1"), b.id("tap2")};
    auto ys = cells::tcn_causal_conv(t, taps, b.id("bias"), xs);
    std::vector<NodeId> sums;
    for (NodeId y : ys) sums.push_back(nn::sum_all(t, y));
    return nn::sum_scalars(t, sums);
  };
  return {run_one("tcn_layer", p, fn, tol)};
}

}  // namespace

std::vector<SuiteResult> gradcheck_suite(const std::string& which,
                                         double tolerance,
                                         std::uint64_t seed) {
  std::vector<SuiteResult> out;
  auto append = [&](std::vector<SuiteResult> part) {
    for (auto& r : part) out.push_back(std::move(r));
  };
  if (which == "primitives" || which == "all")
    append(primitive_suite(tolerance, seed));
  for (const char* cell : {"standard", "naive_residual", "residual_dense"})
    if (which == cell || which == "all")
      append(cell_suite(cell, tolerance, seed));
  if (which == "tcn" || which == "all") append(tcn_suite(tolerance, seed));
  if (out.empty()) throw BadConfig("unknown gradcheck suite: " + which);
  return out;
}

bool all_pass(const std::vector<SuiteResult>& results) {
  for (const auto& r : results)
    if (!r.report.pass) return false;
  return true;
}

}  // namespace horizon::checks
