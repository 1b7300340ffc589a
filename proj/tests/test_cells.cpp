#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "horizon/cells.hpp"
#include "horizon/rng.hpp"
#include "oracles.hpp"

using namespace horizon;
using cells::CellState;
using cells::ConvLstmNodes;
using nn::NodeId;
using nn::Tape;
using nn::Tensor;

namespace {

// 1x1 spatial, 1 channel: a cell step degenerates to a scalar recurrence
struct ScalarCellFixture {
  Tape tape;
  ConvLstmNodes nodes;
  oracles::ScalarLstmWeights w;

  explicit ScalarCellFixture(Rng& rng, bool residual) {
    auto kernel = [&](double& slot) {
      double v = rng.uniform(-0.8, 0.8);
      slot = v;
      Tensor k({1, 1, 1, 1});
      k[0] = v;
      return tape.leaf(k);
    };
    auto bias = [&](double& slot) {
      double v = rng.uniform(-0.5, 0.5);
      slot = v;
      return tape.leaf(Tensor::full({1}, v));
    };
    nodes.w_xi = kernel(w.wxi);
    nodes.w_hi = kernel(w.whi);
    nodes.b_i = bias(w.bi);
    nodes.w_xf = kernel(w.wxf);
    nodes.w_hf = kernel(w.whf);
    nodes.b_f = bias(w.bf);
    nodes.w_xo = kernel(w.wxo);
    nodes.w_ho = kernel(w.who);
    nodes.b_o = bias(w.bo);
    nodes.w_xc = kernel(w.wxc);
    nodes.w_hc = kernel(w.whc);
    nodes.b_c = bias(w.bc);
    if (residual) {
      nodes.w_xy = kernel(w.wxy);
      nodes.w_hy = kernel(w.why);
      nodes.w_hhat_y = kernel(w.whhy);
    }
  }

  NodeId scalar_frame(double v) {
    Tensor t({1, 1, 1});
    t[0] = v;
    return tape.leaf(t);
  }
};

Tensor random_frame(std::vector<int> shape, Rng& rng) {
  Tensor t(std::move(shape));
  for (std::int64_t i = 0; i < t.size(); ++i) t[i] = rng.uniform(-1.0, 1.0);
  return t;
}

}  // namespace

TEST_CASE("zero input, zero state, zero biases stay at zero") {
  Tape tape;
  ConvLstmNodes n;
  auto zk = [&] { return tape.leaf(Tensor({1, 1, 3, 3})); };
  auto zb = [&] { return tape.leaf(Tensor({1})); };
  n.w_xi = zk(); n.w_hi = zk(); n.b_i = zb();
  n.w_xf = zk(); n.w_hf = zk(); n.b_f = zb();
  n.w_xo = zk(); n.w_ho = zk(); n.b_o = zb();
  n.w_xc = zk(); n.w_hc = zk(); n.b_c = zb();
  n.w_xy = zk(); n.w_hy = zk(); n.w_hhat_y = zk();

  NodeId x = tape.leaf(Tensor({1, 3, 3}));
  CellState prev = cells::zero_state(tape, 1, 3, 3);

  auto [y1, s1] = cells::convlstm_step(tape, n, x, prev);
  for (std::int64_t i = 0; i < tape.value(y1).size(); ++i)
    CHECK(tape.value(y1)[i] == 0.0);
  for (std::int64_t i = 0; i < tape.value(s1.c).size(); ++i)
    CHECK(tape.value(s1.c)[i] == 0.0);

  auto [y2, s2] = cells::residual_convlstm_step(tape, n, x, prev);
  for (std::int64_t i = 0; i < tape.value(y2).size(); ++i)
    CHECK(tape.value(y2)[i] == 0.0);
  for (std::int64_t i = 0; i < tape.value(s2.h).size(); ++i)
    CHECK(tape.value(s2.h)[i] == 0.0);
}

TEST_CASE("scalar unroll matches the recurrence oracles over 100 steps") {
  Rng rng(21);
  SUBCASE("standard") {
    ScalarCellFixture fx(rng, false);
    oracles::ScalarState os;
    CellState state = cells::zero_state(fx.tape, 1, 1, 1);
    for (int t = 0; t < 100; ++t) {
      double x = rng.uniform(-1.5, 1.5);
      auto want = oracles::scalar_standard(fx.w, x, os);
      auto [y, next] = cells::convlstm_step(fx.tape, fx.nodes,
                                            fx.scalar_frame(x), state);
      CHECK(std::fabs(fx.tape.value(y)[0] - want.y) < 1e-12);
      CHECK(std::fabs(fx.tape.value(next.c)[0] - want.state.c) < 1e-12);
      os = want.state;
      state = next;
    }
  }
  SUBCASE("naive residual") {
    ScalarCellFixture fx(rng, false);
    oracles::ScalarState os;
    CellState state = cells::zero_state(fx.tape, 1, 1, 1);
    for (int t = 0; t < 100; ++t) {
      double x = rng.uniform(-1.5, 1.5);
      auto want = oracles::scalar_naive_residual(fx.w, x, os);
      auto [y, next] = cells::naive_residual_step(fx.tape, fx.nodes,
                                                  fx.scalar_frame(x), state);
      CHECK(std::fabs(fx.tape.value(y)[0] - want.y) < 1e-12);
      os = want.state;
      state = next;
    }
  }
  SUBCASE("residual dense") {
    ScalarCellFixture fx(rng, true);
    oracles::ScalarState os;
    CellState state = cells::zero_state(fx.tape, 1, 1, 1);
    for (int t = 0; t < 100; ++t) {
      double x = rng.uniform(-1.5, 1.5);
      auto want = oracles::scalar_residual_dense(fx.w, x, os);
      auto [y, next] = cells::residual_convlstm_step(fx.tape, fx.nodes,
                                                     fx.scalar_frame(x), state);
      CHECK(std::fabs(fx.tape.value(y)[0] - want.y) < 1e-12);
      CHECK(std::fabs(fx.tape.value(next.h)[0] - want.state.h) < 1e-12);
      CHECK(std::fabs(fx.tape.value(next.c)[0] - want.state.c) < 1e-12);
      os = want.state;
      state = next;
    }
  }
}

TEST_CASE("saturated gates freeze the cell state") {
  Rng rng(22);
  ScalarCellFixture fx(rng, false);
  auto& t = fx.tape;
  // f-gate wide open, i-gate shut
  fx.nodes.b_f = t.leaf(Tensor::full({1}, 30.0));
  fx.nodes.b_i = t.leaf(Tensor::full({1}, -30.0));

  Tensor c0({1, 1, 1});
  c0[0] = 0.37;
  CellState prev{t.leaf(Tensor({1, 1, 1})), t.leaf(c0)};
  auto [y, next] =
      cells::convlstm_step(t, fx.nodes, fx.scalar_frame(0.4), prev);
  CHECK(std::fabs(t.value(next.c)[0] - 0.37) < 1e-8);
}

TEST_CASE("residual cell symbolic reduction: identity W_xy doubles the input") {
  Tape tape;
  ConvLstmNodes n;
  auto zk = [&] { return tape.leaf(Tensor({1, 1, 1, 1})); };
  auto zb = [&] { return tape.leaf(Tensor({1})); };
  n.w_xi = zk(); n.w_hi = zk(); n.b_i = zb();
  n.w_xf = zk(); n.w_hf = zk(); n.b_f = zb();
  n.w_xo = zk(); n.w_ho = zk(); n.b_o = zb();
  n.w_xc = zk(); n.w_hc = zk(); n.b_c = zb();
  Tensor eye({1, 1, 1, 1});
  eye[0] = 1.0;
  n.w_xy = tape.leaf(eye);
  n.w_hy = zk();
  n.w_hhat_y = zk();

  CellState prev = cells::zero_state(tape, 1, 1, 1);
  for (double xv : {0.01, -0.03, 0.05}) {
    Tensor x({1, 1, 1});
    x[0] = xv;
    auto [y, s] = cells::residual_convlstm_step(tape, n, tape.leaf(x), prev);
    CHECK(tape.value(y)[0] ==
          doctest::Approx(std::tanh(2.0 * xv)).epsilon(1e-12));
  }
}

TEST_CASE("naive residual keeps the identity path with a frozen cell") {
  Tape tape;
  ConvLstmNodes n;
  auto zk = [&] { return tape.leaf(Tensor({1, 1, 3, 3})); };
  auto zb = [&] { return tape.leaf(Tensor({1})); };
  n.w_xi = zk(); n.w_hi = zk(); n.b_i = zb();
  n.w_xf = zk(); n.w_hf = zk(); n.b_f = zb();
  n.w_xo = zk(); n.w_ho = zk(); n.b_o = zb();
  n.w_xc = zk(); n.w_hc = zk(); n.b_c = zb();

  Rng rng(23);
  Tensor x = random_frame({1, 3, 3}, rng);
  CellState prev = cells::zero_state(tape, 1, 3, 3);
  auto [y, s] = cells::naive_residual_step(tape, n, tape.leaf(x), prev);
  for (std::int64_t i = 0; i < x.size(); ++i)
    CHECK(tape.value(y)[i] == x[i]);
}

TEST_CASE("hidden state ranges stay inside the activation bounds") {
  Rng rng(24);
  ScalarCellFixture fx(rng, true);
  CellState std_state = cells::zero_state(fx.tape, 1, 1, 1);
  CellState res_state = cells::zero_state(fx.tape, 1, 1, 1);
  for (int t = 0; t < 200; ++t) {
    double x = rng.uniform(-3.0, 3.0);
    auto [hy, hs] =
        cells::convlstm_step(fx.tape, fx.nodes, fx.scalar_frame(x), std_state);
    CHECK(std::fabs(fx.tape.value(hy)[0]) < 1.0);
    auto [ry, rs] = cells::residual_convlstm_step(fx.tape, fx.nodes,
                                                  fx.scalar_frame(x), res_state);
    CHECK(std::fabs(fx.tape.value(ry)[0]) < 1.0);
    std_state = hs;
    res_state = rs;
  }
}

TEST_CASE("tcn causal convolution") {
  Rng rng(25);
  SUBCASE("single tap reduces to per-frame conv2d") {
    Tape tape;
    Tensor tap = random_frame({2, 1, 3, 3}, rng);
    Tensor bias = random_frame({2}, rng);
    std::vector<NodeId> xs;
    for (int t = 0; t < 3; ++t)
      xs.push_back(tape.leaf(random_frame({1, 4, 4}, rng)));
    auto ys = cells::tcn_causal_conv(tape, {tape.leaf(tap)}, tape.leaf(bias),
                                     xs);
    for (int t = 0; t < 3; ++t) {
      NodeId direct = nn::conv2d(tape, xs[static_cast<std::size_t>(t)],
                                 tape.leaf(tap), tape.leaf(bias));
      for (std::int64_t i = 0; i < tape.value(direct).size(); ++i)
        CHECK(tape.value(ys[static_cast<std::size_t>(t)])[i] ==
              tape.value(direct)[i]);
    }
  }
  SUBCASE("three scalar taps realize h1 x_t + h2 x_{t-1} + h3 x_{t-2}") {
    Tape tape;
    double h1 = 0.3, h2 = -0.7, h3 = 0.2;
    auto tap = [&](double v) {
      Tensor k({1, 1, 1, 1});
      k[0] = v;
      return tape.leaf(k);
    };
    std::vector<double> x = {0.5, -0.25, 0.75, 1.0};
    std::vector<NodeId> xs;
    for (double v : x) {
      Tensor f({1, 1, 1});
      f[0] = v;
      xs.push_back(tape.leaf(f));
    }
    auto ys = cells::tcn_causal_conv(tape, {tap(h1), tap(h2), tap(h3)},
                                     nn::kNoNode, xs);
    // replicate-first padding for t < 2
    std::vector<double> want = {
        h1 * x[0] + h2 * x[0] + h3 * x[0],
        h1 * x[1] + h2 * x[0] + h3 * x[0],
        h1 * x[2] + h2 * x[1] + h3 * x[0],
        h1 * x[3] + h2 * x[2] + h3 * x[1],
    };
    for (std::size_t t = 0; t < want.size(); ++t)
      CHECK(tape.value(ys[t])[0] == doctest::Approx(want[t]).epsilon(1e-14));
  }
  SUBCASE("future frames cannot influence the present") {
    Tensor tap_a = random_frame({1, 1, 3, 3}, rng);
    Tensor tap_b = random_frame({1, 1, 3, 3}, rng);
    std::vector<Tensor> frames;
    for (int t = 0; t < 5; ++t) frames.push_back(random_frame({1, 3, 3}, rng));

    auto run = [&](const std::vector<Tensor>& fr) {
      Tape tape;
      std::vector<NodeId> xs;
      for (const auto& f : fr) xs.push_back(tape.leaf(f));
      auto ys = cells::tcn_causal_conv(
          tape, {tape.leaf(tap_a), tape.leaf(tap_b)}, nn::kNoNode, xs);
      return tape.value(ys[2]);  // output at t = 2
    };
    Tensor base = run(frames);
    auto perturbed = frames;
    perturbed[3] = random_frame({1, 3, 3}, rng);
    perturbed[4] = random_frame({1, 3, 3}, rng);
    Tensor after = run(perturbed);
    for (std::int64_t i = 0; i < base.size(); ++i)
      CHECK(base[i] == after[i]);
  }
}

TEST_CASE("tcn field of view formula") {
  CHECK(cells::tcn_field_of_view({{1, 3, 3, 5}}) == 9);
  CHECK(cells::tcn_field_of_view({{3, 3, 5, 7}}) == 15);
  CHECK(cells::tcn_field_of_view({{1, 1, 1}}) == 1);
  CHECK_THROWS_AS(cells::tcn_field_of_view({{2, 0}}), BadConfig);
}

TEST_CASE("tcn stack field-of-view boundary") {
  // random nonzero weights; perturbing X_{t-S_fov} leaves Y_t untouched,
  // perturbing X_{t-S_fov+1} changes it
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    Rng rng(seed);
    std::vector<int> taps_per_layer{1, 3, 3};  // S_fov = 6
    int s_fov = cells::tcn_field_of_view({taps_per_layer});
    REQUIRE(s_fov == 6);
    int t_probe = s_fov;  // 0-based; depends on frames 1..s_fov
    int total = s_fov + 2;

    std::vector<std::vector<Tensor>> layer_taps;
    for (int m : taps_per_layer) {
      std::vector<Tensor> taps;
      for (int i = 0; i < m; ++i) {
        Tensor k({1, 1, 1, 1});
        k[0] = rng.uniform(0.3, 1.0) * (rng.uniform() < 0.5 ? -1 : 1);
        taps.push_back(k);
      }
      layer_taps.push_back(taps);
    }
    std::vector<Tensor> frames;
    for (int t = 0; t < total; ++t) frames.push_back(random_frame({1, 1, 1}, rng));

    auto run = [&](const std::vector<Tensor>& fr) {
      Tape tape;
      std::vector<NodeId> xs;
      for (const auto& f : fr) xs.push_back(tape.leaf(f));
      for (const auto& taps : layer_taps) {
        std::vector<NodeId> tap_nodes;
        for (const auto& k : taps) tap_nodes.push_back(tape.leaf(k));
        xs = cells::tcn_causal_conv(tape, tap_nodes, nn::kNoNode, xs);
      }
      return tape.value(xs[static_cast<std::size_t>(t_probe)])[0];
    };

    double base = run(frames);
    auto outside = frames;
    outside[static_cast<std::size_t>(t_probe - s_fov)][0] += 10.0;
    CHECK(run(outside) == base);

    auto inside = frames;
    inside[static_cast<std::size_t>(t_probe - s_fov + 1)][0] += 10.0;
    CHECK(run(inside) != base);
  }
}

TEST_CASE("horizon net forward behaviours") {
  cells::HorizonNetConfig cfg;
  cfg.backbone = {{2, 2}, {4, 2}};
  cfg.variant = cells::CellVariant::residual_dense;
  cfg.lstm_hidden = 4;
  cfg.lstm_layers = 2;

  Rng rng(31);
  std::vector<Tensor> frames;
  for (int t = 0; t < 8; ++t) frames.push_back(random_frame({1, 16, 16}, rng));

  SUBCASE("output at t ignores frames after t") {
    cells::HorizonNet net(cfg, 5);
    auto run = [&](const std::vector<Tensor>& fr, std::size_t upto) {
      Tape tape;
      nn::BoundParams bound(tape, net.params());
      auto out = net.forward(tape, bound, fr);
      std::vector<std::pair<double, double>> vals;
      for (std::size_t t = 0; t <= upto; ++t)
        vals.emplace_back(tape.value(out[t].first).item(),
                          tape.value(out[t].second).item());
      return vals;
    };
    auto base = run(frames, 4);
    auto perturbed = frames;
    for (std::size_t t = 5; t < frames.size(); ++t)
      perturbed[t] = random_frame({1, 16, 16}, rng);
    auto after = run(perturbed, 4);
    for (std::size_t t = 0; t < base.size(); ++t) {
      CHECK(base[t].first == after[t].first);
      CHECK(base[t].second == after[t].second);
    }
  }

  SUBCASE("disabled variant is frame-permutation equivariant") {
    cfg.variant = cells::CellVariant::disabled;
    cells::HorizonNet net(cfg, 6);
    Tape t1;
    nn::BoundParams b1(t1, net.params());
    auto out = net.forward(t1, b1, frames);

    auto reversed = frames;
    std::reverse(reversed.begin(), reversed.end());
    Tape t2;
    nn::BoundParams b2(t2, net.params());
    auto rout = net.forward(t2, b2, reversed);
    std::size_t n = frames.size();
    for (std::size_t t = 0; t < n; ++t) {
      CHECK(t1.value(out[t].first).item() ==
            t2.value(rout[n - 1 - t].first).item());
      CHECK(t1.value(out[t].second).item() ==
            t2.value(rout[n - 1 - t].second).item());
    }
  }

  SUBCASE("disabled equals temporal on a single frame") {
    cells::HorizonNet temporal(cfg, 7);
    cfg.variant = cells::CellVariant::disabled;
    cells::HorizonNet reset(cfg, 7);  // same seed, same parameter shapes
    std::vector<Tensor> one{frames[0]};
    Tape ta, tb;
    nn::BoundParams ba(ta, temporal.params());
    nn::BoundParams bb(tb, reset.params());
    auto oa = temporal.forward(ta, ba, one);
    auto ob = reset.forward(tb, bb, one);
    CHECK(ta.value(oa[0].first).item() == tb.value(ob[0].first).item());
    CHECK(ta.value(oa[0].second).item() == tb.value(ob[0].second).item());
  }

  SUBCASE("naive residual needs matching channels") {
    cfg.variant = cells::CellVariant::naive_residual;
    cfg.lstm_hidden = 3;  // backbone ends with 4 channels
    CHECK_THROWS_AS(cells::HorizonNet(cfg, 1), BadConfig);
  }
}
