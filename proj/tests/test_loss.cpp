#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "horizon/loss.hpp"
#include "horizon/metrics.hpp"
#include "horizon/rng.hpp"

using namespace horizon;
using geom::HorizonParams;
using geom::ImageDims;
using loss::ScheduleState;
using nn::Tape;
using nn::Tensor;

TEST_CASE("huber branches and kink continuity") {
  CHECK(loss::huber(2.0, 2.0) == 0.0);
  CHECK(loss::huber(3.0, 2.0) == doctest::Approx(0.5));   // |d| = 1 quadratic
  CHECK(loss::huber(1.0, 2.0) == doctest::Approx(0.5));   // |d| = 1 linear side
  CHECK(loss::huber(4.0, 2.0) == doctest::Approx(1.5));   // |d| = 2
  CHECK(loss::huber(2.3, 2.0) == doctest::Approx(0.5 * 0.09));
}

TEST_CASE("loss_omega_theta sums per-output huber terms") {
  CHECK(loss::loss_omega_theta({3, 0.1}, {3, 0.1}) == 0.0);
  CHECK(loss::loss_omega_theta({4, 0.1}, {3, 0.1}) == doctest::Approx(0.5));
  CHECK(loss::loss_omega_theta({6, 0.6}, {3, 0.1}) ==
        doctest::Approx(2.5 + 0.125));
}

TEST_CASE("lambda schedule endpoints and midpoint") {
  CHECK(loss::lambda_schedule({0, 160}) == 1.0);
  CHECK(loss::lambda_schedule({160, 160}) == 0.0);
  CHECK(std::fabs(loss::lambda_schedule({80, 160}) - 0.5) <= 1e-15);
  // monotone non-increasing
  double prev = 1.1;
  for (int t = 0; t <= 40; ++t) {
    double l = loss::lambda_schedule({t, 40});
    CHECK(l <= prev);
    prev = l;
  }
  CHECK_THROWS_AS(loss::lambda_schedule({5, 4}), BadConfig);
  CHECK_THROWS_AS(loss::lambda_schedule({-1, 4}), BadConfig);
}

TEST_CASE("loss_horizon shares the forward path with the metric") {
  ImageDims dims{200, 100};
  Rng rng(3);
  for (int i = 0; i < 50; ++i) {
    HorizonParams pred{rng.uniform(-30, 30), rng.uniform(-0.4, 0.4)};
    HorizonParams gt{rng.uniform(-30, 30), rng.uniform(-0.4, 0.4)};
    CHECK(loss::loss_horizon(pred, gt, dims) ==
          metrics::max_horizon_error(pred, gt, dims));  // bit identical

    Tape tape;
    auto om = tape.leaf(Tensor::scalar(pred.omega));
    auto th = tape.leaf(Tensor::scalar(pred.theta));
    auto node = loss::loss_horizon_node(tape, om, th, gt, dims);
    CHECK(tape.value(node).item() ==
          metrics::max_horizon_error(pred, gt, dims));
  }
}

TEST_CASE("loss_horizon gradients") {
  ImageDims dims{200, 100};

  SUBCASE("zero at the minimum") {
    Tape tape;
    auto om = tape.leaf(Tensor::scalar(5.0));
    auto th = tape.leaf(Tensor::scalar(0.1));
    auto node = loss::loss_horizon_node(tape, om, th, {5.0, 0.1}, dims);
    tape.backward(node);
    CHECK(tape.grad(om)[0] == 0.0);
    CHECK(tape.grad(th)[0] == 0.0);
  }

  SUBCASE("offset-only error has gradient magnitude 1/H") {
    Tape tape;
    auto om = tape.leaf(Tensor::scalar(7.0));
    auto th = tape.leaf(Tensor::scalar(0.0));
    auto node = loss::loss_horizon_node(tape, om, th, {5.0, 0.0}, dims);
    tape.backward(node);
    // pred above gt by 2: d/domega = -sign(delta)/H with delta = -2
    CHECK(std::fabs(std::fabs(tape.grad(om)[0]) - 1.0 / dims.height) < 1e-15);
  }

  SUBCASE("slope gradient matches finite differences") {
    Rng rng(5);
    for (int i = 0; i < 20; ++i) {
      double om_v = rng.uniform(-10, 10);
      double th_v = rng.uniform(-0.3, 0.3);
      HorizonParams gt{rng.uniform(-10, 10), rng.uniform(-0.3, 0.3)};
      if (std::fabs(om_v - gt.omega) < 0.5) continue;  // stay off ties/kinks

      Tape tape;
      auto om = tape.leaf(Tensor::scalar(om_v));
      auto th = tape.leaf(Tensor::scalar(th_v));
      tape.backward(loss::loss_horizon_node(tape, om, th, gt, dims));

      double h = 1e-5;
      double plus = loss::loss_horizon({om_v, th_v + h}, gt, dims);
      double minus = loss::loss_horizon({om_v, th_v - h}, gt, dims);
      double fd = (plus - minus) / (2 * h);
      double ga = tape.grad(th)[0];
      CHECK(std::fabs(ga - fd) / std::max({std::fabs(ga), std::fabs(fd),
                                           1e-8}) < 1e-4);
    }
  }

  SUBCASE("tie takes the x = 0 branch") {
    // equal endpoint distances: pure offset error
    Tape tape;
    auto om = tape.leaf(Tensor::scalar(2.0));
    auto th = tape.leaf(Tensor::scalar(0.0));
    auto node = loss::loss_horizon_node(tape, om, th, {0.0, 0.0}, dims);
    tape.backward(node);
    // delta = -2 at both borders; gradient through x = 0: dtheta uses x* = 0
    CHECK(tape.grad(th)[0] ==
          doctest::Approx(-(0.0 - dims.width / 2) / dims.height)
              .epsilon(1e-12));
  }
}

TEST_CASE("combined loss equals its endpoints exactly") {
  ImageDims dims{64, 64};
  Rng rng(7);
  for (int i = 0; i < 30; ++i) {
    HorizonParams pred{rng.uniform(-10, 10), rng.uniform(-0.3, 0.3)};
    HorizonParams gt{rng.uniform(-10, 10), rng.uniform(-0.3, 0.3)};
    int max_epochs = 30;

    Tape t0;
    auto om0 = t0.leaf(Tensor::scalar(pred.omega));
    auto th0 = t0.leaf(Tensor::scalar(pred.theta));
    auto start = loss::combined_loss_node(t0, {0, max_epochs}, om0, th0, gt,
                                          dims);
    CHECK(t0.value(start).item() == loss::loss_omega_theta(pred, gt));

    Tape t1;
    auto om1 = t1.leaf(Tensor::scalar(pred.omega));
    auto th1 = t1.leaf(Tensor::scalar(pred.theta));
    auto end = loss::combined_loss_node(t1, {max_epochs, max_epochs}, om1, th1,
                                        gt, dims);
    CHECK(t1.value(end).item() == loss::loss_horizon(pred, gt, dims));

    // halfway: arithmetic mean of the two terms
    double mid = loss::combined_loss({15, 30}, pred, gt, dims);
    CHECK(mid == doctest::Approx(0.5 * loss::loss_omega_theta(pred, gt) +
                                 0.5 * loss::loss_horizon(pred, gt, dims))
                     .epsilon(1e-14));
  }
}

TEST_CASE("combined loss is nonnegative and zero only at the truth") {
  ImageDims dims{64, 64};
  HorizonParams gt{3.0, 0.1};
  CHECK(loss::combined_loss({3, 10}, gt, gt, dims) == 0.0);
  Rng rng(9);
  for (int i = 0; i < 50; ++i) {
    HorizonParams pred{gt.omega + rng.uniform(-5, 5),
                       gt.theta + rng.uniform(-0.2, 0.2)};
    double v = loss::combined_loss({3, 10}, pred, gt, dims);
    CHECK(v >= 0.0);
    if (std::fabs(pred.omega - gt.omega) > 1e-9 ||
        std::fabs(pred.theta - gt.theta) > 1e-9)
      CHECK(v > 0.0);
  }
}
