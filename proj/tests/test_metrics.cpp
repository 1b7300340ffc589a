#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "horizon/metrics.hpp"
#include "horizon/rng.hpp"
#include "oracles.hpp"

using namespace horizon;
using geom::HorizonParams;
using geom::ImageDims;
using metrics::ErrorTrajectory;

TEST_CASE("max_horizon_error basics") {
  ImageDims dims{200, 100};
  CHECK(metrics::max_horizon_error({3, 0.2}, {3, 0.2}, dims) == 0.0);
  // pure offset of H/10
  CHECK(metrics::max_horizon_error({10, 0.05}, {0, 0.05}, dims) ==
        doctest::Approx(0.1).epsilon(1e-12));
  // opposite slopes: the worst gap sits at an image border
  double got = metrics::max_horizon_error({0, 0.1}, {0, -0.1}, dims);
  CHECK(got == doctest::Approx(2.0 * std::tan(0.1)).epsilon(1e-12));
}

TEST_CASE("max_horizon_error equals a dense-sampling oracle and is symmetric") {
  ImageDims dims{640, 480};
  Rng rng(3);
  for (int i = 0; i < 200; ++i) {
    HorizonParams a{rng.uniform(-50, 50), rng.uniform(-0.4, 0.4)};
    HorizonParams b{rng.uniform(-50, 50), rng.uniform(-0.4, 0.4)};
    double fast = metrics::max_horizon_error(a, b, dims);
    CHECK(fast == metrics::max_horizon_error(b, a, dims));
    double dense = 0.0;
    for (int k = 0; k <= 10000; ++k) {
      double x = dims.width * k / 10000.0;
      dense = std::max(dense, std::fabs(geom::y_at_x(a, x, dims) -
                                        geom::y_at_x(b, x, dims)));
    }
    dense /= dims.height;
    CHECK(std::fabs(fast - dense) < 1e-9);
    CHECK(fast >= dense - 1e-15);  // affine in x, max at an endpoint
  }
}

TEST_CASE("auc_cumulative exact formula") {
  CHECK(metrics::auc_cumulative({0, 0, 0}, 0.25) == 1.0);
  CHECK(metrics::auc_cumulative({0.25, 0.3, 1.0}, 0.25) == 0.0);
  CHECK(metrics::auc_cumulative({0.125}, 0.25) == doctest::Approx(0.5));
  CHECK(metrics::auc_cumulative({0.0, 0.25}, 0.25) == doctest::Approx(0.5));
  CHECK_THROWS_AS(metrics::auc_cumulative({}, 0.25), EmptyInput);
}

TEST_CASE("auc_cumulative matches the step-CDF integration oracle") {
  Rng rng(17);
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<double> errors;
    int n = 1 + static_cast<int>(rng.uniform_index(40));
    for (int i = 0; i < n; ++i) errors.push_back(rng.uniform(0.0, 0.4));
    double exact = metrics::auc_cumulative(errors, 0.25);
    double numeric = oracles::auc_riemann(errors, 0.25);
    CHECK(std::fabs(exact - numeric) < 1e-4);
  }
}

TEST_CASE("auc_cumulative invariances") {
  Rng rng(23);
  std::vector<double> errors;
  for (int i = 0; i < 50; ++i) errors.push_back(rng.uniform(0.0, 0.5));
  double base = metrics::auc_cumulative(errors, 0.25);

  auto shuffled = errors;
  rng.shuffle(shuffled);
  CHECK(metrics::auc_cumulative(shuffled, 0.25) == doctest::Approx(base));

  auto worse = errors;
  for (auto& e : worse) e += 0.01;
  CHECK(metrics::auc_cumulative(worse, 0.25) <= base);
}

TEST_CASE("mse") {
  CHECK(metrics::mse({{"a", {0, 0}}}) == 0.0);
  CHECK(metrics::mse({{"a", {0.1}}}) == doctest::Approx(0.01));
  CHECK(metrics::mse({{"a", {0.1, 0.3}}}) == doctest::Approx(0.05));
  CHECK_THROWS_AS(metrics::mse({}), EmptyInput);
}

TEST_CASE("pose_angular_error") {
  geom::PoseVector a{{1, 0, 0}}, b{{0, 1, 0}};
  CHECK(metrics::pose_angular_error(a, a) == doctest::Approx(0.0));
  CHECK(metrics::pose_angular_error(a, geom::PoseVector{{-1, 0, 0}}) ==
        doctest::Approx(0.0));
  CHECK(metrics::pose_angular_error(a, b) ==
        doctest::Approx(3.14159265358979323846 / 2));
  CHECK_THROWS_AS(metrics::pose_angular_error(a, geom::PoseVector{{0, 0, 0}}),
                  ZeroVector);

  Rng rng(5);
  for (int i = 0; i < 50; ++i) {
    geom::PoseVector p{{rng.normal(), rng.normal(), rng.normal()}};
    geom::PoseVector q{{rng.normal(), rng.normal(), rng.normal()}};
    double s = rng.uniform(0.1, 5.0) * (rng.uniform() < 0.5 ? -1 : 1);
    double u = rng.uniform(0.1, 5.0) * (rng.uniform() < 0.5 ? -1 : 1);
    double e1 = metrics::pose_angular_error(p, q);
    double e2 = metrics::pose_angular_error(geom::PoseVector{p.p * s},
                                            geom::PoseVector{q.p * u});
    CHECK(e1 == doctest::Approx(e2).epsilon(1e-9));
  }
}

TEST_CASE("pose_auc at the 5 degree threshold") {
  double deg = 3.14159265358979323846 / 180.0;
  CHECK(metrics::pose_auc({0, 0}) == 1.0);
  CHECK(metrics::pose_auc({5 * deg, 6 * deg}) == 0.0);
  CHECK(metrics::pose_auc({2.5 * deg}) == doctest::Approx(0.5));
}

TEST_CASE("average_total_variation stencils") {
  // constants vanish exactly
  CHECK(metrics::average_total_variation({{"a", {0.7, 0.7, 0.7, 0.7}}}) == 0.0);

  // linear ramps: every stencil returns the slope
  double s = 0.37;
  std::vector<double> ramp;
  for (int t = 0; t < 5; ++t) ramp.push_back(s * t);
  CHECK(metrics::average_total_variation({{"a", ramp}}) ==
        doctest::Approx(s).epsilon(1e-12));

  // direct stencil arithmetic on a spike
  std::vector<double> spike{0, 1, 0};
  CHECK(metrics::average_total_variation({{"a", spike}}) ==
        doctest::Approx(oracles::a_tv_direct({spike})).epsilon(1e-12));

  CHECK_THROWS_AS(metrics::average_total_variation({{"a", {1.0, 2.0}}}),
                  TooShort);
}

TEST_CASE("average_total_variation matches the direct oracle on random data") {
  Rng rng(29);
  for (int rep = 0; rep < 30; ++rep) {
    std::vector<std::vector<double>> trajs;
    std::vector<ErrorTrajectory> lib;
    int n_traj = 1 + static_cast<int>(rng.uniform_index(4));
    for (int k = 0; k < n_traj; ++k) {
      std::vector<double> f;
      int len = 3 + static_cast<int>(rng.uniform_index(20));
      for (int t = 0; t < len; ++t) f.push_back(rng.uniform(0.0, 1.0));
      trajs.push_back(f);
      lib.push_back({"t" + std::to_string(k), f});
    }
    CHECK(metrics::average_total_variation(lib) ==
          doctest::Approx(oracles::a_tv_direct(trajs)).epsilon(1e-12));
  }
}

TEST_CASE("A_TV invariant under constant shifts, bit level on a dyadic grid") {
  Rng rng(31);
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<double> f;
    for (int t = 0; t < 12; ++t)
      f.push_back(static_cast<double>(rng.uniform_index(1024)) / 1024.0);
    double c = static_cast<double>(rng.uniform_index(512)) / 1024.0;
    std::vector<double> g = f;
    for (auto& v : g) v += c;
    double a1 = metrics::average_total_variation({{"a", f}});
    double a2 = metrics::average_total_variation({{"a", g}});
    CHECK(a1 == a2);  // exact
  }
}

TEST_CASE("evaluate is invariant to sequence order and catches mismatches") {
  ImageDims dims{64, 64};
  geom::CameraModel cam;
  Rng rng(37);
  std::vector<metrics::PredictionTrajectory> gt, pred;
  for (int s = 0; s < 4; ++s) {
    metrics::PredictionTrajectory g, p;
    g.sequence_id = p.sequence_id = "seq" + std::to_string(s);
    for (int t = 0; t < 8; ++t) {
      HorizonParams truth{rng.uniform(-5, 5), rng.uniform(-0.2, 0.2)};
      g.frames.emplace_back(t, truth);
      p.frames.emplace_back(
          t, HorizonParams{truth.omega + rng.uniform(-1, 1),
                           truth.theta + rng.uniform(-0.05, 0.05)});
    }
    gt.push_back(g);
    pred.push_back(p);
  }
  auto r1 = metrics::evaluate(pred, gt, dims, cam);
  std::reverse(pred.begin(), pred.end());
  std::reverse(gt.begin(), gt.end());
  auto r2 = metrics::evaluate(pred, gt, dims, cam);
  CHECK(r1.horizon_auc == r2.horizon_auc);
  CHECK(r1.mse == r2.mse);
  CHECK(r1.a_tv == r2.a_tv);
  CHECK(r1.pose_auc == r2.pose_auc);

  auto broken = pred;
  broken[0].frames.pop_back();
  CHECK_THROWS_AS(metrics::evaluate(broken, gt, dims, cam), FrameMismatch);
  auto renamed = pred;
  renamed[0].sequence_id = "unknown";
  CHECK_THROWS_AS(metrics::evaluate(renamed, gt, dims, cam), FrameMismatch);
}

TEST_CASE("cumulative_histogram endpoints") {
  auto hist = metrics::cumulative_histogram({0.1, 0.1, 0.2, 0.3});
  CHECK(hist.front().first == 0.0);
  CHECK(hist.front().second == 0.0);
  CHECK(hist.back().first == doctest::Approx(0.25));
  CHECK(hist.back().second == doctest::Approx(0.5));  // two of four <= 0.25
}
