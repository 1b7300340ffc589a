#include "horizon/synth.hpp"

#include <cmath>

#include "horizon/rng.hpp"

namespace horizon::synth {

namespace {

constexpr double kPi = 3.14159265358979323846;

void validate(const SynthConfig& c) {
  if (c.width <= 0 || c.height <= 0 || c.seq_len <= 0)
    throw BadConfig("synth: width, height, seq_len must be positive");
  if (c.noise < 0.0) throw BadConfig("synth: noise must be >= 0");
  if (!(c.theta_max < 0.4)) throw BadConfig("synth: theta_max must be < 0.4");
  if (!(c.omega_max <= c.height / 2.0))
    throw BadConfig("synth: omega_max must keep the line inside the image");
}

// Smooth trajectory in [-bound, bound]: three sinusoids with amplitudes
// normalized to sum to one.
struct Wave {
  double a[3], f[3], phi[3];
  double bound;

  static Wave draw(Rng& rng, double bound) {
    Wave w;
    w.bound = bound;
    double total = 0.0;
    for (int k = 0; k < 3; ++k) {
      w.a[k] = rng.uniform(0.2, 1.0);
      total += w.a[k];
      w.f[k] = rng.uniform(0.5, 2.5);
      w.phi[k] = rng.uniform(0.0, 2.0 * kPi);
    }
    for (int k = 0; k < 3; ++k) w.a[k] /= total;
    return w;
  }

  double at(double u) const {  // u in [0,1] over the sequence
    double v = 0.0;
    for (int k = 0; k < 3; ++k)
      v += a[k] * std::sin(2.0 * kPi * f[k] * u + phi[k]);
    return bound * v;
  }
};

}  // namespace

geom::ImageDims dims_of(const SynthConfig& config) {
  return {static_cast<double>(config.width),
          static_cast<double>(config.height)};
}

geom::CameraModel camera_of(const SynthConfig& config) {
  Mat3 k = Mat3::identity();
  k(0, 0) = config.width;
  k(1, 1) = config.width;
  k(0, 2) = config.width / 2.0;
  k(1, 2) = 0.0;
  return geom::CameraModel{k};
}

SynthSequence synth_sequence(const SynthConfig& config, std::uint64_t seed,
                             const std::string& sequence_id) {
  validate(config);
  Rng rng(seed);
  Wave omega_wave = Wave::draw(rng, config.omega_max);
  Wave theta_wave = Wave::draw(rng, config.theta_max);
  double sky = rng.uniform(0.15, 0.35);
  double ground = rng.uniform(0.65, 0.85);

  SynthSequence seq;
  seq.sequence_id = sequence_id;
  int w = config.width;
  int h = config.height;
  for (int t = 0; t < config.seq_len; ++t) {
    double u = config.seq_len > 1
                   ? static_cast<double>(t) / (config.seq_len - 1)
                   : 0.0;
    geom::HorizonParams label{omega_wave.at(u), theta_wave.at(u)};
    double tan_theta = std::tan(label.theta);

    nn::Tensor frame({1, h, w});
    for (int x = 0; x < w; ++x) {
      // pixel centres; the image centre row sits at y = 0
      double y_line = (x + 0.5 - w / 2.0) * tan_theta - label.omega;
      for (int r = 0; r < h; ++r) {
        double y = r + 0.5 - h / 2.0;
        frame.at(0, r, x) = y > y_line ? ground : sky;
      }
    }
    if (config.noise > 0.0)
      for (std::int64_t i = 0; i < frame.size(); ++i)
        frame[i] += config.noise * rng.normal();

    seq.frames.push_back(std::move(frame));
    seq.labels.push_back(label);
  }
  return seq;
}

SynthDataset make_dataset(const SynthConfig& config) {
  validate(config);
  SynthDataset ds;
  ds.config = config;
  Rng master(config.seed);
  auto fill = [&](std::vector<SynthSequence>& out, int count,
                  const std::string& prefix) {
    for (int i = 0; i < count; ++i) {
      std::string id = prefix + (i < 10 ? "00" : i < 100 ? "0" : "") +
                       std::to_string(i);
      out.push_back(synth_sequence(config, master.next_u64(), id));
    }
  };
  fill(ds.train, config.train_sequences, "train_");
  fill(ds.val, config.val_sequences, "val_");
  fill(ds.test, config.test_sequences, "test_");
  return ds;
}

}  // namespace horizon::synth
