#ifndef HORIZON_SYNTH_HPP
#define HORIZON_SYNTH_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "horizon/geometry.hpp"
#include "horizon/tensor.hpp"

namespace horizon::synth {

// Two-region image sequences with exact horizon labels, standing in for real
// footage at desk scale. Trajectories are smooth bounded sums of sinusoids.
struct SynthConfig {
  int width = 64;
  int height = 64;
  int seq_len = 32;
  int train_sequences = 20;
  int val_sequences = 5;
  int test_sequences = 5;
  double noise = 0.1;       // additive Gaussian sigma per pixel
  double theta_max = 0.3;   // |theta| bound, radians; must stay below 0.4
  double omega_max = 10.0;  // |omega| bound, pixels
  std::uint64_t seed = 1;
};

struct SynthSequence {
  std::string sequence_id;
  std::vector<nn::Tensor> frames;           // [1,H,W] each
  std::vector<geom::HorizonParams> labels;  // the exact generating params
};

struct SynthDataset {
  SynthConfig config;
  std::vector<SynthSequence> train, val, test;
};

// Deterministic given (config, seed). Pixels above the horizon take the
// sequence's sky intensity, pixels below the ground intensity; the row of the
// split at column x follows y(omega, theta, x) with the image centre at y = 0.
SynthSequence synth_sequence(const SynthConfig& config, std::uint64_t seed,
                             const std::string& sequence_id);

SynthDataset make_dataset(const SynthConfig& config);

geom::ImageDims dims_of(const SynthConfig& config);

// Nominal intrinsics for pose metrics on synthetic data: f = W, principal
// point at the centre column and at y = 0 (the frame the labels live in).
geom::CameraModel camera_of(const SynthConfig& config);

}  // namespace horizon::synth

#endif
