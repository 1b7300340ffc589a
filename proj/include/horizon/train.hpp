#ifndef HORIZON_TRAIN_HPP
#define HORIZON_TRAIN_HPP

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "horizon/cells.hpp"
#include "horizon/metrics.hpp"
#include "horizon/synth.hpp"

namespace horizon::train {

enum class LossMode { adaptive, huber_only };

LossMode loss_mode_from_string(const std::string& name);
std::string to_string(LossMode mode);

struct TrainConfig {
  int epochs = 30;
  double momentum = 0.9;
  double weight_decay = 1e-4;
  double lr_max = 1e-1;
  double lr_min = 1e-3;
  int seq_len = 32;  // S; batch geometry keeps S*B fixed across comparisons
  int batch = 4;     // B
  LossMode loss_mode = LossMode::adaptive;
  std::uint64_t seed = 1;
};

struct EpochRecord {
  int epoch = 0;
  double lr = 0.0;
  double lambda = 0.0;
  double train_loss = 0.0;
  double val_loss = 0.0;
  double val_auc = 0.0;
};

// eta(t) = eta_min + (eta_max - eta_min) * (1 + cos(pi t / T)) / 2
double cosine_lr(int t, int max_epochs, double lr_max, double lr_min);

// SGD with momentum; weight decay enters the gradient as wd * w.
class SgdOptimizer {
 public:
  SgdOptimizer(double momentum, double weight_decay)
      : momentum_(momentum), weight_decay_(weight_decay) {}
  void step(nn::ParamStore& params, double lr);

 private:
  double momentum_;
  double weight_decay_;
  std::map<std::string, nn::Tensor> velocity_;
};

// Seeded SGD training on synthetic sequences. Throws DivergedLoss with the
// epoch index if any op produces NaN/Inf.
std::vector<EpochRecord> train_model(cells::HorizonNet& net,
                                     const TrainConfig& config,
                                     const synth::SynthDataset& data);

// Full-sequence forward with persistent state (reset only at sequence start).
std::vector<metrics::PredictionTrajectory> predict(
    const cells::HorizonNet& net,
    const std::vector<synth::SynthSequence>& sequences);

metrics::MetricsReport evaluate_model(
    const cells::HorizonNet& net,
    const std::vector<synth::SynthSequence>& sequences,
    const synth::SynthConfig& config);

void write_history_csv(const std::vector<EpochRecord>& history,
                       const std::filesystem::path& path);

// ---- ablation harness ----

struct AblationEntry {
  std::string name;
  cells::CellVariant variant = cells::CellVariant::residual_dense;
  LossMode loss_mode = LossMode::adaptive;
};

struct AblationRow {
  std::string name;
  std::uint64_t seed = 0;
  metrics::MetricsReport report;
  double first_train_loss = 0.0;
  double last_train_loss = 0.0;
};

struct AblationAggregate {
  std::string name;
  double auc_mean = 0, auc_std = 0;
  double mse_mean = 0, mse_std = 0;
  double atv_mean = 0, atv_std = 0;
  double pose_auc_mean = 0, pose_auc_std = 0;
  int runs = 0;
};

struct AblationResult {
  std::vector<AblationRow> rows;
  std::vector<AblationAggregate> aggregates;
};

// Shared data and matched budgets: every entry trains on the same dataset
// with the same TrainConfig apart from the loss mode, once per seed.
AblationResult run_ablation(const cells::HorizonNetConfig& base_model,
                            const TrainConfig& base_train,
                            const synth::SynthDataset& data,
                            const std::vector<AblationEntry>& entries,
                            const std::vector<std::uint64_t>& seeds);

void write_ablation_csv(const AblationResult& result,
                        const std::filesystem::path& path);

}  // namespace horizon::train

#endif
