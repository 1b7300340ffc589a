#include "horizon/train.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "horizon/io.hpp"
#include "horizon/loss.hpp"
#include "horizon/rng.hpp"

namespace horizon::train {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

LossMode loss_mode_from_string(const std::string& name) {
  if (name == "adaptive") return LossMode::adaptive;
  if (name == "huber_only") return LossMode::huber_only;
  throw BadConfig("unknown loss mode: " + name);
}

std::string to_string(LossMode mode) {
  return mode == LossMode::adaptive ? "adaptive" : "huber_only";
}

double cosine_lr(int t, int max_epochs, double lr_max, double lr_min) {
  if (max_epochs <= 0) throw BadConfig("cosine_lr: max_epochs must be > 0");
  return lr_min + 0.5 * (lr_max - lr_min) *
                      (1.0 + std::cos(kPi * static_cast<double>(t) /
                                      static_cast<double>(max_epochs)));
}

void SgdOptimizer::step(nn::ParamStore& params, double lr) {
  for (auto& p : params.all()) {
    auto it = velocity_.find(p.name);
    if (it == velocity_.end())
      it = velocity_.emplace(p.name, nn::Tensor(p.value.shape())).first;
    nn::Tensor& v = it->second;
    for (std::int64_t i = 0; i < p.value.size(); ++i) {
      double g = p.grad[i] + weight_decay_ * p.value[i];
      v[i] = momentum_ * v[i] + g;
      p.value[i] -= lr * v[i];
    }
  }
}

namespace {

struct Window {
  const synth::SynthSequence* seq;
  int first;
  int count;
};

// Non-overlapping windows of length S, start offsets re-drawn every epoch.
std::vector<Window> draw_windows(const std::vector<synth::SynthSequence>& seqs,
                                 int seq_len, Rng& rng) {
  std::vector<Window> windows;
  for (const auto& seq : seqs) {
    int len = static_cast<int>(seq.frames.size());
    if (len <= seq_len) {
      windows.push_back({&seq, 0, len});
      continue;
    }
    int count = len / seq_len;
    int slack = len - count * seq_len;
    int offset = slack > 0 ? static_cast<int>(rng.uniform_index(
                                 static_cast<std::uint64_t>(slack) + 1))
                           : 0;
    for (int i = 0; i < count; ++i)
      windows.push_back({&seq, offset + i * seq_len, seq_len});
  }
  rng.shuffle(windows);
  return windows;
}

// Mean per-frame loss of one window, built on the given tape.
nn::NodeId window_loss(nn::Tape& tape, const cells::HorizonNet& net,
                       const nn::BoundParams& bound, const Window& win,
                       const loss::ScheduleState& schedule, LossMode mode,
                       const geom::ImageDims& dims) {
  std::vector<nn::Tensor> frames(
      win.seq->frames.begin() + win.first,
      win.seq->frames.begin() + win.first + win.count);
  auto outputs = net.forward(tape, bound, frames);
  std::vector<nn::NodeId> frame_losses;
  frame_losses.reserve(outputs.size());
  for (std::size_t t = 0; t < outputs.size(); ++t) {
    const geom::HorizonParams& gt =
        win.seq->labels[static_cast<std::size_t>(win.first) + t];
    auto [omega, theta] = outputs[t];
    nn::NodeId l = mode == LossMode::adaptive
                       ? loss::combined_loss_node(tape, schedule, omega, theta,
                                                  gt, dims)
                       : loss::loss_omega_theta_node(tape, omega, theta, gt);
    frame_losses.push_back(l);
  }
  return nn::scale(tape, nn::sum_scalars(tape, frame_losses),
                   1.0 / static_cast<double>(frame_losses.size()));
}

}  // namespace

std::vector<metrics::PredictionTrajectory> predict(
    const cells::HorizonNet& net,
    const std::vector<synth::SynthSequence>& sequences) {
  std::vector<metrics::PredictionTrajectory> out;
  out.reserve(sequences.size());
  for (const auto& seq : sequences) {
    nn::Tape tape;
    nn::BoundParams bound(tape, net.params());
    auto outputs = net.forward(tape, bound, seq.frames);
    metrics::PredictionTrajectory traj;
    traj.sequence_id = seq.sequence_id;
    for (std::size_t t = 0; t < outputs.size(); ++t)
      traj.frames.emplace_back(
          static_cast<int>(t),
          geom::HorizonParams{tape.value(outputs[t].first).item(),
                              tape.value(outputs[t].second).item()});
    out.push_back(std::move(traj));
  }
  return out;
}

namespace {

std::vector<metrics::PredictionTrajectory> truth_of(
    const std::vector<synth::SynthSequence>& sequences) {
  std::vector<metrics::PredictionTrajectory> out;
  for (const auto& seq : sequences) {
    metrics::PredictionTrajectory traj;
    traj.sequence_id = seq.sequence_id;
    for (std::size_t t = 0; t < seq.labels.size(); ++t)
      traj.frames.emplace_back(static_cast<int>(t), seq.labels[t]);
    out.push_back(std::move(traj));
  }
  return out;
}

}  // namespace

metrics::MetricsReport evaluate_model(
    const cells::HorizonNet& net,
    const std::vector<synth::SynthSequence>& sequences,
    const synth::SynthConfig& config) {
  return metrics::evaluate(predict(net, sequences), truth_of(sequences),
                           synth::dims_of(config), synth::camera_of(config));
}

std::vector<EpochRecord> train_model(cells::HorizonNet& net,
                                     const TrainConfig& config,
                                     const synth::SynthDataset& data) {
  if (config.epochs < 0) throw BadConfig("epochs must be >= 0");
  if (data.train.empty()) throw EmptyInput("train_model: no training data");

  geom::ImageDims dims = synth::dims_of(data.config);
  Rng rng(config.seed);
  SgdOptimizer opt(config.momentum, config.weight_decay);
  std::vector<EpochRecord> history;

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    double lr = cosine_lr(epoch, config.epochs, config.lr_max, config.lr_min);
    loss::ScheduleState schedule{epoch, config.epochs};
    double lambda = loss::lambda_schedule(schedule);

    double loss_sum = 0.0;
    std::size_t loss_count = 0;
    auto windows = draw_windows(data.train, config.seq_len, rng);
    try {
      for (std::size_t w0 = 0; w0 < windows.size(); w0 += config.batch) {
        std::size_t w1 =
            std::min(w0 + static_cast<std::size_t>(config.batch),
                     windows.size());
        net.params().zero_grads();
        for (std::size_t w = w0; w < w1; ++w) {
          nn::Tape tape;
          nn::BoundParams bound(tape, net.params());
          nn::NodeId l = window_loss(tape, net, bound, windows[w], schedule,
                                     config.loss_mode, dims);
          tape.backward(l);
          bound.accumulate_grads(net.params(),
                                 1.0 / static_cast<double>(w1 - w0));
          loss_sum += tape.value(l).item();
          ++loss_count;
        }
        opt.step(net.params(), lr);
      }
    } catch (const NonFinite& e) {
      throw DivergedLoss("training diverged at epoch " +
                         std::to_string(epoch) + ": " + e.what());
    }

    EpochRecord rec;
    rec.epoch = epoch;
    rec.lr = lr;
    rec.lambda = lambda;
    rec.train_loss = loss_sum / static_cast<double>(loss_count);

    // validation under the same blended loss, full sequences
    double val_sum = 0.0;
    std::size_t val_frames = 0;
    auto preds = predict(net, data.val);
    for (std::size_t s = 0; s < data.val.size(); ++s) {
      for (std::size_t t = 0; t < preds[s].frames.size(); ++t) {
        const auto& p = preds[s].frames[t].second;
        const auto& gt = data.val[s].labels[t];
        val_sum += config.loss_mode == LossMode::adaptive
                       ? loss::combined_loss(schedule, p, gt, dims)
                       : loss::loss_omega_theta(p, gt);
        ++val_frames;
      }
    }
    rec.val_loss = val_frames ? val_sum / static_cast<double>(val_frames) : 0.0;
    rec.val_auc =
        data.val.empty()
            ? 0.0
            : metrics::evaluate(preds, truth_of(data.val), dims,
                                synth::camera_of(data.config))
                  .horizon_auc;
    history.push_back(rec);
  }
  return history;
}

void write_history_csv(const std::vector<EpochRecord>& history,
                       const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << "epoch,lr,lambda,train_loss,val_loss,val_auc\n";
  for (const auto& r : history)
    out << r.epoch << ',' << io::format_double(r.lr) << ','
        << io::format_double(r.lambda) << ','
        << io::format_double(r.train_loss) << ','
        << io::format_double(r.val_loss) << ','
        << io::format_double(r.val_auc) << '\n';
}

AblationResult run_ablation(const cells::HorizonNetConfig& base_model,
                            const TrainConfig& base_train,
                            const synth::SynthDataset& data,
                            const std::vector<AblationEntry>& entries,
                            const std::vector<std::uint64_t>& seeds) {
  AblationResult result;
  for (const auto& entry : entries) {
    std::vector<metrics::MetricsReport> reports;
    for (std::uint64_t seed : seeds) {
      cells::HorizonNetConfig model_cfg = base_model;
      model_cfg.variant = entry.variant;
      TrainConfig train_cfg = base_train;
      train_cfg.loss_mode = entry.loss_mode;
      train_cfg.seed = seed;
      cells::HorizonNet net(model_cfg, seed);
      auto history = train_model(net, train_cfg, data);
      auto report = evaluate_model(net, data.test, data.config);
      AblationRow row{entry.name, seed, report, 0.0, 0.0};
      if (!history.empty()) {
        row.first_train_loss = history.front().train_loss;
        row.last_train_loss = history.back().train_loss;
      }
      result.rows.push_back(std::move(row));
      reports.push_back(std::move(report));
    }
    auto stats = [&](auto getter, double& mean, double& stddev) {
      double sum = 0.0;
      for (const auto& r : reports) sum += getter(r);
      mean = sum / static_cast<double>(reports.size());
      double sq = 0.0;
      for (const auto& r : reports) {
        double d = getter(r) - mean;
        sq += d * d;
      }
      stddev = reports.size() > 1
                   ? std::sqrt(sq / static_cast<double>(reports.size() - 1))
                   : 0.0;
    };
    AblationAggregate agg;
    agg.name = entry.name;
    agg.runs = static_cast<int>(reports.size());
    stats([](const auto& r) { return r.horizon_auc; }, agg.auc_mean,
          agg.auc_std);
    stats([](const auto& r) { return r.mse; }, agg.mse_mean, agg.mse_std);
    stats([](const auto& r) { return r.a_tv; }, agg.atv_mean, agg.atv_std);
    stats([](const auto& r) { return r.pose_auc; }, agg.pose_auc_mean,
          agg.pose_auc_std);
    result.aggregates.push_back(agg);
  }
  return result;
}

void write_ablation_csv(const AblationResult& result,
                        const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << "config,seed,horizon_auc,mse,a_tv,pose_auc\n";
  for (const auto& row : result.rows)
    out << row.name << ',' << row.seed << ','
        << io::format_double(row.report.horizon_auc) << ','
        << io::format_double(row.report.mse) << ','
        << io::format_double(row.report.a_tv) << ','
        << io::format_double(row.report.pose_auc) << '\n';
  out << "\nconfig,runs,auc_mean,auc_std,mse_mean,mse_std,atv_mean,atv_std,"
         "pose_auc_mean,pose_auc_std\n";
  for (const auto& agg : result.aggregates)
    out << agg.name << ',' << agg.runs << ','
        << io::format_double(agg.auc_mean) << ','
        << io::format_double(agg.auc_std) << ','
        << io::format_double(agg.mse_mean) << ','
        << io::format_double(agg.mse_std) << ','
        << io::format_double(agg.atv_mean) << ','
        << io::format_double(agg.atv_std) << ','
        << io::format_double(agg.pose_auc_mean) << ','
        << io::format_double(agg.pose_auc_std) << '\n';
}

}  // namespace horizon::train
