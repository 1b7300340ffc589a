#include "horizon/config.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace horizon::config {

using nlohmann::json;

namespace {

json parse(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw BadConfig(std::string("invalid JSON: ") + e.what());
  }
}

template <typename T>
void maybe(const json& doc, const char* key, T& out) {
  if (doc.contains(key)) out = doc.at(key).get<T>();
}

}  // namespace

cells::HorizonNetConfig model_from_json(const std::string& text) {
  json doc = parse(text);
  cells::HorizonNetConfig cfg;
  cfg.backbone = {{4, 2}, {8, 2}, {8, 2}};
  maybe(doc, "input_channels", cfg.input_channels);
  maybe(doc, "lstm_layers", cfg.lstm_layers);
  maybe(doc, "lstm_hidden", cfg.lstm_hidden);
  maybe(doc, "lstm_kernel", cfg.lstm_kernel);
  if (doc.contains("variant"))
    cfg.variant =
        cells::cell_variant_from_string(doc.at("variant").get<std::string>());
  if (doc.contains("backbone")) {
    cfg.backbone.clear();
    for (const auto& stage : doc.at("backbone")) {
      cells::BackboneStage s;
      s.channels = stage.at("channels").get<int>();
      s.stride = stage.value("stride", 2);
      cfg.backbone.push_back(s);
    }
  }
  return cfg;
}

synth::SynthConfig synth_from_json(const std::string& text) {
  json doc = parse(text);
  synth::SynthConfig cfg;
  maybe(doc, "width", cfg.width);
  maybe(doc, "height", cfg.height);
  maybe(doc, "seq_len", cfg.seq_len);
  maybe(doc, "train_sequences", cfg.train_sequences);
  maybe(doc, "val_sequences", cfg.val_sequences);
  maybe(doc, "test_sequences", cfg.test_sequences);
  maybe(doc, "noise", cfg.noise);
  maybe(doc, "theta_max", cfg.theta_max);
  maybe(doc, "omega_max", cfg.omega_max);
  maybe(doc, "seed", cfg.seed);
  return cfg;
}

train::TrainConfig train_from_json(const std::string& text) {
  json doc = parse(text);
  train::TrainConfig cfg;
  maybe(doc, "epochs", cfg.epochs);
  maybe(doc, "momentum", cfg.momentum);
  maybe(doc, "weight_decay", cfg.weight_decay);
  maybe(doc, "lr_max", cfg.lr_max);
  maybe(doc, "lr_min", cfg.lr_min);
  maybe(doc, "seq_len", cfg.seq_len);
  maybe(doc, "batch", cfg.batch);
  maybe(doc, "seed", cfg.seed);
  if (doc.contains("loss_mode"))
    cfg.loss_mode =
        train::loss_mode_from_string(doc.at("loss_mode").get<std::string>());
  return cfg;
}

std::string to_json(const cells::HorizonNetConfig& config) {
  json doc;
  doc["input_channels"] = config.input_channels;
  json stages = json::array();
  for (const auto& s : config.backbone)
    stages.push_back({{"channels", s.channels}, {"stride", s.stride}});
  doc["backbone"] = std::move(stages);
  doc["variant"] = cells::to_string(config.variant);
  doc["lstm_layers"] = config.lstm_layers;
  doc["lstm_hidden"] = config.lstm_hidden;
  doc["lstm_kernel"] = config.lstm_kernel;
  return doc.dump(2);
}

std::string to_json(const synth::SynthConfig& config) {
  json doc;
  doc["width"] = config.width;
  doc["height"] = config.height;
  doc["seq_len"] = config.seq_len;
  doc["train_sequences"] = config.train_sequences;
  doc["val_sequences"] = config.val_sequences;
  doc["test_sequences"] = config.test_sequences;
  doc["noise"] = config.noise;
  doc["theta_max"] = config.theta_max;
  doc["omega_max"] = config.omega_max;
  doc["seed"] = config.seed;
  return doc.dump(2);
}

std::string to_json(const train::TrainConfig& config) {
  json doc;
  doc["epochs"] = config.epochs;
  doc["momentum"] = config.momentum;
  doc["weight_decay"] = config.weight_decay;
  doc["lr_max"] = config.lr_max;
  doc["lr_min"] = config.lr_min;
  doc["seq_len"] = config.seq_len;
  doc["batch"] = config.batch;
  doc["loss_mode"] = train::to_string(config.loss_mode);
  doc["seed"] = config.seed;
  return doc.dump(2);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace horizon::config
