#ifndef HORIZON_CONFIG_HPP
#define HORIZON_CONFIG_HPP

#include <filesystem>
#include <string>

#include "horizon/cells.hpp"
#include "horizon/synth.hpp"
#include "horizon/train.hpp"

namespace horizon::config {

// JSON documents with optional keys; anything missing keeps its default.
cells::HorizonNetConfig model_from_json(const std::string& text);
synth::SynthConfig synth_from_json(const std::string& text);
train::TrainConfig train_from_json(const std::string& text);

std::string to_json(const cells::HorizonNetConfig& config);
std::string to_json(const synth::SynthConfig& config);
std::string to_json(const train::TrainConfig& config);

std::string read_file(const std::filesystem::path& path);

}  // namespace horizon::config

#endif
