#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "lxh/classifiers.hpp"

namespace lxh {

inline constexpr int kModelFormatVersion = 1;

/// Versioned JSON holding method, hyperparameters, feature config and the
/// learned state. Doubles are written at full precision so a round trip
/// reproduces every prediction.
std::string model_to_json(const TrainedClassifier& clf);
TrainedClassifier model_from_json(std::string_view text);

void save_model(const std::filesystem::path& path, const TrainedClassifier& clf);
TrainedClassifier load_model(const std::filesystem::path& path);

}  // namespace lxh
