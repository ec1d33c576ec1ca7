#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lxh/light_class.hpp"
#include "lxh/scenario.hpp"
#include "lxh/sensor_twin.hpp"

namespace lxh {

/// Normalization channel of the difference features; none keeps raw counts.
enum class Norm { none, b, g, r, bb, ir };

inline constexpr std::array<Norm, 6> kAllNorms = {Norm::none, Norm::b, Norm::g, Norm::r, Norm::bb, Norm::ir};

std::string_view to_string(Norm norm);
Norm parse_norm(std::string_view name);
std::optional<Channel> norm_channel(Norm norm);

/// (x - n) / (x + n), with 0/0 taken as 0.
double normalized_difference(double x, double norm);

struct FeatureConfig {
  char id = 'A';
  std::vector<Channel> channels;
  Norm norm = Norm::none;

  std::size_t dimension() const { return channels.size(); }
  std::string name() const { return std::string(1, id); }
};

/// Channel sets of the base configurations A..K.
std::span<const std::vector<Channel>> base_config_channels();

/// Config `id` (A..S) under a normalization. Throws config_error when the
/// letter is unknown or the config does not exist for that normalization.
FeatureConfig make_config(char id, Norm norm);
/// Same, returning nothing for configurations the normalization rules out.
std::optional<FeatureConfig> try_make_config(char id, Norm norm);
/// Every valid configuration for a normalization, in letter order.
std::vector<FeatureConfig> configs_for(Norm norm);
/// All letters, valid or not, in order (A..K, then L..S).
std::string all_config_ids();

std::vector<double> extract(const PseudoSpectrum& ps, const FeatureConfig& config);

struct LabeledDataset {
  Taxonomy taxonomy = Taxonomy::base;
  std::vector<PseudoSpectrum> rows;
  std::vector<LightClass> labels;

  std::size_t size() const { return rows.size(); }
  void add(const PseudoSpectrum& ps, LightClass label);
  /// Classes present, in canonical order.
  std::vector<LightClass> classes() const;
  LabeledDataset subset(std::span<const std::size_t> indices) const;
};

/// Every class of the taxonomy at every plan intensity, `draws` noise draws
/// each, reference spectra scaled to the intensity.
LabeledDataset generate_dataset(const SensorTwin& twin, Taxonomy taxonomy, const DatasetPlan& plan,
                                std::uint64_t seed);

LabeledDataset read_dataset_csv(const std::filesystem::path& path, std::optional<Taxonomy> taxonomy = {});
LabeledDataset parse_dataset_csv(std::string_view text, std::optional<Taxonomy> taxonomy = {});
std::string dataset_csv(const LabeledDataset& ds);

/// Row-major feature matrix.
struct FeatureMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;

  std::span<const double> row(std::size_t i) const { return {values.data() + i * cols, cols}; }
};

FeatureMatrix featurize(const LabeledDataset& ds, const FeatureConfig& config);

/// k disjoint folds of row indices, each sorted ascending.
std::vector<std::vector<std::size_t>> kfold_split(const LabeledDataset& ds, std::size_t k, std::uint64_t seed);

}  // namespace lxh
