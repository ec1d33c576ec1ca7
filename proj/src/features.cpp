#include "lxh/features.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "lxh/csv.hpp"
#include "lxh/error.hpp"
#include "lxh/rng.hpp"

namespace lxh {

std::string_view to_string(Norm norm) {
  switch (norm) {
    case Norm::none: return "none";
    case Norm::b: return "b";
    case Norm::g: return "g";
    case Norm::r: return "r";
    case Norm::bb: return "bb";
    case Norm::ir: return "ir";
  }
  return "none";
}

Norm parse_norm(std::string_view name) {
  for (Norm n : kAllNorms)
    if (to_string(n) == name) return n;
  fail(Errc::config_error, "unknown normalization '" + std::string(name) + "'");
}

std::optional<Channel> norm_channel(Norm norm) {
  switch (norm) {
    case Norm::none: return std::nullopt;
    case Norm::b: return Channel::b;
    case Norm::g: return Channel::g;
    case Norm::r: return Channel::r;
    case Norm::bb: return Channel::bb;
    case Norm::ir: return Channel::ir;
  }
  return std::nullopt;
}

double normalized_difference(double x, double norm) {
  if (!(x >= 0.0) || !(norm >= 0.0)) fail(Errc::invalid_channel_value, "normalized difference needs non-negative inputs");
  const double sum = x + norm;
  if (sum == 0.0) return 0.0;
  return (x - norm) / sum;
}

std::span<const std::vector<Channel>> base_config_channels() {
  using enum Channel;
  static const std::vector<std::vector<Channel>> table = {
      {bb, ir, r, g, b, lux},  // A
      {bb, ir, r, g, b},       // B
      {r, g, b},               // C
      {bb, ir, lux},           // D
      {ir, r, g, b},           // E
      {bb, r, g, b},           // F
      {b, ir},                 // G
      {g, ir},                 // H
      {r, ir},                 // I
      {bb, ir},                // J
      {ir},                    // K
  };
  return table;
}

namespace {

constexpr std::size_t kBaseCount = 11;
constexpr std::size_t kDerivedCount = 8;  // L..S mirror A..H

}  // namespace

std::string all_config_ids() { return "ABCDEFGHIJKLMNOPQRS"; }

std::optional<FeatureConfig> try_make_config(char id, Norm norm) {
  const auto base = base_config_channels();
  if (id >= 'A' && id < static_cast<char>('A' + kBaseCount))
    return FeatureConfig{id, base[static_cast<std::size_t>(id - 'A')], norm};
  if (id < 'L' || id >= static_cast<char>('L' + kDerivedCount)) fail(Errc::config_error, std::string("unknown config '") + id + "'");
  const auto channel = norm_channel(norm);
  if (!channel) return std::nullopt;
  const auto& source = base[static_cast<std::size_t>(id - 'L')];
  // without the norm channel the derived config would reproduce its base
  if (std::find(source.begin(), source.end(), *channel) == source.end()) return std::nullopt;
  std::vector<Channel> kept;
  for (Channel c : source)
    if (c != *channel) kept.push_back(c);
  if (kept.empty()) return std::nullopt;
  return FeatureConfig{id, std::move(kept), norm};
}

FeatureConfig make_config(char id, Norm norm) {
  auto config = try_make_config(id, norm);
  if (!config)
    fail(Errc::config_error, std::string("config ") + id + " does not exist under normalization " +
                                 std::string(to_string(norm)));
  return *config;
}

std::vector<FeatureConfig> configs_for(Norm norm) {
  std::vector<FeatureConfig> out;
  for (char id : all_config_ids())
    if (auto c = try_make_config(id, norm)) out.push_back(std::move(*c));
  return out;
}

std::vector<double> extract(const PseudoSpectrum& ps, const FeatureConfig& config) {
  if (config.channels.empty()) fail(Errc::config_error, "config " + config.name() + " has no channels");
  std::vector<double> out;
  out.reserve(config.channels.size());
  const auto nc = norm_channel(config.norm);
  for (Channel c : config.channels) {
    const double v = ps.get(c);
    if (!std::isfinite(v)) fail(Errc::invalid_channel_value, "non-finite channel value");
    out.push_back(nc && c != Channel::lux ? normalized_difference(v, ps.get(*nc)) : v);
  }
  return out;
}

void LabeledDataset::add(const PseudoSpectrum& ps, LightClass label) {
  if (!belongs_to(label, taxonomy))
    fail(Errc::taxonomy_error, std::string(to_string(label)) + " is not in the " + std::string(to_string(taxonomy)) +
                                   " taxonomy");
  rows.push_back(ps);
  labels.push_back(label);
}

std::vector<LightClass> LabeledDataset::classes() const {
  std::array<bool, kLightClassCount> seen{};
  for (auto l : labels) seen[index_of(l)] = true;
  std::vector<LightClass> out;
  for (std::size_t i = 0; i < kLightClassCount; ++i)
    if (seen[i]) out.push_back(static_cast<LightClass>(i));
  return out;
}

LabeledDataset LabeledDataset::subset(std::span<const std::size_t> indices) const {
  LabeledDataset out;
  out.taxonomy = taxonomy;
  out.rows.reserve(indices.size());
  out.labels.reserve(indices.size());
  for (auto i : indices) {
    out.rows.push_back(rows.at(i));
    out.labels.push_back(labels.at(i));
  }
  return out;
}

LabeledDataset generate_dataset(const SensorTwin& twin, Taxonomy taxonomy, const DatasetPlan& plan,
                                std::uint64_t seed) {
  if (plan.intensities_lux.empty() || plan.draws == 0) fail(Errc::config_error, "dataset plan is empty");
  LabeledDataset ds;
  ds.taxonomy = taxonomy;
  std::uint64_t sample = 0;
  for (LightClass cls : classes_of(taxonomy)) {
    const Spd reference = reference_spd(cls);
    for (double lux : plan.intensities_lux) {
      if (!(lux > 0.0)) fail(Errc::config_error, "dataset intensities must be > 0");
      const Spd spd = reference.scaled(lux / kReferenceLux);
      for (std::size_t d = 0; d < plan.draws; ++d) ds.add(twin.sense(spd, mix_seed(seed, sample++), cls), cls);
    }
  }
  return ds;
}

LabeledDataset parse_dataset_csv(std::string_view text, std::optional<Taxonomy> taxonomy) {
  const auto table = csv::parse(text, "dataset");
  const std::array<std::size_t, 6> cols = {table.column("bb"), table.column("ir"), table.column("r"),
                                           table.column("g"),  table.column("b"),  table.column("lux")};
  const auto label_col = table.column("label");
  std::vector<LightClass> labels;
  std::vector<PseudoSpectrum> rows;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& row = table.rows[i];
    const std::string ctx = "dataset row " + std::to_string(i + 1);
    PseudoSpectrum ps;
    double* fields[6] = {&ps.bb, &ps.ir, &ps.r, &ps.g, &ps.b, &ps.lux};
    for (std::size_t c = 0; c < 6; ++c) {
      *fields[c] = csv::to_double(row[cols[c]], ctx);
      if (*fields[c] < 0.0) fail(Errc::invalid_channel_value, ctx + ": negative channel value");
    }
    rows.push_back(ps);
    labels.push_back(parse_light_class(row[label_col]));
  }
  LabeledDataset ds;
  if (taxonomy) {
    ds.taxonomy = *taxonomy;
  } else {
    const bool base = std::all_of(labels.begin(), labels.end(), [](auto l) { return belongs_to(l, Taxonomy::base); });
    ds.taxonomy = base ? Taxonomy::base : Taxonomy::extended;
  }
  for (std::size_t i = 0; i < rows.size(); ++i) ds.add(rows[i], labels[i]);
  return ds;
}

LabeledDataset read_dataset_csv(const std::filesystem::path& path, std::optional<Taxonomy> taxonomy) {
  return parse_dataset_csv(csv::read_text(path), taxonomy);
}

std::string dataset_csv(const LabeledDataset& ds) {
  std::string out = "bb,ir,r,g,b,lux,label\n";
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const auto& p = ds.rows[i];
    for (double v : {p.bb, p.ir, p.r, p.g, p.b, p.lux}) {
      out += csv::number(v);
      out += ',';
    }
    out += to_string(ds.labels[i]);
    out += '\n';
  }
  return out;
}

FeatureMatrix featurize(const LabeledDataset& ds, const FeatureConfig& config) {
  FeatureMatrix m;
  m.rows = ds.size();
  m.cols = config.dimension();
  m.values.reserve(m.rows * m.cols);
  for (const auto& ps : ds.rows) {
    const auto fv = extract(ps, config);
    m.values.insert(m.values.end(), fv.begin(), fv.end());
  }
  return m;
}

std::vector<std::vector<std::size_t>> kfold_split(const LabeledDataset& ds, std::size_t k, std::uint64_t seed) {
  if (k < 2) fail(Errc::invalid_fold, "k must be >= 2");
  if (ds.size() < k)
    fail(Errc::invalid_fold, "k = " + std::to_string(k) + " exceeds dataset size " + std::to_string(ds.size()));

  std::mt19937_64 rng(mix_seed(seed, 0xF01DULL));
  const auto shuffle = [&rng](std::vector<std::size_t>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::uniform_int_distribution<std::size_t> pick(0, i - 1);
      std::swap(v[i - 1], v[pick(rng)]);
    }
  };

  std::array<std::vector<std::size_t>, kLightClassCount> by_class;
  for (std::size_t i = 0; i < ds.size(); ++i) by_class[index_of(ds.labels[i])].push_back(i);
  const bool stratify = std::all_of(by_class.begin(), by_class.end(), [k](const auto& v) { return v.empty() || v.size() >= k; });

  std::vector<std::size_t> order;
  order.reserve(ds.size());
  if (stratify) {
    for (auto& members : by_class) {
      shuffle(members);
      order.insert(order.end(), members.begin(), members.end());
    }
  } else {
    order.resize(ds.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    shuffle(order);
  }
  // dealing round-robin over the class-grouped order keeps every class spread
  // across folds and the sizes within one of each other
  std::vector<std::vector<std::size_t>> folds(k);
  for (std::size_t i = 0; i < order.size(); ++i) folds[i % k].push_back(order[i]);
  for (auto& f : folds) std::sort(f.begin(), f.end());
  return folds;
}

}  // namespace lxh
