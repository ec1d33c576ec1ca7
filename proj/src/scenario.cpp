#include "lxh/scenario.hpp"

#include <cmath>
#include <numbers>
#include <algorithm>

#include <json.hpp>

#include "lxh/csv.hpp"
#include "lxh/error.hpp"
#include "lxh/rng.hpp"

namespace lxh {

using nlohmann::json;

namespace {

constexpr double kDay = 86400.0;

double hour_of(double t_s) { return std::fmod(t_s, kDay) / 3600.0; }

Profile parse_profile(const json& j) {
  Profile p;
  const auto type = j.at("type").get<std::string>();
  const json params = j.value("params", json::object());
  if (type == "constant") {
    p.type = Profile::Type::constant;
    p.lux = params.at("lux").get<double>();
  } else if (type == "bell") {
    p.type = Profile::Type::bell;
    p.start_h = params.at("start_h").get<double>();
    p.end_h = params.at("end_h").get<double>();
    p.peak_lux = params.at("peak_lux").get<double>();
    p.day_variation = params.value("day_variation", 0.0);
    if (!(p.end_h > p.start_h)) fail(Errc::config_error, "bell profile needs start_h < end_h");
    if (p.day_variation < 0.0 || p.day_variation > 1.0) fail(Errc::config_error, "day_variation must be in [0, 1]");
  } else if (type == "schedule") {
    p.type = Profile::Type::schedule;
    for (const auto& iv : params.at("intervals")) {
      if (!iv.is_array() || iv.size() != 3) fail(Errc::config_error, "schedule intervals are [start_h, end_h, lux]");
      Profile::Interval interval{iv[0].get<double>(), iv[1].get<double>(), iv[2].get<double>()};
      if (!(interval.end_h > interval.start_h)) fail(Errc::config_error, "schedule interval needs start_h < end_h");
      p.intervals.push_back(interval);
    }
  } else {
    fail(Errc::config_error, "unknown profile type '" + type + "'");
  }
  if (p.lux < 0.0 || p.peak_lux < 0.0) fail(Errc::config_error, "profile intensity must be >= 0");
  for (const auto& iv : p.intervals)
    if (iv.lux < 0.0) fail(Errc::config_error, "profile intensity must be >= 0");
  return p;
}

NaturalBias parse_natural_bias(const json& j, NaturalBias base) {
  base.high_lux_bias = j.value("high", base.high_lux_bias);
  base.low_lux_bias = j.value("low", base.low_lux_bias);
  base.scale_lux = j.value("scale_lux", base.scale_lux);
  if (!(base.scale_lux > 0.0)) fail(Errc::config_error, "natural bias scale_lux must be > 0");
  return base;
}

SensorTwin parse_twin(const json& j) {
  const SensorTwin& base = SensorTwin::default_twin();
  SensorErrorModel errors = base.errors();
  if (j.contains("bias")) {
    for (const auto& [name, value] : j.at("bias").items()) {
      const auto cls = parse_light_class(name);
      if (value.is_number()) {
        errors.natural_bias.erase(cls);
        errors.constant_bias[cls] = value.get<double>();
      } else {
        NaturalBias seed_bias;
        if (auto it = errors.natural_bias.find(cls); it != errors.natural_bias.end()) seed_bias = it->second;
        errors.constant_bias.erase(cls);
        errors.natural_bias[cls] = parse_natural_bias(value, seed_bias);
      }
    }
  }
  if (j.value("ideal", false)) errors = SensorErrorModel::ideal();
  if (j.contains("noise_std")) errors.noise_std = j.at("noise_std").get<double>();
  LuxFormula formula = base.lux_formula();
  if (j.contains("lux_coeffs")) {
    const auto& lc = j.at("lux_coeffs");
    const auto bp = lc.at("breakpoints").get<std::vector<double>>();
    const auto co = lc.at("coeffs").get<std::vector<std::vector<double>>>();
    if (bp.size() != 4 || co.size() != 5) fail(Errc::config_error, "lux_coeffs needs 4 breakpoints and 5 pairs");
    for (std::size_t i = 0; i < 4; ++i) formula.breakpoints[i] = bp[i];
    for (std::size_t i = 0; i < 5; ++i) {
      if (co[i].size() != 2) fail(Errc::config_error, "lux coefficient pairs are [c0, c1]");
      formula.coeffs[i] = {co[i][0], co[i][1]};
    }
  }
  return SensorTwin(base.channels(), formula, std::move(errors));
}

}  // namespace

double Profile::lux_at(double t_s, std::uint64_t seed, std::size_t source_index) const {
  const double h = hour_of(t_s);
  switch (type) {
    case Type::constant: return lux;
    case Type::bell: {
      if (h <= start_h || h >= end_h) return 0.0;
      const auto day = static_cast<std::uint64_t>(std::floor(t_s / kDay));
      const double u = 2.0 * unit_interval(mix_seed(mix_seed(seed, 0xB311ULL + source_index), day)) - 1.0;
      const double s = std::sin(std::numbers::pi * (h - start_h) / (end_h - start_h));
      return peak_lux * (1.0 + day_variation * u) * s * s;
    }
    case Type::schedule: {
      double sum = 0.0;
      for (const auto& iv : intervals)
        if (h >= iv.start_h && h < iv.end_h) sum += iv.lux;
      return sum;
    }
  }
  return 0.0;
}

double Profile::peak_hour() const { return type == Type::bell ? 0.5 * (start_h + end_h) : 12.0; }

LightClass Source::class_at(double lux, double hour) const {
  if (!auto_natural) return cls;
  if (lux > stages.strong_lux) return LightClass::strong_daylight;
  if (lux < stages.twilight_lux) return hour < profile.peak_hour() ? LightClass::sunrise : LightClass::sunset;
  return LightClass::daylight;
}

std::size_t Scenario::step_count() const {
  if (!(step_s > 0.0)) fail(Errc::config_error, "step_s must be > 0");
  if (!(duration_s > 0.0)) fail(Errc::config_error, "duration_s must be > 0");
  return static_cast<std::size_t>(std::ceil(duration_s / step_s - 1e-9));
}

Scenario parse_scenario(std::string_view json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    fail(Errc::parse_error, std::string("scenario JSON: ") + e.what());
  }
  try {
    Scenario s;
    s.duration_s = j.at("duration_s").get<double>();
    s.step_s = j.at("step_s").get<double>();
    if (j.contains("start_utc")) s.start_epoch_s = timefmt::parse_utc(j.at("start_utc").get<std::string>());
    if (j.contains("taxonomy")) s.taxonomy = parse_taxonomy(j.at("taxonomy").get<std::string>());
    for (const auto& src : j.at("sources")) {
      Source source;
      source.label = src.at("class").get<std::string>();
      if (source.label == "natural") {
        source.auto_natural = true;
        source.cls = LightClass::daylight;
        if (src.contains("stages")) {
          source.stages.twilight_lux = src.at("stages").value("twilight_lux", source.stages.twilight_lux);
          source.stages.strong_lux = src.at("stages").value("strong_lux", source.stages.strong_lux);
        }
        if (s.taxonomy != Taxonomy::extended)
          fail(Errc::config_error, "auto 'natural' sources need the extended taxonomy");
      } else {
        source.cls = parse_light_class(source.label);
        if (!belongs_to(source.cls, s.taxonomy))
          fail(Errc::taxonomy_error, source.label + " is not in the " + std::string(to_string(s.taxonomy)) + " taxonomy");
      }
      source.profile = parse_profile(src.at("profile"));
      s.sources.push_back(std::move(source));
    }
    if (j.contains("twin")) s.twin = parse_twin(j.at("twin"));
    if (j.contains("dataset")) {
      const auto& d = j.at("dataset");
      if (d.contains("intensities_lux")) s.dataset.intensities_lux = d.at("intensities_lux").get<std::vector<double>>();
      if (d.contains("draws")) s.dataset.draws = d.at("draws").get<std::size_t>();
    }
    s.step_count();
    return s;
  } catch (const json::exception& e) {
    fail(Errc::parse_error, std::string("scenario JSON: ") + e.what());
  }
}

Scenario load_scenario(const std::filesystem::path& path) {
  return parse_scenario(csv::read_text(path));
}

namespace {

struct ReferenceSet {
  std::vector<Spd> spectra;         // indexed by LightClass
  std::vector<double> irradiance;   // integral of each reference
};

const ReferenceSet& references() {
  static const ReferenceSet set = [] {
    ReferenceSet s;
    for (std::size_t i = 0; i < kLightClassCount; ++i) {
      s.spectra.push_back(reference_spd(static_cast<LightClass>(i)));
      s.irradiance.push_back(integrate(s.spectra.back()));
    }
    return s;
  }();
  return set;
}

TimelineStep make_step(const Scenario& scenario, std::uint64_t seed, std::size_t index) {
  const auto& refs = references();
  TimelineStep step{index, static_cast<double>(index) * scenario.step_s,
                    Spd::zero(reference_grid()), {}, {}, {}, {}, LightClass::dark};
  const double hour = hour_of(step.t_s);
  const std::size_t n = scenario.sources.size();
  step.fractions.assign(n, 0.0);
  step.source_classes.resize(n);
  step.source_lux.assign(n, 0.0);

  auto grid = reference_grid();
  std::vector<double> values(grid.size(), 0.0);
  std::vector<double> irradiance(n, 0.0);
  double total_irradiance = 0.0;
  double total_lux = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const auto& src = scenario.sources[k];
    const double lux = src.profile.lux_at(step.t_s, seed, k);
    const LightClass cls = src.class_at(lux, hour);
    step.source_classes[k] = cls;
    step.source_lux[k] = lux;
    if (lux <= 0.0 || cls == LightClass::dark) continue;
    const double w = lux / kReferenceLux;
    const auto ref = refs.spectra[index_of(cls)].irradiance();
    for (std::size_t i = 0; i < values.size(); ++i) values[i] += w * ref[i];
    irradiance[k] = w * refs.irradiance[index_of(cls)];
    total_irradiance += irradiance[k];
    total_lux += lux;
  }
  step.truth = Spd(std::move(grid), std::move(values));

  std::vector<ClassShare> composition;
  if (total_irradiance > 0.0) {
    double best = -1.0;
    for (std::size_t k = 0; k < n; ++k) {
      step.fractions[k] = irradiance[k] / total_irradiance;
      const bool better = step.fractions[k] > best ||
                          (step.fractions[k] == best && index_of(step.source_classes[k]) < index_of(step.truth_class));
      if (better) {
        best = step.fractions[k];
        step.truth_class = step.source_classes[k];
      }
      if (step.source_lux[k] > 0.0) composition.push_back({step.source_classes[k], step.source_lux[k] / total_lux});
    }
  }
  step.sensed = scenario.twin.sense(step.truth, mix_seed(seed, index), composition);
  step.sensed.timestamp = scenario.start_epoch_s + static_cast<long long>(std::llround(step.t_s));
  return step;
}

}  // namespace

std::vector<TimelineStep> simulate(const Scenario& scenario, std::uint64_t seed, std::size_t first,
                                   std::size_t count, Exec exec) {
  const std::size_t total = scenario.step_count();
  if (first >= total) return {};
  count = std::min(count, total - first);
  references();  // initialize the shared table outside the parallel region
  std::vector<std::optional<TimelineStep>> slots(count);
  const auto n = static_cast<std::ptrdiff_t>(count);
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) slots[i] = make_step(scenario, seed, first + static_cast<std::size_t>(i));
  } else {
    for (std::ptrdiff_t i = 0; i < n; ++i) slots[i] = make_step(scenario, seed, first + static_cast<std::size_t>(i));
  }
  std::vector<TimelineStep> steps;
  steps.reserve(count);
  for (auto& s : slots) steps.push_back(std::move(*s));
  return steps;
}

std::vector<TimelineStep> simulate(const Scenario& scenario, std::uint64_t seed, Exec exec) {
  return simulate(scenario, seed, 0, scenario.step_count(), exec);
}

std::vector<std::string> fraction_column_names(const Scenario& scenario) {
  std::vector<std::string> names;
  for (const auto& src : scenario.sources) {
    std::string name = "frac_" + src.label;
    std::string unique = name;
    for (int suffix = 2; std::find(names.begin(), names.end(), unique) != names.end(); ++suffix)
      unique = name + "_" + std::to_string(suffix);
    names.push_back(unique);
  }
  return names;
}

std::string timeline_csv_header(const Scenario& scenario) {
  std::string out = "timestamp,bb,ir,r,g,b,lux,truth_class";
  for (const auto& name : fraction_column_names(scenario)) out += "," + name;
  out += '\n';
  return out;
}

std::string timeline_csv_rows(const Scenario&, const std::vector<TimelineStep>& steps) {
  std::string out;
  for (const auto& s : steps) {
    out += timefmt::format_utc(s.sensed.timestamp.value_or(0));
    for (double v : {s.sensed.bb, s.sensed.ir, s.sensed.r, s.sensed.g, s.sensed.b, s.sensed.lux}) {
      out += ',';
      out += csv::number(v);
    }
    out += ',';
    out += to_string(s.truth_class);
    for (double f : s.fractions) {
      out += ',';
      out += csv::number(f);
    }
    out += '\n';
  }
  return out;
}

}  // namespace lxh
