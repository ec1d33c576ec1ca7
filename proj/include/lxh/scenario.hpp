#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "lxh/exec.hpp"
#include "lxh/light_class.hpp"
#include "lxh/sensor_twin.hpp"

namespace lxh {

/// Daily intensity profile of one source, in lux of that source alone.
struct Profile {
  enum class Type { constant, bell, schedule };

  struct Interval {
    double start_h;
    double end_h;
    double lux;
  };

  Type type = Type::constant;
  double lux = 0.0;  // constant
  // bell: peak * sin^2 over [start_h, end_h], the daily peak scaled by a
  // seeded factor in [1 - day_variation, 1 + day_variation]
  double start_h = 0.0;
  double end_h = 24.0;
  double peak_lux = 0.0;
  double day_variation = 0.0;
  std::vector<Interval> intervals;  // schedule, repeated daily

  double lux_at(double t_s, std::uint64_t seed, std::size_t source_index) const;
  /// Hour of the daily maximum (bell midpoint; 12 otherwise).
  double peak_hour() const;
};

/// Thresholds that pick the natural sub-class for an auto-natural source.
struct NaturalStages {
  double twilight_lux = 250.0;
  double strong_lux = 1500.0;
};

struct Source {
  std::string label;  // class name, or "natural"
  LightClass cls = LightClass::dark;
  bool auto_natural = false;  // spectrum follows sunrise/daylight/strong/sunset
  NaturalStages stages;
  Profile profile;

  LightClass class_at(double lux, double hour) const;
};

/// Training-set layout: every class of the taxonomy at each intensity, with
/// `draws` independent noise draws.
struct DatasetPlan {
  std::vector<double> intensities_lux = {20.0, 50.237728630191596, 126.19146889603865,
                                         316.98234632253677, 796.2143411069946, 2000.0};
  std::size_t draws = 3;
};

struct Scenario {
  double duration_s = 86400.0;
  double step_s = 60.0;
  long long start_epoch_s = 1622505600;  // 2021-06-01T00:00:00Z
  Taxonomy taxonomy = Taxonomy::base;
  std::vector<Source> sources;
  SensorTwin twin = SensorTwin::default_twin();
  DatasetPlan dataset;

  std::size_t step_count() const;
};

Scenario parse_scenario(std::string_view json_text);
Scenario load_scenario(const std::filesystem::path& path);

struct TimelineStep {
  std::size_t index = 0;
  double t_s = 0.0;  // seconds since scenario start
  Spd truth;
  PseudoSpectrum sensed;
  std::vector<double> fractions;             // irradiance share per source
  std::vector<LightClass> source_classes;    // spectrum class per source
  std::vector<double> source_lux;            // illuminance per source
  LightClass truth_class = LightClass::dark;  // dominant source by irradiance
};

/// Steps [first, first + count) of the scenario. Each step draws its noise
/// from a sub-seed of (seed, step index), so any chunking is reproducible.
std::vector<TimelineStep> simulate(const Scenario& scenario, std::uint64_t seed, std::size_t first,
                                   std::size_t count, Exec exec = Exec::parallel);

/// Whole scenario.
std::vector<TimelineStep> simulate(const Scenario& scenario, std::uint64_t seed, Exec exec = Exec::parallel);

std::vector<std::string> fraction_column_names(const Scenario& scenario);

std::string timeline_csv_header(const Scenario& scenario);
std::string timeline_csv_rows(const Scenario& scenario, const std::vector<TimelineStep>& steps);

}  // namespace lxh
