#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lxh/classifiers.hpp"
#include "lxh/error.hpp"
#include "lxh/exec.hpp"
#include "lxh/pv.hpp"
#include "lxh/reconstruction.hpp"
#include "lxh/scenario.hpp"

namespace lxh {

/// Error raised inside a pipeline stage; what() names the stage.
class StageError : public Error {
 public:
  StageError(std::string stage, const Error& cause);
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

struct ClassifierChoice {
  Method method = Method::weighted_knn;
  char config = 'R';
  Norm norm = Norm::b;
};

struct PipelineConfig {
  std::filesystem::path scenario;
  std::filesystem::path eqe;      // empty: built-in GaAs-like converter
  std::filesystem::path dark_jv;
  std::string converter_name = "gaas_like";
  double area_cm2 = 10.0;
  double cell_area_cm2 = 10.0;
  std::filesystem::path chain;    // empty: default chain
  std::filesystem::path library;  // empty: twin references and corrections
  std::filesystem::path dataset;  // empty: generated from the scenario twin
  ClassifierChoice classifier;
  std::uint64_t dataset_seed = 1;
  std::uint64_t simulation_seed = 2;
  std::uint64_t cv_seed = kDefaultCvSeed;
  std::optional<double> days;     // overrides the scenario duration
  double target_power_w = 0.01;
  bool surfaces = false;
};

/// Relative paths resolve against `base_dir`.
PipelineConfig parse_pipeline_config(std::string_view json_text, const std::filesystem::path& base_dir);
PipelineConfig load_pipeline_config(const std::filesystem::path& path);

/// Everything the per-step stages need, built once.
struct PipelineModels {
  Scenario scenario;
  PVConverter converter;
  HarvestChain chain;
  ReferenceLibrary library;
  TrainedClassifier base;
  std::optional<TrainedClassifier> extended;  // present for extended-taxonomy scenarios
  LabeledDataset training;
};

PipelineModels build_models(const PipelineConfig& cfg);

struct StepRecord {
  double t_s = 0.0;
  long long timestamp = 0;
  LightClass truth_class = LightClass::dark;
  LightClass predicted = LightClass::dark;
  double raw_lux = 0.0;
  double corrected_lux = 0.0;
  bool clamped = false;
  double jsc_lowcost = 0.0;  // mA/cm^2
  double jsc_truth = 0.0;
  std::vector<double> fractions;
};

/// Classify, correct, reconstruct and compute Jsc for each step. The truth
/// Jsc reads only the truth spectrum, never the pseudo-spectrum.
std::vector<StepRecord> process_steps(const std::vector<TimelineStep>& steps, const PipelineModels& models,
                                      Exec exec = Exec::parallel);

LightClass classify_step(const PseudoSpectrum& ps, const PipelineModels& models);

struct SwitchEvent {
  std::size_t step = 0;
  std::size_t from_source = 0;
  std::size_t to_source = 0;
  double outgoing_fraction = 0.0;
};

struct SwitchingSummary {
  std::vector<SwitchEvent> events;
  std::optional<double> mean_percent;  // empty when there are no transitions
};

/// Scenario source a predicted class stands for, if any. Natural classes
/// map to an auto-natural source; dark maps to none.
std::optional<std::size_t> source_of(const Scenario& scenario, LightClass cls);

/// Transitions of the recognized source; for each, the outgoing source's
/// irradiance fraction at the step where the decision changed. Steps that
/// map to no source keep the previous decision.
SwitchingSummary switching_ratio(std::span<const std::optional<std::size_t>> recognized,
                                 std::span<const std::vector<double>> fractions);

struct DailyEnergy {
  std::size_t day = 0;
  long long start_epoch_s = 0;
  double truth_wh = 0.0;
  double lowcost_wh = 0.0;
  double truth_stored_wh = 0.0;
  double lowcost_stored_wh = 0.0;
  std::optional<double> abs_error_pct;  // 0 when both are zero, empty when only truth is
};

struct EvaluationReport {
  std::vector<StepRecord> steps;
  std::vector<std::string> fraction_names;
  EnergyEstimate truth;
  EnergyEstimate lowcost;
  std::vector<DailyEnergy> days;
  double mean_daily_error_pct = 0.0;
  double cumulative_error_pct = 0.0;
  SwitchingSummary switching;
  double cv_accuracy = 0.0;
  double holdout_accuracy = 0.0;
  double classification_accuracy = 0.0;  // against the dominant truth class
  std::optional<AreaRecommendation> sizing;
  std::string sizing_note;
  double target_power_w = 0.0;
  std::string classifier;
  std::vector<std::pair<std::string, std::vector<SurfacePoint>>> surfaces;
};

/// Per-day energies from a power series: the interval [t_i, t_i+1] counts
/// toward the day t_i falls in.
std::vector<DailyEnergy> daily_energy(const EnergyEstimate& truth, const EnergyEstimate& lowcost,
                                      std::size_t day_count, long long start_epoch_s);

EvaluationReport run_pipeline(const PipelineConfig& cfg, Exec exec = Exec::parallel);

/// Writes summary.txt, daily_errors.csv, classification.csv, power.csv,
/// energy.csv, switching.csv and any requested surfaces.
void write_report(const EvaluationReport& report, const std::filesystem::path& out_dir);

}  // namespace lxh
