#include "lxh/pipeline.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "lxh/csv.hpp"
#include "lxh/rng.hpp"

namespace lxh {

using nlohmann::json;

StageError::StageError(std::string stage, const Error& cause)
    : Error(cause.code(), "stage '" + stage + "': " + cause.what()), stage_(std::move(stage)) {}

namespace {

template <class F>
auto in_stage(const char* name, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const StageError&) {
    throw;
  } catch (const Error& e) {
    throw StageError(name, e);
  }
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  const std::filesystem::path path(p);
  return path.is_absolute() ? path : base / path;
}

}  // namespace

PipelineConfig parse_pipeline_config(std::string_view json_text, const std::filesystem::path& base_dir) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    fail(Errc::parse_error, std::string("pipeline JSON: ") + e.what());
  }
  try {
    PipelineConfig c;
    c.scenario = resolve(base_dir, j.at("scenario").get<std::string>());
    if (j.contains("converter")) {
      const auto& cv = j.at("converter");
      if (cv.contains("eqe")) c.eqe = resolve(base_dir, cv.at("eqe").get<std::string>());
      if (cv.contains("dark_jv")) c.dark_jv = resolve(base_dir, cv.at("dark_jv").get<std::string>());
      if (c.eqe.empty() != c.dark_jv.empty()) fail(Errc::config_error, "converter needs both eqe and dark_jv");
      c.converter_name = cv.value("name", c.converter_name);
      c.area_cm2 = cv.value("area_cm2", c.area_cm2);
      c.cell_area_cm2 = cv.value("cell_area_cm2", c.cell_area_cm2);
    }
    if (j.contains("chain")) c.chain = resolve(base_dir, j.at("chain").get<std::string>());
    if (j.contains("library")) c.library = resolve(base_dir, j.at("library").get<std::string>());
    if (j.contains("dataset")) c.dataset = resolve(base_dir, j.at("dataset").get<std::string>());
    if (j.contains("classifier")) {
      const auto& cl = j.at("classifier");
      if (cl.contains("method")) c.classifier.method = parse_method(cl.at("method").get<std::string>());
      if (cl.contains("normalization")) c.classifier.norm = parse_norm(cl.at("normalization").get<std::string>());
      if (cl.contains("config")) {
        const auto id = cl.at("config").get<std::string>();
        if (id.size() != 1) fail(Errc::config_error, "classifier config is a single letter");
        c.classifier.config = id[0];
      }
      make_config(c.classifier.config, c.classifier.norm);  // validates the cell
    }
    if (j.contains("seeds")) {
      const auto& s = j.at("seeds");
      c.dataset_seed = s.value("dataset", c.dataset_seed);
      c.simulation_seed = s.value("simulation", c.simulation_seed);
      c.cv_seed = s.value("cv", c.cv_seed);
    }
    if (j.contains("days")) {
      c.days = j.at("days").get<double>();
      if (!(*c.days > 0.0)) fail(Errc::config_error, "days must be > 0");
    }
    c.target_power_w = j.value("target_power_w", c.target_power_w);
    c.surfaces = j.value("surfaces", c.surfaces);
    return c;
  } catch (const json::exception& e) {
    fail(Errc::parse_error, std::string("pipeline JSON: ") + e.what());
  }
}

PipelineConfig load_pipeline_config(const std::filesystem::path& path) {
  return parse_pipeline_config(csv::read_text(path), path.parent_path());
}

PipelineModels build_models(const PipelineConfig& cfg) {
  Scenario scenario = in_stage("scenario", [&] {
    Scenario s = load_scenario(cfg.scenario);
    if (cfg.days) s.duration_s = *cfg.days * 86400.0;
    return s;
  });
  PVConverter converter = in_stage("converter", [&] {
    if (cfg.eqe.empty()) return synthetic_gaas_converter(cfg.area_cm2, cfg.cell_area_cm2);
    return PVConverter(cfg.converter_name, read_eqe_csv(cfg.eqe), read_dark_jv_csv(cfg.dark_jv), cfg.area_cm2,
                       cfg.cell_area_cm2);
  });
  HarvestChain chain = in_stage("chain", [&] { return cfg.chain.empty() ? default_chain() : load_chain(cfg.chain); });
  ReferenceLibrary library = in_stage("library", [&] {
    return cfg.library.empty() ? ReferenceLibrary::from_twin(scenario.twin) : ReferenceLibrary::load(cfg.library);
  });
  LabeledDataset training = in_stage("dataset", [&] {
    if (!cfg.dataset.empty()) return read_dataset_csv(cfg.dataset);
    return generate_dataset(scenario.twin, Taxonomy::base, scenario.dataset, cfg.dataset_seed);
  });
  const FeatureConfig config =
      in_stage("train", [&] { return make_config(cfg.classifier.config, cfg.classifier.norm); });
  TrainedClassifier base = in_stage("train", [&] { return train(cfg.classifier.method, training, config); });
  std::optional<TrainedClassifier> extended;
  if (scenario.taxonomy == Taxonomy::extended && training.taxonomy == Taxonomy::base) {
    extended = in_stage("train", [&] {
      const auto ds = generate_dataset(scenario.twin, Taxonomy::extended, scenario.dataset,
                                       mix_seed(cfg.dataset_seed, 0xE7ULL));
      return train(cfg.classifier.method, ds, config);
    });
  }
  return PipelineModels{std::move(scenario), std::move(converter), std::move(chain), std::move(library),
                        std::move(base), std::move(extended), std::move(training)};
}

LightClass classify_step(const PseudoSpectrum& ps, const PipelineModels& models) {
  LightClass cls = models.base.predict(ps);
  if (models.extended && is_natural(cls))
    cls = classify_natural_subclass(ps, cls, *models.extended, models.library.correction());
  return cls;
}

std::vector<StepRecord> process_steps(const std::vector<TimelineStep>& steps, const PipelineModels& models,
                                      Exec exec) {
  std::vector<StepRecord> out(steps.size());
  const auto one = [&](std::size_t i) {
    const auto& s = steps[i];
    StepRecord& r = out[i];
    r.t_s = s.t_s;
    r.timestamp = s.sensed.timestamp.value_or(0);
    r.truth_class = s.truth_class;
    r.fractions = s.fractions;
    r.jsc_truth = in_stage("truth-path", [&] { return jsc(s.truth, models.converter); });
    in_stage("classify", [&] {
      r.predicted = classify_step(s.sensed, models);
      return 0;
    });
    r.raw_lux = s.sensed.lux;
    const auto corrected = in_stage("correct", [&] { return correct_lux(r.raw_lux, r.predicted, models.library.correction()); });
    r.corrected_lux = corrected.lux;
    r.clamped = corrected.clamped;
    r.jsc_lowcost = in_stage("reconstruct", [&] {
      return jsc(reconstruct(r.predicted, r.corrected_lux, models.library), models.converter);
    });
  };
  const auto n = static_cast<std::ptrdiff_t>(steps.size());
  if (exec == Exec::parallel) {
    std::optional<StageError> error;
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      try {
        one(static_cast<std::size_t>(i));
      } catch (const StageError& e) {
#pragma omp critical(lxh_pipeline_error)
        if (!error) error = e;
      }
    }
    if (error) throw *error;
  } else {
    for (std::ptrdiff_t i = 0; i < n; ++i) one(static_cast<std::size_t>(i));
  }
  return out;
}

std::optional<std::size_t> source_of(const Scenario& scenario, LightClass cls) {
  if (cls == LightClass::dark) return std::nullopt;
  for (std::size_t k = 0; k < scenario.sources.size(); ++k) {
    const auto& src = scenario.sources[k];
    if (src.auto_natural ? is_natural(cls) : src.cls == cls) return k;
  }
  // a natural prediction under a fixed natural source still names it
  if (is_natural(cls))
    for (std::size_t k = 0; k < scenario.sources.size(); ++k)
      if (is_natural(scenario.sources[k].cls)) return k;
  return std::nullopt;
}

SwitchingSummary switching_ratio(std::span<const std::optional<std::size_t>> recognized,
                                 std::span<const std::vector<double>> fractions) {
  if (recognized.size() != fractions.size()) fail(Errc::shape_mismatch, "decision and fraction series differ in length");
  SwitchingSummary s;
  std::optional<std::size_t> current;
  for (std::size_t i = 0; i < recognized.size(); ++i) {
    if (!recognized[i]) continue;
    if (current && *recognized[i] != *current) {
      if (*current >= fractions[i].size()) fail(Errc::shape_mismatch, "source index beyond fraction columns");
      s.events.push_back({i, *current, *recognized[i], fractions[i][*current]});
    }
    current = recognized[i];
  }
  if (!s.events.empty()) {
    double sum = 0.0;
    for (const auto& e : s.events) sum += e.outgoing_fraction;
    s.mean_percent = 100.0 * sum / static_cast<double>(s.events.size());
  }
  return s;
}

std::vector<DailyEnergy> daily_energy(const EnergyEstimate& truth, const EnergyEstimate& lowcost,
                                      std::size_t day_count, long long start_epoch_s) {
  std::vector<DailyEnergy> days(day_count);
  for (std::size_t d = 0; d < day_count; ++d) {
    days[d].day = d;
    days[d].start_epoch_s = start_epoch_s + static_cast<long long>(d) * 86400;
  }
  const auto& t = truth.t_s;
  for (std::size_t i = 0; i + 1 < t.size(); ++i) {
    const auto d = static_cast<std::size_t>(std::floor(t[i] / 86400.0));
    if (d >= day_count) continue;
    const double h = (t[i + 1] - t[i]) / 3600.0;
    days[d].truth_wh += 0.5 * (truth.pmpp_w[i] + truth.pmpp_w[i + 1]) * h;
    days[d].lowcost_wh += 0.5 * (lowcost.pmpp_w[i] + lowcost.pmpp_w[i + 1]) * h;
    days[d].truth_stored_wh += 0.5 * (truth.stored_w[i] + truth.stored_w[i + 1]) * h;
    days[d].lowcost_stored_wh += 0.5 * (lowcost.stored_w[i] + lowcost.stored_w[i + 1]) * h;
  }
  for (auto& d : days) {
    if (d.truth_wh > 0.0)
      d.abs_error_pct = 100.0 * std::abs(d.lowcost_wh - d.truth_wh) / d.truth_wh;
    else if (d.lowcost_wh == 0.0)
      d.abs_error_pct = 0.0;
  }
  return days;
}

namespace {

std::vector<SurfacePoint> padded_surface(const TrainedClassifier& clf, const LabeledDataset& ds, Exec exec) {
  const auto x = featurize(ds, clf.config());
  double x0 = x.values[0], x1 = x0, y0 = x.values[1], y1 = y0;
  for (std::size_t i = 0; i < x.rows; ++i) {
    x0 = std::min(x0, x.values[i * 2]);
    x1 = std::max(x1, x.values[i * 2]);
    y0 = std::min(y0, x.values[i * 2 + 1]);
    y1 = std::max(y1, x.values[i * 2 + 1]);
  }
  const double px = 0.05 * std::max(x1 - x0, 1e-9), py = 0.05 * std::max(y1 - y0, 1e-9);
  return decision_surface(clf, {0, 1}, {x0 - px, x1 + px, y0 - py, y1 + py}, 200, exec);
}

}  // namespace

EvaluationReport run_pipeline(const PipelineConfig& cfg, Exec exec) {
  const PipelineModels models = build_models(cfg);
  const Scenario& sc = models.scenario;
  EvaluationReport r;
  r.target_power_w = cfg.target_power_w;
  r.fraction_names = fraction_column_names(sc);
  r.classifier = std::string(to_string(models.base.method())) + "/" + models.base.config().name() + "/" +
                 std::string(to_string(models.base.config().norm));

  in_stage("evaluate-classifier", [&] {
    r.cv_accuracy = cross_validate(models.base.method(), models.training, models.base.config(), 5, cfg.cv_seed).mean_accuracy;
    const auto holdout = generate_dataset(sc.twin, models.training.taxonomy, sc.dataset, mix_seed(cfg.dataset_seed, 0x401DULL));
    r.holdout_accuracy = evaluate_holdout(models.base, holdout).accuracy;
    return 0;
  });

  // one simulated day at a time keeps the spectra of a single day in memory
  const std::size_t total = in_stage("simulate", [&] { return sc.step_count(); });
  const auto per_day = static_cast<std::size_t>(std::max(1.0, std::round(86400.0 / sc.step_s)));
  r.steps.reserve(total);
  for (std::size_t first = 0; first < total; first += per_day) {
    const auto steps = in_stage("simulate", [&] { return simulate(sc, cfg.simulation_seed, first, per_day, exec); });
    auto records = process_steps(steps, models, exec);
    std::move(records.begin(), records.end(), std::back_inserter(r.steps));
  }

  std::vector<double> t, j_truth, j_low;
  t.reserve(r.steps.size());
  for (const auto& s : r.steps) {
    t.push_back(s.t_s);
    j_truth.push_back(s.jsc_truth);
    j_low.push_back(s.jsc_lowcost);
  }
  in_stage("energy", [&] {
    r.truth = estimate_energy_from_jsc(t, j_truth, models.converter, models.chain, exec);
    r.truth.source = "truth spectra";
    r.lowcost = estimate_energy_from_jsc(t, j_low, models.converter, models.chain, exec);
    r.lowcost.source = "reconstructed spectra";
    return 0;
  });

  const auto day_count = static_cast<std::size_t>(std::ceil(sc.duration_s / 86400.0 - 1e-9));
  r.days = daily_energy(r.truth, r.lowcost, day_count, sc.start_epoch_s);
  double sum = 0.0;
  std::size_t counted = 0;
  for (const auto& d : r.days)
    if (d.abs_error_pct) {
      sum += *d.abs_error_pct;
      ++counted;
    }
  r.mean_daily_error_pct = counted ? sum / static_cast<double>(counted) : 0.0;
  r.cumulative_error_pct =
      r.truth.harvestable_wh > 0.0
          ? 100.0 * std::abs(r.lowcost.harvestable_wh - r.truth.harvestable_wh) / r.truth.harvestable_wh
          : (r.lowcost.harvestable_wh == 0.0 ? 0.0 : 100.0);

  std::vector<std::optional<std::size_t>> recognized;
  std::vector<std::vector<double>> fractions;
  std::size_t correct = 0;
  for (const auto& s : r.steps) {
    recognized.push_back(source_of(sc, s.predicted));
    fractions.push_back(s.fractions);
    correct += s.predicted == s.truth_class;
  }
  r.switching = switching_ratio(recognized, fractions);
  r.classification_accuracy = r.steps.empty() ? 0.0 : static_cast<double>(correct) / static_cast<double>(r.steps.size());

  try {
    r.sizing = recommend_area(cfg.target_power_w, r.lowcost, models.converter);
  } catch (const Error& e) {
    if (e.code() != Errc::cannot_size) throw StageError("sizing", e);
    r.sizing_note = e.what();
  }

  if (cfg.surfaces) {
    in_stage("surfaces", [&] {
      for (Norm norm : {Norm::none, Norm::b}) {
        const auto clf = train(models.base.method(), models.training, make_config('I', norm));
        r.surfaces.emplace_back("surface_I_" + std::string(to_string(norm)) + ".csv",
                                padded_surface(clf, models.training, exec));
      }
      return 0;
    });
  }
  return r;
}

namespace {

std::string pct(std::optional<double> v) { return v ? csv::number(*v) : std::string(); }

std::string summary_text(const EvaluationReport& r) {
  char buf[512];
  std::string out;
  const auto line = [&](const char* fmt, auto... args) {
    std::snprintf(buf, sizeof buf, fmt, args...);
    out += buf;
    out += '\n';
  };
  line("classifier               %s", r.classifier.c_str());
  line("cv accuracy              %.4f", r.cv_accuracy);
  line("holdout accuracy         %.4f", r.holdout_accuracy);
  line("timeline accuracy        %.4f", r.classification_accuracy);
  line("steps                    %zu", r.steps.size());
  line("days                     %zu", r.days.size());
  line("harvestable truth Wh     %.6f", r.truth.harvestable_wh);
  line("harvestable lowcost Wh   %.6f", r.lowcost.harvestable_wh);
  line("stored truth Wh          %.6f", r.truth.stored_wh);
  line("stored lowcost Wh        %.6f", r.lowcost.stored_wh);
  line("mean daily error %%       %.4f", r.mean_daily_error_pct);
  line("cumulative error %%       %.4f", r.cumulative_error_pct);
  if (r.switching.mean_percent)
    line("switching ratio %%        %.2f (%zu transitions)", *r.switching.mean_percent, r.switching.events.size());
  else
    out += "switching ratio %        n/a (no transitions)\n";
  if (r.sizing)
    line("area for %.4f W          %.1f cm2 (%zu cells, avg stored %.6f W)", r.target_power_w, r.sizing->area_cm2,
         r.sizing->cells, r.sizing->avg_stored_w);
  else
    line("area for %.4f W          n/a (%s)", r.target_power_w, r.sizing_note.c_str());
  return out;
}

}  // namespace

void write_report(const EvaluationReport& r, const std::filesystem::path& dir) {
  csv::write_text(dir / "summary.txt", summary_text(r));

  std::string daily = "day,date,truth_wh,lowcost_wh,truth_stored_wh,lowcost_stored_wh,abs_error_pct\n";
  for (const auto& d : r.days) {
    daily += std::to_string(d.day) + "," + timefmt::format_utc(d.start_epoch_s).substr(0, 10) + "," +
             csv::number(d.truth_wh) + "," + csv::number(d.lowcost_wh) + "," + csv::number(d.truth_stored_wh) + "," +
             csv::number(d.lowcost_stored_wh) + "," + pct(d.abs_error_pct) + "\n";
  }
  csv::write_text(dir / "daily_errors.csv", daily);

  std::string cls = "timestamp,truth_class,predicted_class,raw_lux,corrected_lux,clamped";
  for (const auto& n : r.fraction_names) cls += "," + n;
  cls += '\n';
  std::string power = "timestamp,lowcost_pmpp_w,truth_pmpp_w,truth_stored_w,lowcost_stored_w\n";
  std::string energy = "timestamp,lowcost_wh,truth_wh,truth_stored_wh\n";
  double e_low = 0.0, e_truth = 0.0, e_stored = 0.0;
  for (std::size_t i = 0; i < r.steps.size(); ++i) {
    const auto& s = r.steps[i];
    const std::string ts = timefmt::format_utc(s.timestamp);
    cls += ts + "," + std::string(to_string(s.truth_class)) + "," + std::string(to_string(s.predicted)) + "," +
           csv::number(s.raw_lux) + "," + csv::number(s.corrected_lux) + "," + (s.clamped ? "1" : "0");
    for (double f : s.fractions) cls += "," + csv::number(f);
    cls += '\n';
    power += ts + "," + csv::number(r.lowcost.pmpp_w[i]) + "," + csv::number(r.truth.pmpp_w[i]) + "," +
             csv::number(r.truth.stored_w[i]) + "," + csv::number(r.lowcost.stored_w[i]) + "\n";
    if (i > 0) {
      const double h = (r.truth.t_s[i] - r.truth.t_s[i - 1]) / 3600.0;
      e_low += 0.5 * (r.lowcost.pmpp_w[i] + r.lowcost.pmpp_w[i - 1]) * h;
      e_truth += 0.5 * (r.truth.pmpp_w[i] + r.truth.pmpp_w[i - 1]) * h;
      e_stored += 0.5 * (r.truth.stored_w[i] + r.truth.stored_w[i - 1]) * h;
    }
    energy += ts + "," + csv::number(e_low) + "," + csv::number(e_truth) + "," + csv::number(e_stored) + "\n";
  }
  csv::write_text(dir / "classification.csv", cls);
  csv::write_text(dir / "power.csv", power);
  csv::write_text(dir / "energy.csv", energy);

  std::string sw = "timestamp,from_source,to_source,outgoing_fraction\n";
  for (const auto& e : r.switching.events) {
    sw += timefmt::format_utc(r.steps[e.step].timestamp) + "," + r.fraction_names.at(e.from_source).substr(5) + "," +
          r.fraction_names.at(e.to_source).substr(5) + "," + csv::number(e.outgoing_fraction) + "\n";
  }
  csv::write_text(dir / "switching.csv", sw);

  for (const auto& [name, surface] : r.surfaces) csv::write_text(dir / name, surface_csv(surface));
}

}  // namespace lxh
