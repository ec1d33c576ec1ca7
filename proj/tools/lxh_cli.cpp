// Command-line front end: dataset generation, training, sweeps, surfaces,
// classification, lux-correction fitting, simulation and the end-to-end
// energy estimate.

#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "lxh/classifiers.hpp"
#include "lxh/csv.hpp"
#include "lxh/error.hpp"
#include "lxh/features.hpp"
#include "lxh/model_io.hpp"
#include "lxh/pipeline.hpp"
#include "lxh/pv.hpp"
#include "lxh/reconstruction.hpp"
#include "lxh/scenario.hpp"

namespace {

using namespace lxh;

enum Exit { kOk = 0, kInput = 2, kNumerical = 3, kStage = 4 };

int exit_code(const Error& e) {
  if (dynamic_cast<const StageError*>(&e)) {
    switch (e.code()) {
      case Errc::numerical_failure:
      case Errc::converter_range_exceeded: return kNumerical;
      default: return kStage;
    }
  }
  switch (e.code()) {
    case Errc::numerical_failure:
    case Errc::converter_range_exceeded:
    case Errc::degenerate_training:
    case Errc::cannot_size: return kNumerical;
    case Errc::empty_result: return kStage;
    default: return kInput;
  }
}

Bounds parse_bounds(const std::string& text) {
  std::vector<double> v;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) v.push_back(csv::to_double(item, "--bounds"));
  if (v.size() != 4) fail(Errc::parse_error, "--bounds takes x0,x1,y0,y1");
  return {v[0], v[1], v[2], v[3]};
}

std::vector<PseudoSpectrum> read_timeline(const std::filesystem::path& path, std::vector<std::string>* truth) {
  const auto t = csv::read(path);
  const std::size_t cols[6] = {t.column("bb"), t.column("ir"), t.column("r"), t.column("g"), t.column("b"), t.column("lux")};
  const auto ts = t.column("timestamp");
  const bool has_truth = t.has_column("truth_class");
  std::vector<PseudoSpectrum> out;
  std::optional<long long> last;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const auto& row = t.rows[i];
    const std::string ctx = path.string() + " row " + std::to_string(i + 1);
    PseudoSpectrum ps;
    double* f[6] = {&ps.bb, &ps.ir, &ps.r, &ps.g, &ps.b, &ps.lux};
    for (int c = 0; c < 6; ++c) {
      *f[c] = csv::to_double(row[cols[c]], ctx);
      if (*f[c] < 0.0) fail(Errc::invalid_channel_value, ctx + ": negative channel value");
    }
    ps.timestamp = timefmt::parse_utc(row[ts]);
    if (last && *ps.timestamp <= *last) fail(Errc::invalid_timeline, ctx + ": timestamps must increase");
    last = ps.timestamp;
    out.push_back(ps);
    if (truth) truth->push_back(has_truth ? row[t.column("truth_class")] : std::string());
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Light-source recognition and indoor PV energy estimation"};
  app.require_subcommand(1);

  std::string scenario_path, out_path, dataset_path, method_name, config_id, norm_name = "none", model_path,
      bounds_text, input_path, samples_path, class_name, pipeline_path, out_dir, taxonomy_name, holdout_path;
  std::uint64_t seed = 1;
  std::uint64_t cv_seed = kDefaultCvSeed;
  std::size_t res = 100;
  int degree = 2;
  double days = 0.0;
  std::vector<std::size_t> dims = {0, 1};
  bool serial = false;

  auto* gen = app.add_subcommand("generate-dataset", "Sample a labeled pseudo-spectrum dataset from the twin");
  gen->add_option("--scenario", scenario_path, "Scenario JSON (twin and dataset plan)")->required();
  gen->add_option("--out", out_path, "Dataset CSV")->required();
  gen->add_option("--seed", seed, "Noise seed");
  gen->add_option("--taxonomy", taxonomy_name, "base or extended (default base)");

  auto* trn = app.add_subcommand("train", "Train one classifier and save it as JSON");
  trn->add_option("--dataset", dataset_path, "Dataset CSV")->required();
  trn->add_option("--method", method_name, "FineTree, MediumTree, CoarseTree, LinearDiscriminant, "
                                           "GaussianNaiveBayes, LinearSVM, FineKNN, MediumKNN, CoarseKNN, "
                                           "CosineKNN, CubicKNN, WeightedKNN")->required();
  trn->add_option("--config", config_id, "Feature configuration A..S")->required();
  trn->add_option("--norm", norm_name, "none, b, g, r, bb or ir");
  trn->add_option("--out", out_path, "Model JSON")->required();

  auto* swp = app.add_subcommand("sweep", "5-fold CV of every method x config x normalization");
  swp->add_option("--dataset", dataset_path, "Dataset CSV")->required();
  swp->add_option("--out", out_path, "Sweep report CSV")->required();
  swp->add_option("--seed", cv_seed, "Fold seed");
  swp->add_flag("--serial", serial, "Run cells one at a time");
  swp->add_option("--holdout", holdout_path, "Dataset CSV scored by every cell with CV accuracy 1");

  auto* srf = app.add_subcommand("surface", "Decision surface of a trained model over two features");
  srf->add_option("--model", model_path, "Model JSON")->required();
  srf->add_option("--bounds", bounds_text, "x0,x1,y0,y1")->required();
  srf->add_option("--res", res, "Cells per axis")->check(CLI::PositiveNumber);
  srf->add_option("--dims", dims, "Two feature indices (default 0 1)")->expected(2);
  srf->add_option("--out", out_path, "Surface CSV (x,y,class)")->required();

  auto* cls = app.add_subcommand("classify", "Classify every row of a timeline CSV");
  cls->add_option("--model", model_path, "Model JSON")->required();
  cls->add_option("--input", input_path, "Timeline CSV")->required();
  cls->add_option("--out", out_path, "Output CSV")->required();

  auto* fit = app.add_subcommand("fit-lux", "Fit a lux correction from (raw_lux, reference_lux) samples");
  fit->add_option("--samples", samples_path, "CSV with raw_lux,reference_lux")->required();
  fit->add_option("--class", class_name, "Light class the samples belong to")->required();
  fit->add_option("--degree", degree, "0 (constant factor), 1 or 2")->check(CLI::Range(0, 2));
  fit->add_option("--out", out_path, "Correction JSON")->required();

  auto* est = app.add_subcommand("estimate", "Run the end-to-end pipeline and write the report");
  est->add_option("--pipeline", pipeline_path, "Pipeline config JSON")->required();
  est->add_option("--out-dir", out_dir, "Report directory")->required();

  auto* sim = app.add_subcommand("simulate", "Simulate a scenario and write the sensor timeline");
  sim->add_option("--scenario", scenario_path, "Scenario JSON")->required();
  sim->add_option("--days", days, "Duration override in days");
  sim->add_option("--seed", seed, "Noise seed");
  sim->add_option("--out", out_path, "Timeline CSV")->required();

  auto* mkc = app.add_subcommand("make-converter", "Write the built-in GaAs-like converter and default chain");
  mkc->add_option("--out-dir", out_dir, "Output directory")->required();

  auto* lib = app.add_subcommand("export-library", "Write the twin reference spectra and corrections");
  lib->add_option("--scenario", scenario_path, "Scenario JSON whose twin calibrates the corrections");
  lib->add_option("--out-dir", out_dir, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kInput;
  }

  try {
    if (*gen) {
      const auto sc = load_scenario(scenario_path);
      const auto tax = taxonomy_name.empty() ? Taxonomy::base : parse_taxonomy(taxonomy_name);
      csv::write_text(out_path, dataset_csv(generate_dataset(sc.twin, tax, sc.dataset, seed)));
    } else if (*trn) {
      const auto ds = read_dataset_csv(dataset_path);
      if (config_id.size() != 1) fail(Errc::config_error, "--config takes one letter A..S");
      const auto config = make_config(config_id[0], parse_norm(norm_name));
      save_model(out_path, train(parse_method(method_name), ds, config));
    } else if (*swp) {
      const auto ds = read_dataset_csv(dataset_path);
      const Exec exec = serial ? Exec::serial : Exec::parallel;
      auto report = sweep(ds, kAllMethods, kAllNorms, 5, cv_seed, exec);
      if (!holdout_path.empty()) evaluate_perfect_cells(report, ds, read_dataset_csv(holdout_path, ds.taxonomy), exec);
      csv::write_text(out_path, report.csv());
      std::printf("perfect cells: none=%zu b=%zu g=%zu r=%zu bb=%zu ir=%zu\n", report.perfect_count(Norm::none),
                  report.perfect_count(Norm::b), report.perfect_count(Norm::g), report.perfect_count(Norm::r),
                  report.perfect_count(Norm::bb), report.perfect_count(Norm::ir));
    } else if (*srf) {
      const auto clf = load_model(model_path);
      const auto surface = decision_surface(clf, {dims.at(0), dims.at(1)}, parse_bounds(bounds_text), res);
      csv::write_text(out_path, surface_csv(surface));
    } else if (*cls) {
      const auto clf = load_model(model_path);
      std::vector<std::string> truth;
      const auto rows = read_timeline(input_path, &truth);
      std::string out = "timestamp,predicted_class,truth_class\n";
      for (std::size_t i = 0; i < rows.size(); ++i)
        out += timefmt::format_utc(*rows[i].timestamp) + "," + std::string(to_string(clf.predict(rows[i]))) + "," +
               truth[i] + "\n";
      csv::write_text(out_path, out);
    } else if (*fit) {
      const auto t = csv::read(samples_path);
      const auto rc = t.column("raw_lux"), fc = t.column("reference_lux");
      std::vector<LuxSample> samples;
      for (std::size_t i = 0; i < t.rows.size(); ++i) {
        const std::string ctx = samples_path + " row " + std::to_string(i + 1);
        samples.push_back({csv::to_double(t.rows[i][rc], ctx), csv::to_double(t.rows[i][fc], ctx)});
      }
      const auto cls_id = parse_light_class(class_name);
      csv::write_text(out_path, correction_json({{cls_id, fit_natural_correction(samples, degree)}}));
    } else if (*est) {
      const auto cfg = load_pipeline_config(pipeline_path);
      const auto report = run_pipeline(cfg);
      write_report(report, out_dir);
      std::fputs(csv::read_text(std::filesystem::path(out_dir) / "summary.txt").c_str(), stdout);
    } else if (*sim) {
      auto sc = load_scenario(scenario_path);
      if (days > 0.0) sc.duration_s = days * 86400.0;
      const auto steps = simulate(sc, seed);
      csv::write_text(out_path, timeline_csv_header(sc) + timeline_csv_rows(sc, steps));
    } else if (*mkc) {
      const std::filesystem::path dir(out_dir);
      write_eqe_csv(dir / "gaas_like_eqe.csv", gaas_like_eqe());
      write_dark_jv_csv(dir / "gaas_like_dark_jv.csv", gaas_like_dark_jv());
      csv::write_text(dir / "chain_default.json", chain_json(default_chain()));
    } else if (*lib) {
      const SensorTwin twin = scenario_path.empty() ? SensorTwin::default_twin() : load_scenario(scenario_path).twin;
      ReferenceLibrary::from_twin(twin).save(out_dir);
    }
  } catch (const Error& e) {
    std::fprintf(stderr, "lxh: %s\n", e.what());
    return exit_code(e);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "lxh: %s\n", e.what());
    return kInput;
  }
  return kOk;
}
