// One PASS/FAIL line per acceptance criterion; exits non-zero if any fails.
#include <sys/wait.h>

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "lxh/classifiers.hpp"
#include "lxh/csv.hpp"
#include "lxh/error.hpp"
#include "lxh/features.hpp"
#include "lxh/knn.hpp"
#include "lxh/pipeline.hpp"
#include "lxh/pv.hpp"
#include "lxh/reconstruction.hpp"
#include "lxh/spectral.hpp"

using namespace lxh;
namespace fs = std::filesystem;

namespace {

const fs::path kData = LXH_DATA_DIR;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void criterion(int id, const char* title, double budget_s, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (budget_s > 0.0 && secs >= budget_s) {
    o.pass = false;
    o.detail += "; over the " + fmt(budget_s) + " s budget";
  }
  if (!o.pass) ++failures;
  std::printf("%s %2d %s: %s [%.2f s]\n", o.pass ? "PASS" : "FAIL", id, title, o.detail.c_str(), secs);
  std::fflush(stdout);
}

PipelineConfig default_config() { return load_pipeline_config(kData / "pipeline_default.json"); }

Outcome scale_invariance() {
  const SensorTwin twin = SensorTwin::default_twin().with_errors(SensorErrorModel::ideal());
  double worst = 0.0;
  std::size_t vectors = 0;
  for (LightClass cls : classes_of(Taxonomy::base)) {
    const Spd spd = reference_spd(cls);
    const auto base = twin.sense(spd, 0, cls);
    for (Norm norm : kAllNorms) {
      if (norm == Norm::none) continue;
      for (const auto& cfg : configs_for(norm)) {
        if (std::find(cfg.channels.begin(), cfg.channels.end(), Channel::lux) != cfg.channels.end()) continue;
        const auto ref = extract(base, cfg);
        for (double a : {0.1, 1.0, 10.0}) {
          const auto f = extract(twin.sense(spd.scaled(a), 0, cls), cfg);
          for (std::size_t i = 0; i < f.size(); ++i) worst = std::max(worst, std::abs(f[i] - ref[i]));
          ++vectors;
        }
      }
    }
  }
  return {worst <= 1e-9, std::to_string(vectors) + " vectors, max deviation " + fmt(worst)};
}

Outcome normalization_helps() {
  const auto ds = generate_dataset(SensorTwin::default_twin(), Taxonomy::base, DatasetPlan{}, 1);
  const auto report = sweep(ds, kAllMethods, kAllNorms);
  const auto raw = report.perfect_count(Norm::none);
  const auto blue = report.perfect_count(Norm::b);
  double fine_i = -1.0;
  for (const auto& c : report.cells)
    if (c.method == Method::fine_knn && c.config == 'I' && c.norm == Norm::b) fine_i = c.accuracy;
  return {blue > raw && fine_i == 1.0, "perfect cells raw " + std::to_string(raw) + ", blue " + std::to_string(blue) +
                                           "; FineKNN/I/blue " + fmt(fine_i) + " over " +
                                           std::to_string(report.cells.size()) + " cells"};
}

LightClass brute_vote(const FeatureMatrix& pts, const std::vector<LightClass>& labels, std::span<const double> q,
                      std::size_t k, bool weighted) {
  std::vector<std::pair<double, std::size_t>> d;
  for (std::size_t i = 0; i < pts.rows; ++i) {
    double s = 0.0;
    for (std::size_t c = 0; c < pts.cols; ++c) s += (pts.row(i)[c] - q[c]) * (pts.row(i)[c] - q[c]);
    d.emplace_back(std::sqrt(s), i);
  }
  std::stable_sort(d.begin(), d.end(), [](auto& a, auto& b) { return a.first < b.first; });
  bool exact = false;
  for (std::size_t j = 0; j < k; ++j) exact |= d[j].first == 0.0;
  std::array<double, kLightClassCount> votes{};
  for (std::size_t j = 0; j < k; ++j) {
    double w = 1.0;
    if (weighted) w = exact ? (d[j].first == 0.0 ? 1.0 : 0.0) : 1.0 / (d[j].first * d[j].first);
    votes[index_of(labels[d[j].second])] += w;
  }
  return static_cast<LightClass>(std::max_element(votes.begin(), votes.end()) - votes.begin());
}

Outcome knn_oracle() {
  std::mt19937_64 rng(2021);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const auto classes = classes_of(Taxonomy::base);
  std::uniform_int_distribution<std::size_t> lab(0, classes.size() - 1);
  FeatureMatrix pts;
  pts.cols = 4;
  std::vector<LightClass> labels;
  for (int i = 0; i < 500; ++i) {
    for (std::size_t c = 0; c < pts.cols; ++c) pts.values.push_back(u(rng));
    labels.push_back(classes[lab(rng)]);
    ++pts.rows;
  }
  std::size_t mismatches = 0, checks = 0;
  for (int q = 0; q < 1000; ++q) {
    std::vector<double> query(pts.cols);
    for (auto& v : query) v = u(rng);
    for (std::size_t k : {std::size_t{1}, std::size_t{10}})
      for (bool w : {false, true}) {
        mismatches += knn_vote(pts, labels, query, k, Metric::euclidean, w) != brute_vote(pts, labels, query, k, w);
        ++checks;
      }
  }
  return {mismatches == 0, std::to_string(mismatches) + " mismatches in " + std::to_string(checks) + " votes"};
}

Outcome cv_laws() {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 50.0);
  std::size_t violations = 0;
  const auto classes = classes_of(Taxonomy::base);
  for (int t = 0; t < 100; ++t) {
    const std::size_t n = 10 + static_cast<std::size_t>(rng() % 190);
    const std::size_t k = 2 + static_cast<std::size_t>(rng() % 9);
    LabeledDataset ds;
    for (std::size_t i = 0; i < n; ++i)
      ds.add(PseudoSpectrum{u(rng), u(rng), u(rng), u(rng), u(rng), u(rng), {}}, classes[rng() % classes.size()]);
    const auto folds = kfold_split(ds, k, static_cast<std::uint64_t>(t));
    std::vector<int> seen(n, 0);
    std::size_t lo = n, hi = 0;
    for (std::size_t f = 0; f < folds.size(); ++f) {
      for (auto i : folds[f]) ++seen[i];
      lo = std::min(lo, folds[f].size());
      hi = std::max(hi, folds[f].size());
      const auto tr = training_indices(folds, f, n);
      for (auto i : folds[f]) violations += std::find(tr.begin(), tr.end(), i) != tr.end();
      violations += tr.size() + folds[f].size() != n;
    }
    violations += std::count_if(seen.begin(), seen.end(), [](int c) { return c != 1; });
    violations += hi - lo > 1;
    violations += folds != kfold_split(ds, k, static_cast<std::uint64_t>(t));
  }
  return {violations == 0, "100 datasets, " + std::to_string(violations) + " violations"};
}

Outcome photometry() {
  // unit-area triangle spanning one grid step either side of 555 nm
  const Spd line({554.0, 555.0, 556.0}, {0.0, 1.0, 0.0});
  const double lux = illuminance(line);
  const double err = std::abs(lux - 683.0) / 683.0;
  const Spd s = reference_spd(LightClass::cfl_6500k);
  double lin = 0.0;
  for (double a : {1e-3, 0.7, 3.0, 1e4}) lin = std::max(lin, std::abs(illuminance(s.scaled(a)) / (a * illuminance(s)) - 1.0));
  return {err <= 0.005 && lin <= 1e-9, "555 nm gives " + fmt(lux) + " lx; linearity " + fmt(lin)};
}

Outcome mpp_correctness() {
  const PVConverter pv("gaas_like", read_eqe_csv(kData / "converters/gaas_like_eqe.csv"),
                       read_dark_jv_csv(kData / "converters/gaas_like_dark_jv.csv"), 10.0, 10.0);
  double worst = 0.0;
  for (double j : {0.01, 0.1, 1.0, 10.0}) {
    const double voc = open_circuit_voltage(j, pv);
    double grid = 0.0;
    for (int i = 0; i <= 100000; ++i) {
      const double v = voc * i / 100000.0;
      grid = std::max(grid, v * j_at(v, j, pv));
    }
    worst = std::max(worst, std::abs(mpp(j, pv).pmp / grid - 1.0));
  }
  const double jsc_a = 4.0, voc_a = 0.8;
  const PVConverter lin("linear", Tabulated({300.0, 900.0}, {1.0, 1.0}), Tabulated({0.0, 1.0}, {0.0, jsc_a / voc_a}),
                        1.0, 1.0);
  const auto p = mpp(jsc_a, lin);
  const double ev = std::abs(p.vmp / (voc_a / 2) - 1.0), ep = std::abs(p.pmp / (jsc_a * voc_a / 4) - 1.0);
  return {worst < 1e-3 && ev < 1e-6 && ep < 1e-6,
          "grid deviation " + fmt(worst) + "; analytic Vmp " + fmt(ev) + ", Pmp " + fmt(ep)};
}

Outcome superposition() {
  const PVConverter pv = synthetic_gaas_converter();
  const Spd day = reference_spd(LightClass::nltw_clear);
  const double j = jsc(day, pv);
  bool ok = j_at(0.0, j, pv) == j;
  for (int mv = 1; mv <= 1300; ++mv) ok &= j_at(mv / 1000.0, j, pv) <= j_at((mv - 1) / 1000.0, j, pv);
  double prev = 0.0;
  std::size_t points = 0;
  for (double a = 1e-3; a <= 100.0; a *= 1.2, ++points) {
    const double p = mpp(jsc(day.scaled(a), pv), pv).pmp;
    ok &= p >= prev;
    prev = p;
  }
  return {ok, "J(0) = Jsc = " + fmt(j) + " mA/cm2 at 1000 lx; 1301-point J-V and " + std::to_string(points) +
                  "-point Pmp sweep monotone"};
}

Outcome lux_correction() {
  const SensorTwin& twin = SensorTwin::default_twin();
  const LuxCorrection corr = calibrate_corrections(twin);
  bool ok = true;
  std::string detail;
  for (std::size_t i = 1; i < kLightClassCount; ++i) {
    const auto cls = static_cast<LightClass>(i);
    const auto& e = corr.entries.at(cls);
    double before = 0.0, after = 0.0, rel = 0.0;
    std::size_t n = 0;
    for (const auto& s : twin_lux_samples(twin, cls, 1.0, 30000.0, 200)) {
      if (s.raw < e.range_lo || s.raw > e.range_hi) continue;
      const double c = correct_lux(s.raw, cls, corr).lux;
      before += std::abs(s.raw - s.reference);
      after += std::abs(c - s.reference);
      rel = std::max(rel, std::abs(c - s.reference) / s.reference);
      ++n;
    }
    if (is_natural(cls)) {
      const double ratio = after > 0.0 ? before / after : INFINITY;
      ok &= n > 0 && ratio >= 5.0;
      detail += std::string(to_string(cls)) + " x" + fmt(ratio) + " ";
    } else {
      ok &= n > 0 && rel < 0.01;
      detail += std::string(to_string(cls)) + " " + fmt(100.0 * rel) + "% ";
    }
  }
  detail.pop_back();
  return {ok, detail};
}

Outcome switching() {
  auto cfg = default_config();
  cfg.scenario = kData / "scenarios/two_source_day.json";
  const auto r = run_pipeline(cfg);
  if (!r.switching.mean_percent) return {false, "no source transitions recognized"};
  const double m = *r.switching.mean_percent;
  std::string detail = "mean " + fmt(m) + "% over " + std::to_string(r.switching.events.size()) + " transitions (";
  for (const auto& e : r.switching.events)
    detail += r.fraction_names[e.from_source].substr(5) + "->" + r.fraction_names[e.to_source].substr(5) + " at " +
              fmt(100.0 * e.outgoing_fraction) + "%, ";
  detail.resize(detail.size() - 2);
  detail += ")";
  return {m >= 40.0 && m <= 60.0, detail};
}

Outcome end_to_end() {
  const auto r = run_pipeline(default_config());
  return {r.days.size() == 16 && r.mean_daily_error_pct < 5.0 && r.cumulative_error_pct < 5.0,
          std::to_string(r.days.size()) + " days, mean daily error " + fmt(r.mean_daily_error_pct) +
              "%, cumulative " + fmt(r.cumulative_error_pct) + "%"};
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(LXH_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

Outcome determinism() {
  const fs::path root = fs::temp_directory_path() / "lxh_acceptance_determinism";
  fs::remove_all(root);
  const std::string cfg = (kData / "pipeline_default.json").string();
  for (const char* run : {"a", "b"})
    if (const int code = run_cli("estimate --pipeline " + cfg + " --out-dir " + (root / run).string()); code != 0)
      return {false, "estimate exited with " + std::to_string(code)};
  std::size_t files = 0, differ = 0;
  for (const auto& entry : fs::directory_iterator(root / "a")) {
    ++files;
    const fs::path other = root / "b" / entry.path().filename();
    differ += !fs::exists(other) || csv::read_text(entry.path()) != csv::read_text(other);
  }
  fs::remove_all(root);
  return {files > 0 && differ == 0, std::to_string(files) + " files compared, " + std::to_string(differ) + " differ"};
}

Outcome sizing() {
  const PVConverter pv = synthetic_gaas_converter(10.0, 1.0);
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(-4.0, 0.0);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double target = std::pow(10.0, u(rng)), avg = std::pow(10.0, u(rng)), a = std::pow(10.0, u(rng) + 2.0);
    const double base = recommend_area(target, avg, pv).area_cm2;
    worst = std::max(worst, std::abs(recommend_area(a * target, avg, pv).area_cm2 / (a * base) - 1.0));
    worst = std::max(worst, std::abs(recommend_area(target, a * avg, pv).area_cm2 * a / base - 1.0));
  }
  auto cfg = default_config();
  cfg.scenario = kData / "scenarios/bright_office.json";
  const auto r = run_pipeline(cfg);
  std::string context = "bright office: no sizing";
  if (r.sizing) {
    const bool in_range = r.sizing->area_cm2 >= 100.0 && r.sizing->area_cm2 <= 1000.0;
    context = "bright office 10 mW target needs " + fmt(r.sizing->area_cm2) + " cm2 (" +
              (in_range ? "inside" : "outside") + " 1e2..1e3, context only)";
  }
  return {worst < 1e-12, "linearity deviation " + fmt(worst) + "; " + context};
}

}  // namespace

int main() {
  criterion(1, "scale invariance", 1.0, scale_invariance);
  criterion(2, "normalization helps", 30.0, normalization_helps);
  criterion(3, "KNN oracle equivalence", 0.0, knn_oracle);
  criterion(4, "cross-validation laws", 0.0, cv_laws);
  criterion(5, "photometry", 0.0, photometry);
  criterion(6, "MPP correctness", 0.0, mpp_correctness);
  criterion(7, "superposition sanity", 0.0, superposition);
  criterion(8, "lux-correction efficacy", 0.0, lux_correction);
  criterion(9, "switching ratio", 10.0, switching);
  criterion(10, "end-to-end energy error", 120.0, end_to_end);
  criterion(11, "determinism", 0.0, determinism);
  criterion(12, "sizing arithmetic", 0.0, sizing);
  std::printf("%d of 12 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
