// Serial reference vs OpenMP versions of the data-parallel kernels.

#include <benchmark/benchmark.h>

#include "lxh/classifiers.hpp"
#include "lxh/pv.hpp"
#include "lxh/scenario.hpp"

namespace {

using namespace lxh;

const LabeledDataset& dataset() {
  static const LabeledDataset ds = generate_dataset(SensorTwin::default_twin(), Taxonomy::base, DatasetPlan{}, 1);
  return ds;
}

Scenario one_day() {
  Scenario s;
  s.taxonomy = Taxonomy::extended;
  Source led;
  led.label = "led_3000k";
  led.cls = LightClass::led_3000k;
  led.profile.type = Profile::Type::schedule;
  led.profile.intervals = {{8.0, 18.0, 300.0}};
  Source sun;
  sun.label = "natural";
  sun.auto_natural = true;
  sun.profile.type = Profile::Type::bell;
  sun.profile.start_h = 6.5;
  sun.profile.end_h = 19.5;
  sun.profile.peak_lux = 3000.0;
  s.sources = {led, sun};
  return s;
}

Exec exec_of(const benchmark::State& state) { return state.range(0) ? Exec::parallel : Exec::serial; }

void BM_Sweep(benchmark::State& state) {
  const Method methods[] = {Method::fine_knn, Method::weighted_knn, Method::medium_tree, Method::linear_discriminant};
  const Norm norms[] = {Norm::none, Norm::b};
  for (auto _ : state) benchmark::DoNotOptimize(sweep(dataset(), methods, norms, 5, kDefaultCvSeed, exec_of(state)));
}
BENCHMARK(BM_Sweep)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_SimulateDay(benchmark::State& state) {
  const Scenario s = one_day();
  for (auto _ : state) benchmark::DoNotOptimize(simulate(s, 7, exec_of(state)));
}
BENCHMARK(BM_SimulateDay)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_EstimateEnergy(benchmark::State& state) {
  const auto pv = synthetic_gaas_converter();
  const auto chain = default_chain();
  const auto steps = simulate(one_day(), 7);
  std::vector<double> t;
  std::vector<Spd> spectra;
  for (const auto& s : steps) {
    t.push_back(s.t_s);
    spectra.push_back(s.truth);
  }
  for (auto _ : state) benchmark::DoNotOptimize(estimate_energy(t, spectra, pv, chain, exec_of(state)));
}
BENCHMARK(BM_EstimateEnergy)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_PredictBatch(benchmark::State& state) {
  const auto config = make_config('I', Norm::b);
  const auto clf = train(Method::weighted_knn, dataset(), config);
  const auto queries = generate_dataset(SensorTwin::default_twin(), Taxonomy::base,
                                        DatasetPlan{{10, 30, 100, 300, 1000, 3000, 10000}, 40}, 9);
  const auto x = featurize(queries, config);
  for (auto _ : state) benchmark::DoNotOptimize(predict_batch(clf, x, exec_of(state)));
}
BENCHMARK(BM_PredictBatch)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
