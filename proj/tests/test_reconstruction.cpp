#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "lxh/error.hpp"
#include "lxh/reconstruction.hpp"

using namespace lxh;

namespace {

const LightClass kNatural[] = {LightClass::nltw_clear, LightClass::nltw_cloudy, LightClass::sunrise,
                               LightClass::sunset,     LightClass::daylight,    LightClass::strong_daylight};

const LuxCorrection& twin_correction() {
  static const LuxCorrection c = calibrate_corrections(SensorTwin::default_twin());
  return c;
}

}  // namespace

TEST_SUITE("reconstruction") {
  TEST_CASE("constant and polynomial corrections") {
    LuxCorrection c;
    c.entries[LightClass::cfl_6500k] = CorrectionEntry{CorrectionEntry::Type::constant, 1.0 / 1.3, {}, 0, 0, 0};
    c.entries[LightClass::daylight] = CorrectionEntry{CorrectionEntry::Type::poly, 1.0, {10.0, 2.0, 0.01}, 0, 100, 0};
    CHECK(correct_lux(130.0, LightClass::cfl_6500k, c).lux == doctest::Approx(100.0));
    const auto in = correct_lux(50.0, LightClass::daylight, c);
    CHECK(in.lux == doctest::Approx(10.0 + 100.0 + 25.0));
    CHECK_FALSE(in.clamped);
    const auto out = correct_lux(400.0, LightClass::daylight, c);
    CHECK(out.clamped);
    CHECK(out.lux == doctest::Approx(10.0 + 200.0 + 100.0));
    CHECK(correct_lux(123.0, LightClass::dark, c).lux == 0.0);
    try {
      correct_lux(10.0, LightClass::led_3000k, c);
      FAIL("expected missing correction");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::missing_correction);
    }
    CHECK_THROWS_AS(correct_lux(-1.0, LightClass::cfl_6500k, c), Error);
  }

  TEST_CASE("fits recover exact relations") {
    std::vector<LuxSample> linear, quad, ratio;
    for (int i = 1; i <= 20; ++i) {
      const double r = 10.0 * i;
      linear.push_back({r, 1.25 * r + 3.0});
      quad.push_back({r, 0.002 * r * r + 0.5 * r + 1.0});
      ratio.push_back({r, r * (i % 2 ? 0.8 : 1.0)});
    }
    const auto l = fit_natural_correction(linear, 1);
    CHECK(l.coeffs[1] == doctest::Approx(1.25));
    CHECK(l.coeffs[0] == doctest::Approx(3.0));
    CHECK(l.range_lo == 10.0);
    CHECK(l.range_hi == 200.0);
    const auto q = fit_natural_correction(quad, 2);
    CHECK(q.coeffs[2] == doctest::Approx(0.002));
    CHECK(q.rms < 1e-9);
    const auto c = fit_natural_correction(ratio, 0);
    CHECK(c.type == CorrectionEntry::Type::constant);
    CHECK(c.factor == doctest::Approx(0.9));
  }

  TEST_CASE("degenerate fits fail") {
    const std::vector<LuxSample> same{{5, 10}, {5, 11}, {5, 12}};
    try {
      fit_natural_correction(same, 2);
      FAIL("expected numerical failure");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::numerical_failure);
    }
    const std::vector<LuxSample> falling{{1, 10}, {2, 8}, {3, 6}};
    CHECK_THROWS_AS(fit_natural_correction(falling, 1), Error);
    CHECK_THROWS_AS(fit_natural_correction(same, 3), Error);
  }

  TEST_CASE("twin corrections undo the bias") {
    const auto& corr = twin_correction();
    for (LightClass cls : {LightClass::led_3000k, LightClass::led_4000k, LightClass::cfl_2700k, LightClass::cfl_6500k}) {
      for (const auto& s : twin_lux_samples(SensorTwin::default_twin(), cls, 5.0, 4000.0, 15))
        CHECK(std::abs(correct_lux(s.raw, cls, corr).lux / s.reference - 1.0) < 1e-9);
    }
    for (const auto& s : twin_lux_samples(SensorTwin::default_twin(), LightClass::daylight, 200.0, 2500.0, 15)) {
      const double ratio = correct_lux(s.raw, LightClass::daylight, corr).lux / s.reference;
      CHECK(ratio > 0.95);
      CHECK(ratio < 1.05);
    }
  }

  TEST_CASE("quadratic corrections shrink natural error") {
    const auto& corr = twin_correction();
    for (LightClass cls : kNatural) {
      CAPTURE(to_string(cls));
      const auto& e = corr.entries.at(cls);
      const auto samples = twin_lux_samples(SensorTwin::default_twin(), cls, 1.0, 30000.0, 120);
      double before = 0.0, after = 0.0;
      for (const auto& s : samples) {
        if (s.raw < e.range_lo || s.raw > e.range_hi) continue;
        before += std::abs(s.raw - s.reference);
        after += std::abs(correct_lux(s.raw, cls, corr).lux - s.reference);
      }
      CHECK(after * 5.0 <= before);
    }
  }

  TEST_CASE("reconstruction reproduces the corrected lux") {
    const auto lib = ReferenceLibrary::from_twin(SensorTwin::default_twin());
    for (double lux : {10.0, 200.0, 1500.0}) {
      const Spd s = reconstruct(LightClass::led_4000k, lux, lib);
      CHECK(illuminance(s) == doctest::Approx(lux).epsilon(1e-9));
      const Spd ref = *lib.find(LightClass::led_4000k);
      CHECK(s.at(550.0) / ref.at(550.0) == doctest::Approx(lux / illuminance(ref)));
    }
    CHECK(integrate(reconstruct(LightClass::dark, 500.0, lib)) == 0.0);
    const ReferenceLibrary empty;
    try {
      reconstruct(LightClass::cfl_2700k, 100.0, empty);
      FAIL("expected missing reference");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::missing_reference);
    }
  }

  TEST_CASE("natural sub-class refinement") {
    const SensorTwin twin = SensorTwin::default_twin();
    const auto ext = generate_dataset(twin, Taxonomy::extended, DatasetPlan{}, 5);
    const auto clf = train(Method::weighted_knn, ext, make_config('R', Norm::b));
    const auto& corr = twin_correction();
    const SensorTwin quiet = twin.with_errors([&] {
      auto e = twin.errors();
      e.noise_std = 0.0;
      return e;
    }());
    const auto sense = [&](LightClass cls, double lux) {
      return quiet.sense(reference_spd(cls).scaled(lux / kReferenceLux), 0, cls);
    };
    CHECK(classify_natural_subclass(sense(LightClass::daylight, 2500.0), LightClass::nltw_clear, clf, corr) ==
          LightClass::strong_daylight);
    CHECK(classify_natural_subclass(sense(LightClass::daylight, 400.0), LightClass::nltw_clear, clf, corr) ==
          LightClass::daylight);
    CHECK(classify_natural_subclass(sense(LightClass::sunset, 100.0), LightClass::nltw_cloudy, clf, corr) ==
          LightClass::sunset);
    try {
      classify_natural_subclass(sense(LightClass::led_3000k, 300.0), LightClass::led_3000k, clf, corr);
      FAIL("expected taxonomy error");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::taxonomy_error);
    }
    const auto base = train(Method::fine_knn, generate_dataset(twin, Taxonomy::base, DatasetPlan{}, 5),
                            make_config('R', Norm::b));
    CHECK_THROWS_AS(classify_natural_subclass(sense(LightClass::daylight, 400.0), LightClass::nltw_clear, base, corr),
                    Error);
  }

  TEST_CASE("library save and load") {
    const auto dir = std::filesystem::temp_directory_path() / "lxh_library_test";
    std::filesystem::remove_all(dir);
    const auto lib = ReferenceLibrary::from_twin(SensorTwin::default_twin());
    lib.save(dir);
    const auto back = ReferenceLibrary::load(dir / "manifest.json");
    CHECK(back.spectra().size() == lib.spectra().size());
    for (const auto& [cls, e] : lib.correction().entries) {
      const auto& b = back.correction().entries.at(cls);
      CHECK(b.evaluate(321.0) == doctest::Approx(e.evaluate(321.0)).epsilon(1e-9));
    }
    CHECK(illuminance(*back.find(LightClass::sunrise)) ==
          doctest::Approx(illuminance(*lib.find(LightClass::sunrise))).epsilon(1e-9));
    std::filesystem::remove_all(dir);
    CHECK_THROWS_AS(parse_correction_json(R"({"daylight": {"type": "poly", "params": [1, 2]}})"), Error);
    CHECK_THROWS_AS(parse_correction_json(R"({"daylight": {"type": "cubic", "params": [1]}})"), Error);
  }

  TEST_CASE("sense, correct and reconstruct closes the loop") {
    const SensorTwin twin = SensorTwin::default_twin();
    const auto lib = ReferenceLibrary::from_twin(twin);
    // a quadratic cannot follow the low-lux natural bias, so natural light is checked where it is bright
    const std::pair<LightClass, std::vector<double>> cases[] = {{LightClass::led_3000k, {5.0, 50.0, 1200.0}},
                                                                {LightClass::cfl_6500k, {5.0, 50.0, 1200.0}},
                                                                {LightClass::nltw_clear, {300.0, 1200.0, 4000.0}}};
    for (const auto& [cls, levels] : cases) {
      for (double lux : levels) {
        const Spd truth = reference_spd(cls).scaled(lux / kReferenceLux);
        const auto ps = twin.sense(truth, 3, cls);
        const Spd rec = reconstruct(cls, correct_lux(ps.lux, cls, lib.correction()).lux, lib);
        CAPTURE(to_string(cls));
        CAPTURE(lux);
        CHECK(std::abs(integrate(rec) / integrate(truth) - 1.0) < 0.05);
      }
    }
  }
}
