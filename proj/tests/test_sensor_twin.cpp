#include <doctest.h>

#include <cmath>
#include <numeric>

#include "lxh/error.hpp"
#include "lxh/scenario.hpp"
#include "lxh/sensor_twin.hpp"

using namespace lxh;

namespace {

const LightClass kBaseClasses[] = {LightClass::led_3000k,  LightClass::led_4000k,  LightClass::cfl_2700k,
                                   LightClass::cfl_6500k,  LightClass::nltw_clear, LightClass::nltw_cloudy};

SensorTwin ideal_twin() { return SensorTwin::default_twin().with_errors(SensorErrorModel::ideal()); }

// gain * trapezoid of resp * E on a 1 nm grid, written out independently
double channel_oracle(const Spd& spd, const ChannelResponsivity& resp) {
  const double lo = std::ceil(std::max(spd.wavelengths().front(), resp.band.front_x()));
  const double hi = std::floor(std::min(spd.wavelengths().back(), resp.band.back_x()));
  double sum = 0.0;
  for (double l = lo; l < hi; l += 1.0)
    sum += 0.5 * (resp.band.at(l) * spd.at(l) + resp.band.at(l + 1.0) * spd.at(l + 1.0));
  return resp.gain * sum;
}

}  // namespace

TEST_SUITE("sensor_twin") {
  TEST_CASE("reference spectra are normalized") {
    for (LightClass cls : kBaseClasses) {
      CAPTURE(to_string(cls));
      CHECK(illuminance(reference_spd(cls)) == doctest::Approx(kReferenceLux).epsilon(1e-9));
    }
    CHECK(integrate(reference_spd(LightClass::dark)) == 0.0);
  }

  TEST_CASE("channel values match an independent quadrature") {
    const Spd spd = reference_spd(LightClass::cfl_6500k);
    for (const auto& resp : SensorTwin::default_twin().channels())
      CHECK(channel_value(spd, resp) == doctest::Approx(channel_oracle(spd, resp)).epsilon(1e-9));
  }

  TEST_CASE("counts are linear in intensity") {
    const auto& twin = SensorTwin::default_twin();
    for (LightClass cls : kBaseClasses) {
      const Spd spd = reference_spd(cls);
      const auto one = twin.counts(spd);
      const auto ten = twin.counts(spd.scaled(10.0));
      for (std::size_t c = 0; c < 5; ++c) CHECK(ten[c] == doctest::Approx(10.0 * one[c]).epsilon(1e-12));
    }
  }

  TEST_CASE("calibrated lux formula tracks illuminance") {
    const auto& twin = SensorTwin::default_twin();
    for (LightClass cls : kBaseClasses) {
      CAPTURE(to_string(cls));
      const double raw = twin.raw_lux(reference_spd(cls));
      CHECK(std::abs(raw - kReferenceLux) / kReferenceLux < 0.25);
    }
  }

  TEST_CASE("lux formula segments") {
    LuxFormula f;
    f.breakpoints = {0.25, 0.5, 0.75, 1.0};
    for (std::size_t s = 0; s < 5; ++s) f.coeffs[s] = {double(s + 1), 0.0};
    CHECK(f.segment(100.0, 10.0) == 0);
    CHECK(f.segment(100.0, 60.0) == 2);
    CHECK(f.evaluate(100.0, 60.0) == doctest::Approx(300.0));
    CHECK(f.evaluate(0.0, 0.0) == 0.0);
    CHECK(f.evaluate(100.0, 200.0) >= 0.0);
  }

  TEST_CASE("ideal twin senses counts and lux exactly") {
    const SensorTwin twin = ideal_twin();
    const Spd spd = reference_spd(LightClass::led_4000k).scaled(0.3);
    const auto ps = twin.sense(spd, 7, LightClass::led_4000k);
    const auto c = twin.counts(spd);
    CHECK(ps.bb == c[0]);
    CHECK(ps.ir == c[1]);
    CHECK(ps.b == c[4]);
    CHECK(ps.lux == doctest::Approx(twin.raw_lux(spd)));
  }

  TEST_CASE("biases multiply the lux estimate only") {
    SensorErrorModel errors = SensorErrorModel::ideal();
    errors.constant_bias[LightClass::cfl_2700k] = 1.3;
    const SensorTwin twin = SensorTwin::default_twin().with_errors(errors);
    const Spd spd = reference_spd(LightClass::cfl_2700k);
    const auto ps = twin.sense(spd, 1, LightClass::cfl_2700k);
    CHECK(ps.lux == doctest::Approx(1.3 * twin.raw_lux(spd)));
    CHECK(ps.bb == twin.counts(spd)[0]);
  }

  TEST_CASE("natural bias relaxes toward the low-lux value") {
    const NaturalBias bias{1.1, 2.0, 100.0};
    CHECK(bias.at(1e6) == doctest::Approx(1.1).epsilon(1e-6));
    CHECK(bias.at(0.0) == doctest::Approx(2.0));
    CHECK(bias.at(50.0) > bias.at(500.0));
  }

  TEST_CASE("noise is seeded and of the configured size") {
    const auto& twin = SensorTwin::default_twin();
    const Spd spd = reference_spd(LightClass::nltw_clear);
    const auto a = twin.sense(spd, 42, LightClass::nltw_clear);
    const auto b = twin.sense(spd, 42, LightClass::nltw_clear);
    const auto c = twin.sense(spd, 43, LightClass::nltw_clear);
    CHECK(a.bb == b.bb);
    CHECK(a.b == b.b);
    CHECK(a.bb != c.bb);
    // relative spread over many draws
    const double ref = twin.counts(spd)[0];
    double sq = 0.0;
    const int n = 4000;
    for (int i = 0; i < n; ++i) {
      const double d = twin.sense(spd, static_cast<std::uint64_t>(i), LightClass::nltw_clear).bb / ref - 1.0;
      sq += d * d;
    }
    CHECK(std::sqrt(sq / n) == doctest::Approx(twin.errors().noise_std).epsilon(0.1));
  }

  TEST_CASE("pseudo-spectrum accessors") {
    PseudoSpectrum ps{1, 2, 3, 4, 5, 6, {}};
    CHECK(ps.get(Channel::ir) == 2);
    CHECK(ps.get(Channel::lux) == 6);
    CHECK(ps.scaled(2.0).g == 8);
    CHECK(parse_channel("bb") == Channel::bb);
    CHECK_THROWS_AS(parse_channel("UV"), Error);
  }
}

TEST_SUITE("sensor_twin") {
  TEST_CASE("scenario timeline is reproducible across execution modes and chunks") {
    Scenario sc = parse_scenario(R"({
      "duration_s": 7200, "step_s": 60, "taxonomy": "extended",
      "sources": [
        {"class": "led_3000k", "profile": {"type": "constant", "params": {"lux": 300}}},
        {"class": "natural", "profile": {"type": "bell", "params": {"start_h": 0, "end_h": 4, "peak_lux": 2000}}}
      ]})");
    REQUIRE(sc.step_count() == 120);
    const auto serial = simulate(sc, 9, Exec::serial);
    const auto parallel = simulate(sc, 9, Exec::parallel);
    const auto tail = simulate(sc, 9, 60, 60, Exec::serial);
    REQUIRE(serial.size() == 120);
    for (std::size_t i = 0; i < serial.size(); ++i) {
      CHECK(serial[i].sensed.bb == parallel[i].sensed.bb);
      CHECK(serial[i].sensed.lux == parallel[i].sensed.lux);
      const double total = std::accumulate(serial[i].fractions.begin(), serial[i].fractions.end(), 0.0);
      CHECK(total == doctest::Approx(1.0));
    }
    for (std::size_t i = 0; i < tail.size(); ++i) {
      CHECK(tail[i].index == 60 + i);
      CHECK(tail[i].sensed.ir == serial[60 + i].sensed.ir);
    }
    CHECK(timeline_csv_rows(sc, serial) == timeline_csv_rows(sc, parallel));
  }

  TEST_CASE("bell profile shape") {
    Profile p;
    p.type = Profile::Type::bell;
    p.start_h = 6.0;
    p.end_h = 18.0;
    p.peak_lux = 1000.0;
    CHECK(p.lux_at(12 * 3600.0, 1, 0) == doctest::Approx(1000.0));
    CHECK(p.lux_at(5 * 3600.0, 1, 0) == 0.0);
    CHECK(p.lux_at(9 * 3600.0, 1, 0) == doctest::Approx(500.0));
    CHECK(p.peak_hour() == doctest::Approx(12.0));
  }

  TEST_CASE("bad scenarios are rejected") {
    CHECK_THROWS_AS(parse_scenario("{"), Error);
    CHECK_THROWS_AS(parse_scenario(R"({"sources": [{"class": "plasma"}]})"), Error);
  }
}
