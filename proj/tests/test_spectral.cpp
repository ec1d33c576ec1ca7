#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <vector>

#include "lxh/error.hpp"
#include "lxh/spectral.hpp"

using namespace lxh;

namespace {

Spd flat(double first, double last, double value) {
  auto grid = uniform_grid(first, last);
  return Spd(grid, std::vector<double>(grid.size(), value));
}

// triangle of unit area centred on nm
Spd line_at(double nm, double half_width) {
  std::vector<double> x, y;
  for (double l = nm - half_width; l <= nm + half_width + 1e-9; l += 0.25) {
    x.push_back(l);
    y.push_back((half_width - std::abs(l - nm)) / (half_width * half_width));
  }
  return Spd(x, y);
}

}  // namespace

TEST_SUITE("spectral_core") {
  TEST_CASE("tabulated validation") {
    CHECK_THROWS_AS(Tabulated({1.0}, {1.0}), Error);
    CHECK_THROWS_AS(Tabulated({1.0, 2.0}, {1.0}), Error);
    try {
      Tabulated({1.0, 1.0, 2.0}, {0.0, 0.0, 0.0});
      FAIL("expected invalid grid");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::invalid_grid);
    }
    CHECK_THROWS_AS(Spd({1.0, 2.0}, {1.0, -1.0}), Error);
    CHECK_THROWS_AS(Tabulated({1.0, 2.0}, {NAN, 0.0}), Error);
  }

  TEST_CASE("interpolation is linear inside and zero outside") {
    Tabulated t({400.0, 500.0, 700.0}, {0.0, 2.0, 1.0});
    CHECK(t.at(450.0) == doctest::Approx(1.0));
    CHECK(t.at(600.0) == doctest::Approx(1.5));
    CHECK(t.at(399.0) == 0.0);
    CHECK(t.at(701.0) == 0.0);
    CHECK(t.at(700.0) == doctest::Approx(1.0));
  }

  TEST_CASE("trapezoid on a triangle is exact") {
    // peak 2 at 500 nm, base 400..600: area 200
    Spd tri({400.0, 500.0, 600.0}, {0.0, 2.0, 0.0});
    CHECK(integrate(tri) == doctest::Approx(200.0).epsilon(1e-12));
    CHECK(integrate(flat(400, 700, 1.0)) == doctest::Approx(300.0));
  }

  TEST_CASE("resample keeps nodes and zero-extends") {
    Spd s({400.0, 410.0}, {1.0, 3.0});
    auto r = resample(s, std::vector<double>{395.0, 400.0, 405.0, 410.0, 415.0});
    const auto y = r.irradiance();
    CHECK(y[0] == 0.0);
    CHECK(y[1] == 1.0);
    CHECK(y[2] == doctest::Approx(2.0));
    CHECK(y[3] == 3.0);
    CHECK(y[4] == 0.0);
  }

  TEST_CASE("photopic table peaks at 555 nm") {
    CHECK(photopic::table().size() == 471);
    CHECK(photopic::at(555.0) == doctest::Approx(1.0));
    CHECK(photopic::at(359.0) == 0.0);
    CHECK(photopic::at(831.0) == 0.0);
    CHECK(photopic::at(650.0) == doctest::Approx(0.107).epsilon(0.01));
  }

  TEST_CASE("1 W/m2 at 555 nm is 683 lx") {
    const double lux = illuminance(line_at(555.0, 1.0));
    CHECK(std::abs(lux - 683.0) / 683.0 < 0.005);
  }

  TEST_CASE("illuminance of a flat spectrum matches the table sum") {
    // trapezoid of V over 360..830 at 1 nm, by hand from the table
    const auto v = photopic::table();
    double sum = 0.0;
    for (std::size_t i = 1; i < v.size(); ++i) sum += 0.5 * (v[i] + v[i - 1]);
    CHECK(illuminance(flat(300, 900, 1.0)) == doctest::Approx(kLuminousEfficacy * sum).epsilon(1e-12));
  }

  TEST_CASE("illuminance and integral are linear") {
    const Spd s({380.0, 500.0, 640.0, 780.0}, {0.2, 1.3, 0.7, 0.1});
    for (double a : {0.1, 2.0, 37.5}) {
      CHECK(std::abs(illuminance(s.scaled(a)) - a * illuminance(s)) <= 1e-9 * a * illuminance(s));
      CHECK(std::abs(integrate(s.scaled(a)) - a * integrate(s)) <= 1e-9 * a * integrate(s));
    }
  }

  TEST_CASE("scale_to_lux") {
    const Spd s = flat(380, 780, 0.01);
    CHECK(illuminance(scale_to_lux(s, 250.0)) == doctest::Approx(250.0).epsilon(1e-12));
    CHECK(integrate(scale_to_lux(s, 0.0)) == 0.0);
    CHECK_THROWS_AS(scale_to_lux(s, -1.0), Error);
    try {
      scale_to_lux(flat(900, 1000, 1.0), 10.0);
      FAIL("expected degenerate spectrum");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::degenerate_spectrum);
    }
  }

  TEST_CASE("mix is additive") {
    const Spd a({400.0, 500.0, 600.0}, {1.0, 2.0, 1.0});
    const Spd b({450.0, 550.0, 650.0, 750.0}, {0.5, 0.5, 3.0, 0.0});
    const std::vector<Spd> parts = {a, b};
    const std::vector<double> w = {2.0, 0.5};
    const Spd m = mix(parts, w);
    CHECK(m.at(525.0) == doctest::Approx(2.0 * a.at(525.0) + 0.5 * b.at(525.0)));
    CHECK(illuminance(m) == doctest::Approx(2.0 * illuminance(a) + 0.5 * illuminance(b)).epsilon(1e-9));
    CHECK_THROWS_AS(mix(parts, std::vector<double>{1.0}), Error);
  }

  TEST_CASE("SPD CSV round trip") {
    const auto path = std::filesystem::temp_directory_path() / "lxh_spd_roundtrip.csv";
    const Spd s({400.0, 401.5, 403.0}, {0.125, 2.5, 0.0});
    write_spd_csv(path, s);
    const Spd r = read_spd_csv(path);
    REQUIRE(r.size() == 3);
    CHECK(r.wavelengths()[1] == 401.5);
    CHECK(r.irradiance()[1] == 2.5);
    std::filesystem::remove(path);
  }
}
