#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "lxh/error.hpp"
#include "lxh/pv.hpp"

using namespace lxh;

namespace {

const std::filesystem::path kData = LXH_DATA_DIR;

PVConverter shipped_converter() {
  return PVConverter("gaas_like", read_eqe_csv(kData / "converters/gaas_like_eqe.csv"),
                     read_dark_jv_csv(kData / "converters/gaas_like_dark_jv.csv"), 10.0, 10.0);
}

// dark current linear in v: J = jsc (1 - v / voc)
PVConverter linear_converter(double jsc, double voc) {
  return PVConverter("linear", Tabulated({300.0, 900.0}, {1.0, 1.0}), Tabulated({0.0, 2.0 * voc}, {0.0, 2.0 * jsc}),
                     1.0, 1.0);
}

double grid_pmp(double jsc_value, const PVConverter& pv, int points) {
  const double voc = open_circuit_voltage(jsc_value, pv);
  double best = 0.0;
  for (int i = 0; i <= points; ++i) {
    const double v = voc * i / points;
    best = std::max(best, v * j_at(v, jsc_value, pv));
  }
  return best;
}

}  // namespace

TEST_SUITE("pv_energy") {
  TEST_CASE("Jsc closed form for a flat spectrum") {
    auto grid = uniform_grid(400.0, 700.0);
    const PVConverter pv("unit", Tabulated(grid, std::vector<double>(grid.size(), 1.0)), gaas_like_dark_jv(), 1.0, 1.0);
    const Spd flat(uniform_grid(300.0, 900.0), std::vector<double>(601, 1.0));
    // q / (h c) * integral of lambda over 400..700 nm, W/m^2 -> mA/cm^2
    const double expected = 1.602176634e-19 / (6.62607015e-34 * 299792458.0) * (700.0 * 700.0 - 400.0 * 400.0) / 2.0 *
                            1e-9 * 0.1;
    CHECK(jsc(flat, pv) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(expected == doctest::Approx(13.308).epsilon(1e-4));
  }

  TEST_CASE("Jsc is linear and additive") {
    const PVConverter pv = synthetic_gaas_converter();
    const Spd a({400.0, 600.0, 800.0}, {0.0, 0.5, 0.0});
    const Spd b({350.0, 500.0, 700.0, 950.0}, {0.0, 0.3, 0.1, 0.0});
    CHECK(jsc(a.scaled(3.0), pv) == doctest::Approx(3.0 * jsc(a, pv)).epsilon(1e-12));
    const std::vector<Spd> parts{a, b};
    const std::vector<double> w{1.0, 1.0};
    CHECK(jsc(mix(parts, w), pv) == doctest::Approx(jsc(a, pv) + jsc(b, pv)).epsilon(1e-9));
  }

  TEST_CASE("superposition curve") {
    const PVConverter pv = synthetic_gaas_converter();
    CHECK(j_at(0.0, 2.5, pv) == 2.5);
    double prev = j_at(0.0, 2.5, pv);
    for (int mv = 1; mv <= 1300; ++mv) {
      const double j = j_at(mv / 1000.0, 2.5, pv);
      CHECK(j <= prev);
      prev = j;
    }
    try {
      j_at(1.5, 1.0, pv);
      FAIL("expected out of range");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::out_of_range);
    }
    CHECK(std::abs(j_at(open_circuit_voltage(2.5, pv), 2.5, pv)) < 1e-9);
  }

  TEST_CASE("analytic MPP") {
    for (double jsc_value : {0.5, 3.0, 40.0}) {
      const PVConverter pv = linear_converter(jsc_value, 0.9);
      const auto p = mpp(jsc_value, pv);
      CHECK(p.voc == doctest::Approx(0.9).epsilon(1e-9));
      CHECK(std::abs(p.vmp / 0.45 - 1.0) < 1e-6);
      CHECK(std::abs(p.pmp / (jsc_value * 0.9 / 4.0) - 1.0) < 1e-6);
    }
  }

  TEST_CASE("golden section agrees with a dense grid on the shipped converter") {
    const PVConverter pv = shipped_converter();
    for (double jsc_value : {0.01, 0.1, 1.0, 10.0}) {
      const double grid = grid_pmp(jsc_value, pv, 100000);
      CHECK(std::abs(mpp(jsc_value, pv).pmp / grid - 1.0) < 1e-3);
    }
    double prev = 0.0;
    for (double a = 1e-4; a < 100.0; a *= 1.5) {
      const double p = mpp(a, pv).pmp;
      CHECK(p >= prev);
      prev = p;
    }
  }

  TEST_CASE("dark and saturated inputs") {
    const PVConverter pv = synthetic_gaas_converter();
    const auto zero = mpp(0.0, pv);
    CHECK(zero.pmp == 0.0);
    CHECK(zero.voc == 0.0);
    try {
      mpp(pv.j_max() * 2.0, pv);
      FAIL("expected range error");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::converter_range_exceeded);
    }
  }

  TEST_CASE("converter validation") {
    const auto eqe = gaas_like_eqe();
    // a small offset at 0 V is shifted out
    const PVConverter shifted("s", eqe, Tabulated({0.0, 1.0}, {5e-5, 1.0}), 1.0, 1.0);
    CHECK(shifted.dark_jv().at(0.0) == 0.0);
    CHECK(shifted.dark_jv().at(1.0) == doctest::Approx(1.0 - 5e-5));
    CHECK_THROWS_AS(PVConverter("x", eqe, Tabulated({0.0, 1.0}, {1e-3, 1.0}), 1.0, 1.0), Error);
    CHECK_THROWS_AS(PVConverter("x", eqe, Tabulated({0.0, 1.0, 2.0}, {0.0, 2.0, 1.0}), 1.0, 1.0), Error);
    CHECK_THROWS_AS(PVConverter("x", Tabulated({400.0, 500.0}, {0.5, 1.2}), gaas_like_dark_jv(), 1.0, 1.0), Error);
    CHECK_THROWS_AS(PVConverter("x", eqe, gaas_like_dark_jv(), 0.0, 1.0), Error);
  }

  TEST_CASE("shipped converter files match the built-in tables") {
    const PVConverter shipped = shipped_converter();
    const auto eqe = gaas_like_eqe();
    const auto jv = gaas_like_dark_jv();
    REQUIRE(shipped.eqe().size() == eqe.size());
    REQUIRE(shipped.dark_jv().size() == jv.size());
    for (std::size_t i = 0; i < eqe.size(); ++i) CHECK(shipped.eqe().y()[i] == doctest::Approx(eqe.y()[i]));
    for (std::size_t i = 0; i < jv.size(); ++i)
      CHECK(shipped.dark_jv().y()[i] == doctest::Approx(jv.y()[i]).epsilon(1e-9));
    CHECK(load_chain(kData / "chain_default.json").pmic_efficiency(1e-3) == default_chain().pmic_efficiency(1e-3));
  }

  TEST_CASE("harvest chain") {
    const HarvestChain chain = default_chain();
    CHECK(chain.pmic_efficiency(1e-9) == 0.60);
    CHECK(chain.pmic_efficiency(1.0) == 0.90);
    CHECK(chain.pmic_efficiency(1e-5) == doctest::Approx(0.675));
    // 7.6 mW: log-linear between 1 mW and 100 mW
    const double t = (std::log10(7.6e-3) + 3.0) / 2.0;
    const double eff = 0.85 + t * 0.05;
    CHECK(chain_output(7.6e-3, chain) == doctest::Approx(7.6e-3 * eff * 0.95).epsilon(1e-12));
    for (double p = 1e-8; p < 1.0; p *= 3.0) CHECK(chain_output(p, chain) <= p);
    CHECK(chain_output(0.0, chain) == 0.0);
    CHECK_THROWS_AS(HarvestChain({}, 0.9, 1.0), Error);
    CHECK_THROWS_AS(HarvestChain({{1e-3, 1.2}}, 0.9, 1.0), Error);
    CHECK_THROWS_AS(parse_chain("{\"pmic_curve\": [[1e-3]], \"battery_eff\": 1, \"capacity_wh\": 1}"), Error);
    const HarvestChain back = parse_chain(chain_json(chain));
    CHECK(back.pmic_curve() == chain.pmic_curve());
  }

  TEST_CASE("energy integration") {
    const std::vector<double> t{0.0, 1800.0, 3600.0};
    const std::vector<double> p{0.01, 0.01, 0.01};
    CHECK(integrate_wh(t, p) == doctest::Approx(0.01));
    const std::vector<double> bad_t{0.0, 10.0, 10.0};
    try {
      integrate_wh(bad_t, p);
      FAIL("expected invalid timeline");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::invalid_timeline);
    }
    // trapezoid is exact for a ramp
    const std::vector<double> ramp{0.0, 0.5, 1.0};
    CHECK(integrate_wh(t, ramp) == doctest::Approx(0.5));
  }

  TEST_CASE("energy estimates") {
    const PVConverter pv = synthetic_gaas_converter();
    const HarvestChain chain = default_chain();
    std::vector<double> t, j, t2, j2;
    for (int i = 0; i <= 240; ++i) {
      const double ts = i * 60.0;
      const double jv = 0.05 * std::pow(std::sin(3.14159265358979 * i / 240.0), 2);
      t.push_back(ts);
      j.push_back(jv);
      if (i % 2 == 0) {
        t2.push_back(ts);
        j2.push_back(jv);
      }
    }
    const auto fine = estimate_energy_from_jsc(t, j, pv, chain, Exec::serial);
    const auto par = estimate_energy_from_jsc(t, j, pv, chain, Exec::parallel);
    const auto coarse = estimate_energy_from_jsc(t2, j2, pv, chain);
    CHECK(fine.stored_wh == par.stored_wh);
    CHECK(fine.pmpp_w == par.pmpp_w);
    CHECK(fine.stored_wh <= fine.harvestable_wh);
    CHECK(std::abs(coarse.harvestable_wh / fine.harvestable_wh - 1.0) < 0.005);
    const std::vector<double> dark(t.size(), 0.0);
    const auto none = estimate_energy_from_jsc(t, dark, pv, chain);
    CHECK(none.harvestable_wh == 0.0);
    CHECK(none.stored_wh == 0.0);
    try {
      recommend_area(0.01, none, pv);
      FAIL("expected cannot size");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::cannot_size);
    }
    const std::vector<Spd> spectra(3, Spd({400.0, 800.0}, {0.5, 0.5}));
    const std::vector<double> ts{0.0, 60.0, 120.0};
    const auto e = estimate_energy(ts, spectra, pv, chain);
    CHECK(e.pmpp_w[0] == doctest::Approx(mpp(jsc(spectra[0], pv), pv).pmp * 10.0 * 1e-3));
  }

  TEST_CASE("area recommendation arithmetic") {
    const PVConverter pv = synthetic_gaas_converter(10.0, 2.0);
    // achieving the target with the current area returns that area
    const auto same = recommend_area(0.004, 0.004, pv);
    CHECK(same.area_cm2 == doctest::Approx(10.0));
    CHECK(same.cells == 5);
    const auto base = recommend_area(0.01, 0.002, pv);
    CHECK(base.area_cm2 == doctest::Approx(50.0));
    for (double a : {0.5, 3.0, 10.0}) {
      CHECK(recommend_area(0.01 * a, 0.002, pv).area_cm2 == doctest::Approx(a * base.area_cm2).epsilon(1e-12));
      CHECK(recommend_area(0.01, 0.002 * a, pv).area_cm2 == doctest::Approx(base.area_cm2 / a).epsilon(1e-12));
    }
    CHECK(recommend_area(0.01, 0.0021, pv).cells == 24);
    CHECK_THROWS_AS(recommend_area(0.01, 0.0, pv), Error);
    CHECK_THROWS_AS(recommend_area(-1.0, 0.01, pv), Error);
  }
}
