#include "lxh/pv.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include <json.hpp>

#include "lxh/csv.hpp"
#include "lxh/error.hpp"

namespace lxh {

using nlohmann::json;

namespace {

Tabulated shifted_dark_jv(const Tabulated& t) {
  if (t.front_x() > 0.0 || t.back_x() <= 0.0) fail(Errc::invalid_grid, "dark J-V must span 0 V and positive bias");
  const auto y = t.y();
  for (std::size_t i = 1; i < y.size(); ++i)
    if (y[i] < y[i - 1]) fail(Errc::invalid_grid, "dark J-V must be non-decreasing in voltage");
  const double j0 = t.at(0.0);
  if (std::abs(j0) >= 1e-4) fail(Errc::invalid_grid, "dark current at 0 V must be below 1e-4 mA/cm^2");
  std::vector<double> xs(t.x().begin(), t.x().end());
  std::vector<double> ys(y.begin(), y.end());
  for (auto& v : ys) v -= j0;
  return Tabulated(std::move(xs), std::move(ys));
}

}  // namespace

PVConverter::PVConverter(std::string name, Tabulated eqe, Tabulated dark_jv, double area_cm2, double cell_area_cm2)
    : name_(std::move(name)), eqe_(std::move(eqe)), dark_jv_(shifted_dark_jv(dark_jv)), area_cm2_(area_cm2),
      cell_area_cm2_(cell_area_cm2) {
  for (double v : eqe_.y())
    if (v < 0.0 || v > 1.0) fail(Errc::out_of_range, "EQE values must lie in [0, 1]");
  if (!(area_cm2_ > 0.0) || !(cell_area_cm2_ > 0.0)) fail(Errc::config_error, "converter areas must be > 0");
}

PVConverter PVConverter::with_area(double area_cm2) const {
  PVConverter copy = *this;
  if (!(area_cm2 > 0.0)) fail(Errc::config_error, "converter area must be > 0");
  copy.area_cm2_ = area_cm2;
  return copy;
}

double jsc(const Spd& spd, const PVConverter& pv) {
  // integral is in W m^-2 nm x nm; 1e-9 turns nm into m, 0.1 A/m^2 into mA/cm^2
  const double photon_weighted = integrate_weighted(spd, pv.eqe(), true);
  return std::max(0.0, kChargeOverHc * photon_weighted * 1e-9 * 0.1);
}

double j_at(double v, double jsc_ma_cm2, const PVConverter& pv) {
  if (v < pv.dark_jv().front_x() || v > pv.v_max())
    fail(Errc::out_of_range, "voltage " + std::to_string(v) + " V is outside the dark J-V table");
  return jsc_ma_cm2 - pv.dark_jv().at(v);
}

double open_circuit_voltage(double jsc_ma_cm2, const PVConverter& pv) {
  if (!(jsc_ma_cm2 > 0.0)) return 0.0;
  if (jsc_ma_cm2 > pv.j_max())
    fail(Errc::converter_range_exceeded, "Jsc " + std::to_string(jsc_ma_cm2) + " mA/cm^2 exceeds the dark J-V range");
  double lo = 0.0, hi = pv.v_max();
  // J is non-increasing in v: J(lo) > 0 >= J(hi) throughout
  for (int i = 0; i < 200 && hi - lo > 1e-13; ++i) {
    const double mid = 0.5 * (lo + hi);
    (j_at(mid, jsc_ma_cm2, pv) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

MppPoint mpp(double jsc_ma_cm2, const PVConverter& pv) {
  if (!(jsc_ma_cm2 > 0.0)) return {};
  MppPoint p;
  p.voc = open_circuit_voltage(jsc_ma_cm2, pv);
  const auto power = [&](double v) { return v * j_at(v, jsc_ma_cm2, pv); };
  // v * J(v) is unimodal on [0, Voc] for a non-decreasing convex dark curve
  constexpr double kInvPhi = 0.6180339887498949;
  double a = 0.0, b = p.voc;
  double c = b - kInvPhi * (b - a), d = a + kInvPhi * (b - a);
  double fc = power(c), fd = power(d);
  for (int i = 0; i < 200 && b - a > 1e-12 * std::max(1.0, p.voc); ++i) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = power(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = power(d);
    }
  }
  p.vmp = 0.5 * (a + b);
  p.jmp = j_at(p.vmp, jsc_ma_cm2, pv);
  p.pmp = p.vmp * p.jmp;
  return p;
}

HarvestChain::HarvestChain(std::vector<std::pair<double, double>> pmic_curve, double battery_eff, double capacity_wh)
    : curve_(std::move(pmic_curve)), battery_eff_(battery_eff), capacity_wh_(capacity_wh) {
  if (curve_.empty()) fail(Errc::config_error, "PMIC curve needs at least one point");
  std::sort(curve_.begin(), curve_.end());
  for (std::size_t i = 0; i < curve_.size(); ++i) {
    const auto [w, eff] = curve_[i];
    if (!(w > 0.0)) fail(Errc::config_error, "PMIC curve powers must be > 0");
    if (!(eff > 0.0) || eff > 1.0) fail(Errc::config_error, "PMIC efficiencies must lie in (0, 1]");
    if (i > 0 && w == curve_[i - 1].first) fail(Errc::config_error, "PMIC curve powers must be distinct");
  }
  if (!(battery_eff_ > 0.0) || battery_eff_ > 1.0) fail(Errc::config_error, "battery efficiency must lie in (0, 1]");
  if (!(capacity_wh_ > 0.0)) fail(Errc::config_error, "battery capacity must be > 0");
}

double HarvestChain::pmic_efficiency(double power_w) const {
  if (power_w <= curve_.front().first) return curve_.front().second;
  if (power_w >= curve_.back().first) return curve_.back().second;
  const auto it = std::upper_bound(curve_.begin(), curve_.end(), power_w,
                                   [](double p, const auto& point) { return p < point.first; });
  const auto& [w1, e1] = *it;
  const auto& [w0, e0] = *(it - 1);
  const double t = (std::log10(power_w) - std::log10(w0)) / (std::log10(w1) - std::log10(w0));
  return e0 + t * (e1 - e0);
}

double chain_output(double pmpp_w, const HarvestChain& chain) {
  if (!(pmpp_w > 0.0)) return 0.0;
  return pmpp_w * chain.pmic_efficiency(pmpp_w) * chain.battery_efficiency();
}

StepPower harvest_power(double jsc_ma_cm2, const PVConverter& pv, const HarvestChain& chain) {
  const double pmpp_w = mpp(jsc_ma_cm2, pv).pmp * pv.area_cm2() * 1e-3;
  return {pmpp_w, chain_output(pmpp_w, chain)};
}

double integrate_wh(std::span<const double> t_s, std::span<const double> power_w) {
  if (t_s.size() != power_w.size()) fail(Errc::shape_mismatch, "time and power series differ in length");
  double joules = 0.0;
  for (std::size_t i = 1; i < t_s.size(); ++i) {
    if (!(t_s[i] > t_s[i - 1])) fail(Errc::invalid_timeline, "timestamps must be strictly increasing");
    joules += 0.5 * (power_w[i] + power_w[i - 1]) * (t_s[i] - t_s[i - 1]);
  }
  return joules / 3600.0;
}

EnergyEstimate estimate_energy_from_jsc(std::span<const double> t_s, std::span<const double> jsc_values,
                                        const PVConverter& pv, const HarvestChain& chain, Exec exec) {
  if (t_s.size() != jsc_values.size()) fail(Errc::shape_mismatch, "time and Jsc series differ in length");
  for (std::size_t i = 1; i < t_s.size(); ++i)
    if (!(t_s[i] > t_s[i - 1])) fail(Errc::invalid_timeline, "timestamps must be strictly increasing");
  EnergyEstimate e;
  e.converter = pv.name();
  e.t_s.assign(t_s.begin(), t_s.end());
  e.pmpp_w.resize(t_s.size());
  e.stored_w.resize(t_s.size());
  const auto n = static_cast<std::ptrdiff_t>(t_s.size());
  std::optional<Error> error;
  const auto step = [&](std::ptrdiff_t i) {
    const auto k = static_cast<std::size_t>(i);
    const auto p = harvest_power(jsc_values[k], pv, chain);
    e.pmpp_w[k] = p.pmpp_w;
    e.stored_w[k] = p.stored_w;
  };
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      try {
        step(i);
      } catch (const Error& err) {
#pragma omp critical(lxh_energy_error)
        if (!error) error = err;
      }
    }
    if (error) throw *error;
  } else {
    for (std::ptrdiff_t i = 0; i < n; ++i) step(i);
  }
  e.harvestable_wh = integrate_wh(e.t_s, e.pmpp_w);
  e.stored_wh = integrate_wh(e.t_s, e.stored_w);
  return e;
}

EnergyEstimate estimate_energy(std::span<const double> t_s, std::span<const Spd> spectra, const PVConverter& pv,
                               const HarvestChain& chain, Exec exec) {
  if (t_s.size() != spectra.size()) fail(Errc::shape_mismatch, "time and spectrum series differ in length");
  std::vector<double> j(spectra.size());
  const auto n = static_cast<std::ptrdiff_t>(spectra.size());
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) j[static_cast<std::size_t>(i)] = jsc(spectra[static_cast<std::size_t>(i)], pv);
  } else {
    for (std::ptrdiff_t i = 0; i < n; ++i) j[static_cast<std::size_t>(i)] = jsc(spectra[static_cast<std::size_t>(i)], pv);
  }
  return estimate_energy_from_jsc(t_s, j, pv, chain, exec);
}

AreaRecommendation recommend_area(double target_w, double avg_stored_w, const PVConverter& pv) {
  if (!(target_w > 0.0)) fail(Errc::config_error, "target power must be > 0");
  if (!(avg_stored_w > 0.0)) fail(Errc::cannot_size, "no energy was harvested; cannot size the converter");
  AreaRecommendation r;
  r.avg_stored_w = avg_stored_w;
  r.area_cm2 = pv.area_cm2() * target_w / avg_stored_w;
  r.cells = static_cast<std::size_t>(std::ceil(r.area_cm2 / pv.cell_area_cm2() - 1e-12));
  return r;
}

AreaRecommendation recommend_area(double target_w, const EnergyEstimate& estimate, const PVConverter& pv) {
  const double hours = estimate.elapsed_h();
  if (!(estimate.stored_wh > 0.0) || !(hours > 0.0))
    fail(Errc::cannot_size, "no energy was harvested; cannot size the converter");
  return recommend_area(target_w, estimate.stored_wh / hours, pv);
}

Tabulated gaas_like_eqe() {
  // knots of a flat-topped GaAs response; the red edge sits at 1240/1.42 nm
  static const std::vector<std::pair<double, double>> knots = {
      {300.0, 0.0}, {330.0, 0.35}, {360.0, 0.62}, {400.0, 0.86}, {450.0, 0.9},
      {820.0, 0.9}, {860.0, 0.88}, {868.0, 0.7}, {873.0, 0.0}};
  std::vector<double> x, y;
  for (double nm = 300.0; nm <= 900.0; nm += 1.0) {
    double v = 0.0;
    for (std::size_t i = 1; i < knots.size(); ++i)
      if (nm <= knots[i].first) {
        const auto [x0, y0] = knots[i - 1];
        const auto [x1, y1] = knots[i];
        v = y0 + (y1 - y0) * (nm - x0) / (x1 - x0);
        break;
      }
    x.push_back(nm);
    y.push_back(std::round(v * 1e6) / 1e6);
  }
  return Tabulated(std::move(x), std::move(y));
}

Tabulated gaas_like_dark_jv() {
  constexpr double kJ0 = 1e-19;           // mA/cm^2
  constexpr double kThermal = 0.0256926;  // kT/q at 298.15 K, V
  std::vector<double> v, j;
  for (int mv = 0; mv <= 1300; ++mv) {
    const double volts = mv / 1000.0;
    v.push_back(volts);
    j.push_back(kJ0 * std::expm1(volts / kThermal));
  }
  return Tabulated(std::move(v), std::move(j));
}

PVConverter synthetic_gaas_converter(double area_cm2, double cell_area_cm2) {
  return PVConverter("gaas_like", gaas_like_eqe(), gaas_like_dark_jv(), area_cm2, cell_area_cm2);
}

HarvestChain default_chain() { return HarvestChain({{1e-6, 0.60}, {1e-4, 0.75}, {1e-3, 0.85}, {1e-1, 0.90}}, 0.95, 4.4); }

namespace {

Tabulated read_two_columns(const std::filesystem::path& path, std::string_view xname, std::string_view yname) {
  const auto table = csv::read(path);
  const auto xc = table.column(xname), yc = table.column(yname);
  std::vector<double> x, y;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const std::string ctx = path.string() + " row " + std::to_string(i + 1);
    x.push_back(csv::to_double(table.rows[i][xc], ctx));
    y.push_back(csv::to_double(table.rows[i][yc], ctx));
  }
  return Tabulated(std::move(x), std::move(y));
}

void write_two_columns(const std::filesystem::path& path, std::string_view header, const Tabulated& t) {
  std::string out(header);
  out += '\n';
  for (std::size_t i = 0; i < t.size(); ++i) {
    out += csv::number(t.x()[i]);
    out += ',';
    out += csv::number(t.y()[i]);
    out += '\n';
  }
  csv::write_text(path, out);
}

}  // namespace

Tabulated read_eqe_csv(const std::filesystem::path& path) { return read_two_columns(path, "wavelength_nm", "eqe"); }

Tabulated read_dark_jv_csv(const std::filesystem::path& path) {
  return read_two_columns(path, "voltage_v", "current_density_ma_cm2");
}

void write_eqe_csv(const std::filesystem::path& path, const Tabulated& eqe) {
  write_two_columns(path, "wavelength_nm,eqe", eqe);
}

void write_dark_jv_csv(const std::filesystem::path& path, const Tabulated& dark_jv) {
  write_two_columns(path, "voltage_v,current_density_ma_cm2", dark_jv);
}

HarvestChain parse_chain(std::string_view json_text) {
  try {
    const auto j = json::parse(json_text);
    std::vector<std::pair<double, double>> curve;
    for (const auto& p : j.at("pmic_curve")) {
      if (!p.is_array() || p.size() != 2) fail(Errc::parse_error, "pmic_curve entries are [watts, efficiency]");
      curve.emplace_back(p[0].get<double>(), p[1].get<double>());
    }
    return HarvestChain(std::move(curve), j.at("battery_eff").get<double>(), j.at("capacity_wh").get<double>());
  } catch (const json::exception& e) {
    fail(Errc::parse_error, std::string("chain JSON: ") + e.what());
  }
}

HarvestChain load_chain(const std::filesystem::path& path) { return parse_chain(csv::read_text(path)); }

std::string chain_json(const HarvestChain& chain) {
  json j;
  j["pmic_curve"] = json::array();
  for (const auto& [w, eff] : chain.pmic_curve()) j["pmic_curve"].push_back({w, eff});
  j["battery_eff"] = chain.battery_efficiency();
  j["capacity_wh"] = chain.capacity_wh();
  return j.dump(1) + "\n";
}

}  // namespace lxh
