#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "lxh/exec.hpp"
#include "lxh/spectral.hpp"

namespace lxh {

/// Photovoltaic converter for the superposition model: EQE against
/// wavelength and the dark J-V characteristic (mA/cm^2 against V).
class PVConverter {
 public:
  /// Validates EQE in [0, 1] and a non-decreasing dark J-V whose voltage
  /// range covers 0. A dark current at 0 V below 1e-4 mA/cm^2 in magnitude
  /// is shifted out; a larger one is rejected.
  PVConverter(std::string name, Tabulated eqe, Tabulated dark_jv, double area_cm2, double cell_area_cm2);

  const std::string& name() const { return name_; }
  const Tabulated& eqe() const { return eqe_; }
  const Tabulated& dark_jv() const { return dark_jv_; }
  double area_cm2() const { return area_cm2_; }
  double cell_area_cm2() const { return cell_area_cm2_; }
  double v_max() const { return dark_jv_.back_x(); }
  /// Dark current density at v_max: the largest Jsc the table can balance.
  double j_max() const { return dark_jv_.y().back(); }

  PVConverter with_area(double area_cm2) const;

 private:
  std::string name_;
  Tabulated eqe_;
  Tabulated dark_jv_;
  double area_cm2_;
  double cell_area_cm2_;
};

/// Elementary charge over (Planck constant x speed of light), A / (W m).
inline constexpr double kChargeOverHc = 1.602176634e-19 / (6.62607015e-34 * 299792458.0);

/// Short-circuit current density (mA/cm^2).
double jsc(const Spd& spd, const PVConverter& pv);

/// J(v) = jsc - Jdark(v), mA/cm^2.
double j_at(double v, double jsc_ma_cm2, const PVConverter& pv);

double open_circuit_voltage(double jsc_ma_cm2, const PVConverter& pv);

struct MppPoint {
  double vmp = 0.0;  // V
  double jmp = 0.0;  // mA/cm^2
  double pmp = 0.0;  // mW/cm^2
  double voc = 0.0;  // V
};

MppPoint mpp(double jsc_ma_cm2, const PVConverter& pv);

/// PMIC efficiency against input power plus a constant battery efficiency.
class HarvestChain {
 public:
  HarvestChain(std::vector<std::pair<double, double>> pmic_curve, double battery_eff, double capacity_wh);

  /// Interpolated linearly in log10(power); clamped to the end values.
  double pmic_efficiency(double power_w) const;
  double battery_efficiency() const { return battery_eff_; }
  double capacity_wh() const { return capacity_wh_; }
  const std::vector<std::pair<double, double>>& pmic_curve() const { return curve_; }

 private:
  std::vector<std::pair<double, double>> curve_;
  double battery_eff_;
  double capacity_wh_;
};

double chain_output(double pmpp_w, const HarvestChain& chain);

struct StepPower {
  double pmpp_w = 0.0;
  double stored_w = 0.0;
};

/// Converter-area power at the MPP and after the chain, for a given Jsc.
StepPower harvest_power(double jsc_ma_cm2, const PVConverter& pv, const HarvestChain& chain);

struct EnergyEstimate {
  std::vector<double> t_s;
  std::vector<double> pmpp_w;
  std::vector<double> stored_w;
  double harvestable_wh = 0.0;
  double stored_wh = 0.0;
  std::string converter;
  std::string source;

  double elapsed_h() const { return t_s.size() < 2 ? 0.0 : (t_s.back() - t_s.front()) / 3600.0; }
};

/// Trapezoidal time integral in Wh; times in seconds, strictly increasing.
double integrate_wh(std::span<const double> t_s, std::span<const double> power_w);

EnergyEstimate estimate_energy(std::span<const double> t_s, std::span<const Spd> spectra, const PVConverter& pv,
                               const HarvestChain& chain, Exec exec = Exec::parallel);
EnergyEstimate estimate_energy_from_jsc(std::span<const double> t_s, std::span<const double> jsc_ma_cm2,
                                        const PVConverter& pv, const HarvestChain& chain,
                                        Exec exec = Exec::parallel);

struct AreaRecommendation {
  double area_cm2 = 0.0;
  std::size_t cells = 0;
  double avg_stored_w = 0.0;
};

AreaRecommendation recommend_area(double target_avg_power_w, const EnergyEstimate& estimate, const PVConverter& pv);
/// Same arithmetic from the achieved average stored power directly.
AreaRecommendation recommend_area(double target_avg_power_w, double avg_stored_w, const PVConverter& pv);

/// GaAs-like single junction: EQE near 0.9 from 400 to 870 nm, falling to
/// zero at the 1.42 eV edge; ideal-diode dark J-V at 25 C, 0 to 1.3 V in
/// 1 mV steps.
Tabulated gaas_like_eqe();
Tabulated gaas_like_dark_jv();
PVConverter synthetic_gaas_converter(double area_cm2 = 10.0, double cell_area_cm2 = 10.0);

HarvestChain default_chain();

Tabulated read_eqe_csv(const std::filesystem::path& path);
Tabulated read_dark_jv_csv(const std::filesystem::path& path);
void write_eqe_csv(const std::filesystem::path& path, const Tabulated& eqe);
void write_dark_jv_csv(const std::filesystem::path& path, const Tabulated& dark_jv);

HarvestChain parse_chain(std::string_view json_text);
HarvestChain load_chain(const std::filesystem::path& path);
std::string chain_json(const HarvestChain& chain);

}  // namespace lxh
