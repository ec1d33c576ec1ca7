#pragma once

#include <filesystem>
#include <span>
#include <vector>

namespace lxh {

/// lm/W at 555 nm (SI definition of the candela).
inline constexpr double kLuminousEfficacy = 683.002;

/// A tabulated function on a strictly increasing abscissa. Evaluation is
/// piecewise linear inside the tabulated domain and zero outside it.
class Tabulated {
 public:
  Tabulated() = default;
  Tabulated(std::vector<double> x, std::vector<double> y);

  double at(double x) const;

  std::span<const double> x() const { return x_; }
  std::span<const double> y() const { return y_; }
  std::size_t size() const { return x_.size(); }
  double front_x() const { return x_.front(); }
  double back_x() const { return x_.back(); }

 private:
  std::vector<double> x_;
  std::vector<double> y_;
  double step_ = 0.0;  // nonzero when the abscissa is uniform
};

/// Spectral power distribution: irradiance (W m^-2 nm^-1) against
/// wavelength (nm). At least two samples, strictly increasing wavelengths,
/// non-negative irradiance.
class Spd {
 public:
  Spd(std::vector<double> wavelengths_nm, std::vector<double> irradiance);

  static Spd zero(std::vector<double> wavelengths_nm);

  const Tabulated& curve() const { return curve_; }
  std::span<const double> wavelengths() const { return curve_.x(); }
  std::span<const double> irradiance() const { return curve_.y(); }
  std::size_t size() const { return curve_.size(); }
  double at(double nm) const { return curve_.at(nm); }

  Spd scaled(double factor) const;

 private:
  Tabulated curve_;
};

std::vector<double> uniform_grid(double first, double last, double step = 1.0);

/// Linear interpolation inside the source domain, zero outside.
Spd resample(const Spd& spd, std::span<const double> grid);

/// Trapezoidal integral over the tabulated domain (W m^-2).
double integrate(const Spd& spd);

/// Trapezoidal integral of weight(l) * E(l) * extra(l) on a 1 nm grid spanning
/// the overlap of both domains. times_wavelength adds the photon-flux factor
/// of lambda.
double integrate_weighted(const Spd& spd, const Tabulated& weight, bool times_wavelength = false);

double illuminance(const Spd& spd);

Spd scale_to_lux(const Spd& spd, double target_lux);

/// Weighted sum on the 1 nm union grid of all inputs.
Spd mix(std::span<const Spd> spds, std::span<const double> weights);

Spd read_spd_csv(const std::filesystem::path& path);
void write_spd_csv(const std::filesystem::path& path, const Spd& spd);

namespace photopic {

inline constexpr int kFirstNm = 360;
inline constexpr int kLastNm = 830;

/// V(lambda) at 1 nm from kFirstNm to kLastNm inclusive.
std::span<const double> table();
double at(double nm);

}  // namespace photopic

}  // namespace lxh
