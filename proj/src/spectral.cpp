#include "lxh/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "lxh/csv.hpp"
#include "lxh/error.hpp"

namespace lxh {

namespace {

void require_increasing(std::span<const double> x, const char* what) {
  for (std::size_t i = 1; i < x.size(); ++i) {
    if (!(x[i] > x[i - 1])) fail(Errc::invalid_grid, std::string(what) + " is not strictly increasing");
  }
}

}  // namespace

Tabulated::Tabulated(std::vector<double> x, std::vector<double> y) : x_(std::move(x)), y_(std::move(y)) {
  if (x_.size() != y_.size()) fail(Errc::shape_mismatch, "tabulated x and y differ in length");
  if (x_.size() < 2) fail(Errc::invalid_grid, "tabulated curve needs at least two samples");
  for (std::size_t i = 0; i < x_.size(); ++i) {
    if (!std::isfinite(x_[i]) || !std::isfinite(y_[i])) fail(Errc::invalid_grid, "non-finite tabulated value");
  }
  require_increasing(x_, "abscissa");
  const double h = x_[1] - x_[0];
  bool uniform = true;
  for (std::size_t i = 2; i < x_.size() && uniform; ++i)
    uniform = std::abs((x_[i] - x_[i - 1]) - h) <= 1e-9 * h;
  step_ = uniform ? h : 0.0;
}

double Tabulated::at(double x) const {
  if (x_.empty() || x < x_.front() || x > x_.back()) return 0.0;
  std::size_t i;
  if (step_ > 0.0) {
    i = static_cast<std::size_t>((x - x_.front()) / step_);
    if (i >= x_.size() - 1) i = x_.size() - 2;
    // guard against the division landing one cell off
    if (x < x_[i] && i > 0) --i;
    if (x > x_[i + 1] && i + 2 < x_.size()) ++i;
  } else {
    auto it = std::upper_bound(x_.begin(), x_.end(), x);
    i = it == x_.end() ? x_.size() - 2 : static_cast<std::size_t>(it - x_.begin()) - 1;
  }
  const double x0 = x_[i], x1 = x_[i + 1];
  if (x == x0) return y_[i];
  if (x == x1) return y_[i + 1];
  const double t = (x - x0) / (x1 - x0);
  return y_[i] + t * (y_[i + 1] - y_[i]);
}

Spd::Spd(std::vector<double> wavelengths_nm, std::vector<double> irradiance)
    : curve_(std::move(wavelengths_nm), std::move(irradiance)) {
  for (double v : curve_.y())
    if (v < 0.0) fail(Errc::invalid_grid, "negative spectral irradiance");
}

Spd Spd::zero(std::vector<double> wavelengths_nm) {
  std::vector<double> values(wavelengths_nm.size(), 0.0);
  return Spd(std::move(wavelengths_nm), std::move(values));
}

Spd Spd::scaled(double factor) const {
  if (!(factor >= 0.0) || !std::isfinite(factor)) fail(Errc::out_of_range, "scale factor must be finite and >= 0");
  std::vector<double> values(irradiance().begin(), irradiance().end());
  for (double& v : values) v *= factor;
  return Spd({wavelengths().begin(), wavelengths().end()}, std::move(values));
}

std::vector<double> uniform_grid(double first, double last, double step) {
  if (!(step > 0.0) || !(last > first)) fail(Errc::invalid_grid, "uniform grid needs first < last and step > 0");
  const auto n = static_cast<std::size_t>(std::floor((last - first) / step + 1e-9)) + 1;
  std::vector<double> grid(n);
  for (std::size_t i = 0; i < n; ++i) grid[i] = first + static_cast<double>(i) * step;
  return grid;
}

Spd resample(const Spd& spd, std::span<const double> grid) {
  require_increasing(grid, "resampling grid");
  if (grid.size() < 2) fail(Errc::invalid_grid, "resampling grid needs at least two points");
  std::vector<double> values(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) values[i] = spd.at(grid[i]);
  return Spd({grid.begin(), grid.end()}, std::move(values));
}

double integrate(const Spd& spd) {
  const auto x = spd.wavelengths();
  const auto y = spd.irradiance();
  double sum = 0.0;
  for (std::size_t i = 1; i < x.size(); ++i) sum += 0.5 * (y[i] + y[i - 1]) * (x[i] - x[i - 1]);
  return sum;
}

double integrate_weighted(const Spd& spd, const Tabulated& weight, bool times_wavelength) {
  const double lo = std::max(spd.wavelengths().front(), weight.front_x());
  const double hi = std::min(spd.wavelengths().back(), weight.back_x());
  if (!(hi > lo)) return 0.0;
  auto f = [&](double nm) {
    const double v = spd.at(nm) * weight.at(nm);
    return times_wavelength ? v * nm : v;
  };
  double sum = 0.0;
  double prev_x = lo;
  double prev_f = f(lo);
  for (double nm = std::floor(lo) + 1.0; nm < hi; nm += 1.0) {
    const double cur = f(nm);
    sum += 0.5 * (cur + prev_f) * (nm - prev_x);
    prev_x = nm;
    prev_f = cur;
  }
  sum += 0.5 * (f(hi) + prev_f) * (hi - prev_x);
  return sum;
}

double illuminance(const Spd& spd) {
  const auto v = photopic::table();
  double sum = 0.0;
  double prev = v[0] * spd.at(photopic::kFirstNm);
  for (std::size_t i = 1; i < v.size(); ++i) {
    const double cur = v[i] * spd.at(photopic::kFirstNm + static_cast<double>(i));
    sum += 0.5 * (cur + prev);
    prev = cur;
  }
  return kLuminousEfficacy * sum;
}

Spd scale_to_lux(const Spd& spd, double target_lux) {
  if (!(target_lux >= 0.0) || !std::isfinite(target_lux)) fail(Errc::out_of_range, "target illuminance must be >= 0");
  if (target_lux == 0.0) return spd.scaled(0.0);
  const double current = illuminance(spd);
  if (!(current > 0.0)) fail(Errc::degenerate_spectrum, "cannot scale a spectrum with zero illuminance");
  return spd.scaled(target_lux / current);
}

Spd mix(std::span<const Spd> spds, std::span<const double> weights) {
  if (spds.size() != weights.size()) fail(Errc::shape_mismatch, "mix: spectra and weights differ in count");
  if (spds.empty()) fail(Errc::shape_mismatch, "mix: nothing to mix");
  double lo = spds.front().wavelengths().front();
  double hi = spds.front().wavelengths().back();
  for (const auto& s : spds) {
    lo = std::min(lo, s.wavelengths().front());
    hi = std::max(hi, s.wavelengths().back());
  }
  for (double w : weights)
    if (!(w >= 0.0) || !std::isfinite(w)) fail(Errc::out_of_range, "mix weights must be finite and >= 0");
  auto grid = uniform_grid(std::floor(lo), std::ceil(hi), 1.0);
  std::vector<double> values(grid.size(), 0.0);
  for (std::size_t k = 0; k < spds.size(); ++k) {
    if (weights[k] == 0.0) continue;
    for (std::size_t i = 0; i < grid.size(); ++i) values[i] += weights[k] * spds[k].at(grid[i]);
  }
  return Spd(std::move(grid), std::move(values));
}

Spd read_spd_csv(const std::filesystem::path& path) {
  const auto table = csv::read(path);
  const auto wl = table.column("wavelength_nm");
  const auto irr = table.column("irradiance_w_m2_nm");
  std::vector<double> x, y;
  x.reserve(table.rows.size());
  y.reserve(table.rows.size());
  for (const auto& row : table.rows) {
    x.push_back(csv::to_double(row[wl], path.string()));
    y.push_back(csv::to_double(row[irr], path.string()));
  }
  return Spd(std::move(x), std::move(y));
}

void write_spd_csv(const std::filesystem::path& path, const Spd& spd) {
  std::string out = "wavelength_nm,irradiance_w_m2_nm\n";
  for (std::size_t i = 0; i < spd.size(); ++i) {
    out += csv::number(spd.wavelengths()[i]);
    out += ',';
    out += csv::number(spd.irradiance()[i]);
    out += '\n';
  }
  csv::write_text(path, out);
}

namespace photopic {

double at(double nm) {
  if (nm < kFirstNm || nm > kLastNm) return 0.0;
  const auto v = table();
  const double pos = nm - kFirstNm;
  const auto i = std::min(static_cast<std::size_t>(pos), v.size() - 2);
  const double t = pos - static_cast<double>(i);
  return v[i] + t * (v[i + 1] - v[i]);
}

}  // namespace photopic

}  // namespace lxh
