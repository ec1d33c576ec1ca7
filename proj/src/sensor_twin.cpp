#include "lxh/sensor_twin.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "lxh/error.hpp"

namespace lxh {

namespace {

std::vector<double> band_grid() { return uniform_grid(300.0, 1100.0, 1.0); }

Tabulated gaussian_band(double center, double sigma) {
  auto x = band_grid();
  std::vector<double> y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double z = (x[i] - center) / sigma;
    y[i] = std::exp(-0.5 * z * z);
  }
  return Tabulated(std::move(x), std::move(y));
}

double gaussian(double x, double center, double sigma) {
  const double z = (x - center) / sigma;
  return std::exp(-0.5 * z * z);
}

// Spectral families. Shape parameters place every class at a distinct
// Blue-normalized IR value (see the generator separability test).
struct LedShape {
  double blue_weight;
  double phosphor_center_nm;
  double phosphor_width_nm;
};

struct CflShape {
  std::array<double, 5> line_weights;  // 435.8, 487, 545.4, 587, 611.6 nm
  double nir_lines;
  double continuum;
};

struct NaturalShape {
  double cct_k;
  double tilt;            // (lambda / 560 nm)^tilt
  double window_nir_loss; // glazing loss reached at 1100 nm, linear from 700 nm
};

constexpr LedShape kLed3000{0.338, 605.0, 50.0};
constexpr LedShape kLed4000{1.013, 565.0, 55.0};
constexpr CflShape kCfl2700{{1.257, 0.08, 0.6, 0.35, 1.0}, 0.1, 0.02};
constexpr CflShape kCfl6500{{1.339, 0.35, 1.0, 0.3, 0.45}, 0.0, 0.01};
constexpr NaturalShape kClear{6500.0, 0.455, 0.5};
constexpr NaturalShape kCloudy{7000.0, -1.328, 0.5};
constexpr NaturalShape kSunrise{3500.0, -1.265, 0.5};
constexpr NaturalShape kSunset{3500.0, -0.186, 0.5};
constexpr NaturalShape kStrong{6000.0, 0.706, 0.5};

std::vector<double> led_values(const std::vector<double>& grid, const LedShape& s) {
  std::vector<double> v(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i)
    v[i] = s.blue_weight * gaussian(grid[i], 450.0, 10.0) +
           gaussian(grid[i], s.phosphor_center_nm, s.phosphor_width_nm);
  return v;
}

std::vector<double> cfl_values(const std::vector<double>& grid, const CflShape& s) {
  constexpr std::array<double, 5> lines = {435.8, 487.0, 545.4, 587.0, 611.6};
  std::vector<double> v(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    double e = s.continuum;
    for (std::size_t k = 0; k < lines.size(); ++k) e += s.line_weights[k] * gaussian(grid[i], lines[k], 3.0);
    e += s.nir_lines *
         (gaussian(grid[i], 763.0, 3.0) + gaussian(grid[i], 811.0, 3.0) + 0.6 * gaussian(grid[i], 912.0, 3.0));
    v[i] = e;
  }
  return v;
}

std::vector<double> natural_values(const std::vector<double>& grid, const NaturalShape& s) {
  constexpr double h = 6.62607015e-34;
  constexpr double c = 2.99792458e8;
  constexpr double k = 1.380649e-23;
  std::vector<double> v(grid.size());
  double peak = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double lm = grid[i] * 1e-9;
    v[i] = 1.0 / (std::pow(lm, 5) * std::expm1(h * c / (lm * k * s.cct_k)));
    peak = std::max(peak, v[i]);
  }
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double window = grid[i] < 700.0 ? 1.0 : 1.0 - s.window_nir_loss * (grid[i] - 700.0) / 400.0;
    v[i] = v[i] / peak * std::pow(grid[i] / 560.0, s.tilt) * window;
  }
  return v;
}

struct Normal {
  std::mt19937_64 engine;
  std::normal_distribution<double> dist{0.0, 1.0};
  explicit Normal(std::uint64_t seed) : engine(seed) {}
  double operator()() { return dist(engine); }
};

}  // namespace

std::string_view to_string(Channel channel) {
  switch (channel) {
    case Channel::bb: return "bb";
    case Channel::ir: return "ir";
    case Channel::r: return "r";
    case Channel::g: return "g";
    case Channel::b: return "b";
    case Channel::lux: return "lux";
  }
  return "?";
}

Channel parse_channel(std::string_view name) {
  for (auto c : kAllChannels)
    if (to_string(c) == name) return c;
  fail(Errc::config_error, "unknown channel '" + std::string(name) + "'");
}

double PseudoSpectrum::get(Channel channel) const {
  switch (channel) {
    case Channel::bb: return bb;
    case Channel::ir: return ir;
    case Channel::r: return r;
    case Channel::g: return g;
    case Channel::b: return b;
    case Channel::lux: return lux;
  }
  return 0.0;
}

PseudoSpectrum PseudoSpectrum::scaled(double factor) const {
  PseudoSpectrum out = *this;
  out.bb *= factor;
  out.ir *= factor;
  out.r *= factor;
  out.g *= factor;
  out.b *= factor;
  out.lux *= factor;
  return out;
}

double channel_value(const Spd& spd, const ChannelResponsivity& resp) {
  return std::max(0.0, resp.gain * integrate_weighted(spd, resp.band));
}

std::size_t LuxFormula::segment(double bb, double ir) const {
  const double ratio = bb > 0.0 ? ir / bb : 0.0;
  std::size_t s = 0;
  while (s < breakpoints.size() && ratio >= breakpoints[s]) ++s;
  return s;
}

double LuxFormula::evaluate(double bb, double ir) const {
  if (bb <= 0.0) return 0.0;
  const auto& c = coeffs[segment(bb, ir)];
  return std::max(0.0, c[0] * bb - c[1] * ir);
}

double NaturalBias::at(double lux) const {
  return high_lux_bias + (low_lux_bias - high_lux_bias) * std::exp(-std::max(0.0, lux) / scale_lux);
}

double SensorErrorModel::bias(LightClass cls, double source_lux) const {
  if (auto it = constant_bias.find(cls); it != constant_bias.end()) return it->second;
  if (auto it = natural_bias.find(cls); it != natural_bias.end()) return it->second.at(source_lux);
  return 1.0;
}

SensorErrorModel SensorErrorModel::defaults() {
  SensorErrorModel m;
  m.constant_bias = {
      {LightClass::led_3000k, 0.70},
      {LightClass::led_4000k, 0.85},
      {LightClass::cfl_2700k, 1.15},
      {LightClass::cfl_6500k, 1.30},
  };
  m.natural_bias = {
      {LightClass::nltw_clear, {1.05, 2.0, 60.0}},  {LightClass::nltw_cloudy, {1.15, 2.0, 80.0}},
      {LightClass::sunrise, {1.25, 2.0, 120.0}},    {LightClass::sunset, {1.20, 2.0, 150.0}},
      {LightClass::daylight, {1.05, 2.0, 60.0}},    {LightClass::strong_daylight, {1.10, 2.0, 40.0}},
  };
  m.noise_std = 0.01;
  return m;
}

SensorErrorModel SensorErrorModel::ideal() {
  SensorErrorModel m;
  m.noise_std = 0.0;
  return m;
}

SensorTwin::SensorTwin(std::array<ChannelResponsivity, 5> channels, LuxFormula formula, SensorErrorModel errors)
    : channels_(std::move(channels)), formula_(formula), errors_(std::move(errors)) {
  if (!(errors_.noise_std >= 0.0)) fail(Errc::config_error, "noise_std must be >= 0");
}

std::array<double, 5> SensorTwin::counts(const Spd& spd) const {
  std::array<double, 5> out{};
  for (std::size_t i = 0; i < 5; ++i) out[i] = channel_value(spd, channels_[i]);
  return out;
}

double SensorTwin::raw_lux(const Spd& spd) const {
  const auto c = counts(spd);
  return formula_.evaluate(c[0], c[1]);
}

PseudoSpectrum SensorTwin::sense(const Spd& spd, std::uint64_t seed, std::span<const ClassShare> composition) const {
  const auto c = counts(spd);
  const double raw = formula_.evaluate(c[0], c[1]);
  double bias = 1.0;
  if (!composition.empty()) {
    bias = 0.0;
    double total = 0.0;
    for (const auto& part : composition) {
      bias += part.share * errors_.bias(part.cls, raw * part.share);
      total += part.share;
    }
    bias = total > 0.0 ? bias / total : 1.0;
  }
  std::array<double, 6> values = {c[0], c[1], c[2], c[3], c[4], raw * bias};
  if (errors_.noise_std > 0.0) {
    Normal normal(seed);
    for (double& v : values) v *= 1.0 + errors_.noise_std * normal();
  }
  PseudoSpectrum ps;
  ps.bb = std::max(0.0, values[0]);
  ps.ir = std::max(0.0, values[1]);
  ps.r = std::max(0.0, values[2]);
  ps.g = std::max(0.0, values[3]);
  ps.b = std::max(0.0, values[4]);
  ps.lux = std::max(0.0, values[5]);
  return ps;
}

PseudoSpectrum SensorTwin::sense(const Spd& spd, std::uint64_t seed, LightClass cls) const {
  const ClassShare only{cls, 1.0};
  return sense(spd, seed, std::span<const ClassShare>(&only, 1));
}

SensorTwin SensorTwin::with_errors(SensorErrorModel errors) const {
  return SensorTwin(channels_, formula_, std::move(errors));
}

SensorTwin SensorTwin::with_lux_formula(LuxFormula formula) const {
  return SensorTwin(channels_, formula, errors_);
}

std::array<ChannelResponsivity, 5> default_responsivities() {
  constexpr double gain = 1000.0;
  return {
      ChannelResponsivity{Channel::bb,
                          Tabulated({300, 400, 600, 800, 900, 1100}, {0.0, 0.25, 0.6, 0.95, 1.0, 0.0}), gain},
      ChannelResponsivity{Channel::ir, Tabulated({500, 650, 800, 900, 1100}, {0.0, 0.15, 0.8, 1.0, 0.0}), gain},
      ChannelResponsivity{Channel::r, gaussian_band(615.0, 30.0), gain},
      ChannelResponsivity{Channel::g, gaussian_band(540.0, 35.0), gain},
      ChannelResponsivity{Channel::b, gaussian_band(465.0, 25.0), gain},
  };
}

LuxFormula calibrate_lux_formula(const std::array<ChannelResponsivity, 5>& channels,
                                 const std::array<double, 4>& breakpoints, std::span<const Spd> spectra) {
  LuxFormula formula;
  formula.breakpoints = breakpoints;
  for (std::size_t i = 1; i < breakpoints.size(); ++i)
    if (!(breakpoints[i] > breakpoints[i - 1])) fail(Errc::config_error, "lux breakpoints must increase");

  // Normal equations per segment for rows (bb/E, -ir/E) -> 1.
  struct Acc {
    double aa = 0, ab = 0, bb = 0, a1 = 0, b1 = 0;
    std::size_t n = 0;
  };
  std::array<Acc, 5> acc{};
  for (const auto& spd : spectra) {
    const double e = illuminance(spd);
    if (!(e > 0.0)) continue;
    const double bb = channel_value(spd, channels[0]);
    const double ir = channel_value(spd, channels[1]);
    if (!(bb > 0.0)) continue;
    auto& s = acc[formula.segment(bb, ir)];
    const double a = bb / e, b = -ir / e;
    s.aa += a * a;
    s.ab += a * b;
    s.bb += b * b;
    s.a1 += a;
    s.b1 += b;
    ++s.n;
  }
  std::array<bool, 5> fitted{};
  for (std::size_t k = 0; k < acc.size(); ++k) {
    const auto& s = acc[k];
    if (s.n == 0) continue;
    const double det = s.aa * s.bb - s.ab * s.ab;
    if (s.n >= 2 && std::abs(det) > 1e-12 * s.aa * s.bb) {
      formula.coeffs[k] = {(s.a1 * s.bb - s.b1 * s.ab) / det, (s.aa * s.b1 - s.ab * s.a1) / det};
    } else {
      formula.coeffs[k] = {s.a1 / s.aa, 0.0};
    }
    fitted[k] = true;
  }
  if (std::none_of(fitted.begin(), fitted.end(), [](bool f) { return f; }))
    fail(Errc::numerical_failure, "no usable spectra for lux calibration");
  for (std::size_t k = 0; k < fitted.size(); ++k) {
    if (fitted[k]) continue;
    for (std::size_t d = 1; d < fitted.size(); ++d) {
      if (k >= d && fitted[k - d]) {
        formula.coeffs[k] = formula.coeffs[k - d];
        break;
      }
      if (k + d < fitted.size() && fitted[k + d]) {
        formula.coeffs[k] = formula.coeffs[k + d];
        break;
      }
    }
  }
  return formula;
}

const SensorTwin& SensorTwin::default_twin() {
  static const SensorTwin twin = [] {
    auto channels = default_responsivities();
    std::vector<Spd> spectra;
    for (std::size_t i = 1; i < kLightClassCount; ++i) spectra.push_back(reference_spd(static_cast<LightClass>(i)));
    auto formula = calibrate_lux_formula(channels, kDefaultLuxBreakpoints, spectra);
    return SensorTwin(std::move(channels), formula, SensorErrorModel::defaults());
  }();
  return twin;
}

std::vector<double> reference_grid() { return uniform_grid(350.0, 1100.0, 1.0); }

Spd reference_spd(LightClass cls) {
  auto grid = reference_grid();
  std::vector<double> values;
  switch (cls) {
    case LightClass::dark: return Spd::zero(std::move(grid));
    case LightClass::led_3000k: values = led_values(grid, kLed3000); break;
    case LightClass::led_4000k: values = led_values(grid, kLed4000); break;
    case LightClass::cfl_2700k: values = cfl_values(grid, kCfl2700); break;
    case LightClass::cfl_6500k: values = cfl_values(grid, kCfl6500); break;
    case LightClass::nltw_clear:
    case LightClass::daylight: values = natural_values(grid, kClear); break;
    case LightClass::nltw_cloudy: values = natural_values(grid, kCloudy); break;
    case LightClass::sunrise: values = natural_values(grid, kSunrise); break;
    case LightClass::sunset: values = natural_values(grid, kSunset); break;
    case LightClass::strong_daylight: values = natural_values(grid, kStrong); break;
    default: fail(Errc::unknown_class, "no reference generator for class");
  }
  return scale_to_lux(Spd(std::move(grid), std::move(values)), kReferenceLux);
}

}  // namespace lxh
