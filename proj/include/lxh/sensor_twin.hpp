#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "lxh/light_class.hpp"
#include "lxh/spectral.hpp"

namespace lxh {

enum class Channel { bb, ir, r, g, b, lux };

inline constexpr std::array<Channel, 6> kAllChannels = {Channel::bb, Channel::ir, Channel::r,
                                                        Channel::g,  Channel::b,  Channel::lux};

std::string_view to_string(Channel channel);
Channel parse_channel(std::string_view name);

/// One low-cost observation: five photodiode counts plus the sensor's lux
/// estimate.
struct PseudoSpectrum {
  double bb = 0.0;
  double ir = 0.0;
  double r = 0.0;
  double g = 0.0;
  double b = 0.0;
  double lux = 0.0;
  std::optional<long long> timestamp;  // UTC epoch seconds

  double get(Channel channel) const;
  PseudoSpectrum scaled(double factor) const;
};

struct ChannelResponsivity {
  Channel channel = Channel::bb;
  Tabulated band;     // dimensionless, in [0, 1]
  double gain = 1.0;  // counts per W m^-2 of band-weighted irradiance
};

/// gain * integral(resp * E), trapezoidal on the 1 nm overlap grid.
double channel_value(const Spd& spd, const ChannelResponsivity& resp);

/// Piecewise lux estimate from the broadband and infrared counts:
///   lux = c0 * BB - c1 * IR
/// with (c0, c1) picked by the IR/BB ratio segment.
struct LuxFormula {
  std::array<double, 4> breakpoints{};
  std::array<std::array<double, 2>, 5> coeffs{};

  std::size_t segment(double bb, double ir) const;
  double evaluate(double bb, double ir) const;
};

/// Multiplicative lux bias for natural light: high_lux_bias at bright levels,
/// relaxing exponentially to low_lux_bias as illuminance drops.
struct NaturalBias {
  double high_lux_bias = 1.0;
  double low_lux_bias = 2.0;
  double scale_lux = 100.0;

  double at(double lux) const;
};

struct SensorErrorModel {
  std::map<LightClass, double> constant_bias;
  std::map<LightClass, NaturalBias> natural_bias;
  double noise_std = 0.01;  // relative, per channel

  /// Bias for a source of the given class whose raw lux contribution is
  /// `source_lux`; 1.0 for classes with no entry.
  double bias(LightClass cls, double source_lux) const;

  static SensorErrorModel defaults();
  /// Bias 1 everywhere and no noise.
  static SensorErrorModel ideal();
};

/// Share of illuminance a class contributes to the sensed spectrum.
struct ClassShare {
  LightClass cls;
  double share;
};

class SensorTwin {
 public:
  SensorTwin(std::array<ChannelResponsivity, 5> channels, LuxFormula formula, SensorErrorModel errors);

  /// Shipped responsivities, with the lux formula calibrated against the
  /// shipped reference spectra and the default error model.
  static const SensorTwin& default_twin();

  PseudoSpectrum sense(const Spd& spd, std::uint64_t seed, std::span<const ClassShare> composition = {}) const;
  PseudoSpectrum sense(const Spd& spd, std::uint64_t seed, LightClass cls) const;

  /// Noiseless channel counts (bb, ir, r, g, b).
  std::array<double, 5> counts(const Spd& spd) const;
  /// Noiseless, unbiased lux from the formula.
  double raw_lux(const Spd& spd) const;

  const std::array<ChannelResponsivity, 5>& channels() const { return channels_; }
  const LuxFormula& lux_formula() const { return formula_; }
  const SensorErrorModel& errors() const { return errors_; }

  SensorTwin with_errors(SensorErrorModel errors) const;
  SensorTwin with_lux_formula(LuxFormula formula) const;

 private:
  std::array<ChannelResponsivity, 5> channels_;
  LuxFormula formula_;
  SensorErrorModel errors_;
};

std::array<ChannelResponsivity, 5> default_responsivities();

/// Least-squares fit of (c0, c1) per ratio segment so the formula matches the
/// illuminance of the given spectra. Segments holding a single spectrum get
/// c1 = 0; empty segments copy their nearest neighbour.
LuxFormula calibrate_lux_formula(const std::array<ChannelResponsivity, 5>& channels,
                                 const std::array<double, 4>& breakpoints, std::span<const Spd> spectra);

inline constexpr std::array<double, 4> kDefaultLuxBreakpoints = {0.21, 0.33, 0.49, 0.58};

/// Synthetic reference spectra, 350-1100 nm at 1 nm, normalized to 1000 lx.
/// Dark yields an all-zero spectrum.
Spd reference_spd(LightClass cls);

std::vector<double> reference_grid();

inline constexpr double kReferenceLux = 1000.0;

}  // namespace lxh
