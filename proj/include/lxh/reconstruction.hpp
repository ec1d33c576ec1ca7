#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lxh/classifiers.hpp"
#include "lxh/light_class.hpp"
#include "lxh/sensor_twin.hpp"
#include "lxh/spectral.hpp"

namespace lxh {

/// Raw sensor lux -> corrected lux for one class. Constant entries multiply;
/// polynomial entries evaluate c0 + c1 r + c2 r^2 with r clamped to the
/// validity range.
struct CorrectionEntry {
  enum class Type { constant, poly };

  Type type = Type::constant;
  double factor = 1.0;
  std::vector<double> coeffs;  // ascending powers, at most 3
  double range_lo = 0.0;
  double range_hi = 0.0;
  double rms = 0.0;  // fit residual, informational

  double evaluate(double raw) const;
};

struct LuxCorrection {
  std::map<LightClass, CorrectionEntry> entries;
};

struct CorrectedLux {
  double lux = 0.0;
  bool clamped = false;  // raw was outside the validity range
};

CorrectedLux correct_lux(double raw, LightClass cls, const LuxCorrection& correction);

struct LuxSample {
  double raw;
  double reference;
};

/// Degree 0: constant factor, the mean of reference/raw. Degree 1-2:
/// least-squares polynomial of reference on raw. The validity range is the
/// span of sample raw values; a fit that decreases anywhere on it is
/// rejected with numerical_failure.
CorrectionEntry fit_natural_correction(std::span<const LuxSample> samples, int degree);

/// Noiseless twin samples of one class: raw (biased) sensor lux against the
/// true illuminance, at `count` log-spaced levels over [lo, hi] lux.
std::vector<LuxSample> twin_lux_samples(const SensorTwin& twin, LightClass cls, double lo, double hi,
                                        std::size_t count = 40);

/// Corrections for every non-dark class, fitted on twin samples: constant
/// factors for artificial light, degree-2 polynomials for natural light.
LuxCorrection calibrate_corrections(const SensorTwin& twin);

inline constexpr double kStrongDaylightLux = 1500.0;

/// Refines a natural classification into sunrise/sunset/daylight/strong
/// daylight using a classifier trained on the extended taxonomy. Daylight
/// and strong daylight are told apart by the corrected lux alone.
LightClass classify_natural_subclass(const PseudoSpectrum& ps, LightClass classified,
                                     const TrainedClassifier& extended, const LuxCorrection& correction);

class ReferenceLibrary {
 public:
  ReferenceLibrary() = default;
  ReferenceLibrary(std::map<LightClass, Spd> spectra, LuxCorrection correction);

  /// Twin reference spectra and twin-calibrated corrections.
  static ReferenceLibrary from_twin(const SensorTwin& twin);
  /// Manifest JSON: {"spectra": {class: csv path}, "corrections": {class:
  /// {type, params, range_lux}}}; paths resolve against the manifest's folder.
  static ReferenceLibrary load(const std::filesystem::path& manifest);
  void save(const std::filesystem::path& dir) const;

  const Spd* find(LightClass cls) const;
  const LuxCorrection& correction() const { return correction_; }
  const std::map<LightClass, Spd>& spectra() const { return spectra_; }

 private:
  std::map<LightClass, Spd> spectra_;
  LuxCorrection correction_;
};

/// Dark gives a zero spectrum; otherwise the class reference scaled so its
/// illuminance equals `corrected_lux`.
Spd reconstruct(LightClass cls, double corrected_lux, const ReferenceLibrary& library);

std::string correction_json(const std::map<LightClass, CorrectionEntry>& entries);
std::map<LightClass, CorrectionEntry> parse_correction_json(std::string_view text);

}  // namespace lxh
