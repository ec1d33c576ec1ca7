#include "lxh/reconstruction.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>
#include <json.hpp>

#include "lxh/csv.hpp"
#include "lxh/error.hpp"

namespace lxh {

using nlohmann::json;

double CorrectionEntry::evaluate(double raw) const {
  if (type == Type::constant) return raw * factor;
  const double r = std::clamp(raw, range_lo, range_hi);
  double v = 0.0;
  for (std::size_t k = coeffs.size(); k-- > 0;) v = v * r + coeffs[k];
  return std::max(0.0, v);
}

CorrectedLux correct_lux(double raw, LightClass cls, const LuxCorrection& correction) {
  if (!(raw >= 0.0)) fail(Errc::invalid_channel_value, "raw lux must be >= 0");
  if (cls == LightClass::dark) return {0.0, false};
  const auto it = correction.entries.find(cls);
  if (it == correction.entries.end())
    fail(Errc::missing_correction, "no lux correction for " + std::string(to_string(cls)));
  const auto& e = it->second;
  const bool clamped = e.type == CorrectionEntry::Type::poly && (raw < e.range_lo || raw > e.range_hi);
  return {e.evaluate(raw), clamped};
}

CorrectionEntry fit_natural_correction(std::span<const LuxSample> samples, int degree) {
  if (degree < 0 || degree > 2) fail(Errc::config_error, "correction degree must be 0, 1 or 2");
  if (samples.size() < static_cast<std::size_t>(degree) + 1)
    fail(Errc::numerical_failure, "need at least degree + 1 samples");
  CorrectionEntry e;
  e.range_lo = samples.front().raw;
  e.range_hi = samples.front().raw;
  for (const auto& s : samples) {
    if (!(s.reference > 0.0)) fail(Errc::out_of_range, "reference lux must be > 0");
    if (!(s.raw >= 0.0)) fail(Errc::invalid_channel_value, "raw lux must be >= 0");
    e.range_lo = std::min(e.range_lo, s.raw);
    e.range_hi = std::max(e.range_hi, s.raw);
  }

  double sq = 0.0;
  if (degree == 0) {
    double sum = 0.0;
    for (const auto& s : samples) {
      if (!(s.raw > 0.0)) fail(Errc::numerical_failure, "a constant factor needs raw lux > 0");
      sum += s.reference / s.raw;
    }
    e.type = CorrectionEntry::Type::constant;
    e.factor = sum / static_cast<double>(samples.size());
    for (const auto& s : samples) sq += std::pow(s.raw * e.factor - s.reference, 2);
    e.rms = std::sqrt(sq / static_cast<double>(samples.size()));
    return e;
  }

  const auto n = static_cast<Eigen::Index>(samples.size());
  const Eigen::Index p = degree + 1;
  // columns scaled by the range so the normal matrix stays well conditioned
  const double scale = std::max(e.range_hi, 1e-300);
  Eigen::MatrixXd a(n, p);
  Eigen::VectorXd b(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double r = samples[static_cast<std::size_t>(i)].raw / scale;
    double pw = 1.0;
    for (Eigen::Index k = 0; k < p; ++k, pw *= r) a(i, k) = pw;
    b(i) = samples[static_cast<std::size_t>(i)].reference;
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
  qr.setThreshold(1e-10);
  if (qr.rank() < p) fail(Errc::numerical_failure, "rank-deficient regression design");
  const Eigen::VectorXd c = qr.solve(b);
  e.type = CorrectionEntry::Type::poly;
  e.coeffs.resize(static_cast<std::size_t>(p));
  for (Eigen::Index k = 0; k < p; ++k) e.coeffs[static_cast<std::size_t>(k)] = c(k) / std::pow(scale, static_cast<double>(k));
  const Eigen::VectorXd resid = a * c - b;
  e.rms = std::sqrt(resid.squaredNorm() / static_cast<double>(n));

  // the derivative is linear in r, so checking both ends covers the range
  const auto slope = [&](double r) { return e.coeffs[1] + (degree == 2 ? 2.0 * e.coeffs[2] * r : 0.0); };
  const double tol = 1e-12 * (std::abs(e.coeffs[1]) + 1.0);
  if (slope(e.range_lo) < -tol || slope(e.range_hi) < -tol)
    fail(Errc::numerical_failure, "fitted correction decreases inside its validity range");
  return e;
}

std::vector<LuxSample> twin_lux_samples(const SensorTwin& twin, LightClass cls, double lo, double hi,
                                        std::size_t count) {
  if (!(lo > 0.0) || !(hi > lo) || count < 2) fail(Errc::config_error, "invalid lux sample range");
  const SensorTwin quiet = [&] {
    auto errors = twin.errors();
    errors.noise_std = 0.0;
    return twin.with_errors(errors);
  }();
  const Spd ref = reference_spd(cls);
  std::vector<LuxSample> out;
  for (std::size_t i = 0; i < count; ++i) {
    const double lux = lo * std::pow(hi / lo, static_cast<double>(i) / static_cast<double>(count - 1));
    const Spd spd = ref.scaled(lux / kReferenceLux);
    out.push_back({quiet.sense(spd, 0, cls).lux, illuminance(spd)});
  }
  return out;
}

namespace {

struct CalibrationRange {
  double lo;
  double hi;
};

CalibrationRange calibration_range(LightClass cls) {
  switch (cls) {
    case LightClass::sunrise:
    case LightClass::sunset: return {2.0, 400.0};
    case LightClass::daylight: return {150.0, 3000.0};
    case LightClass::strong_daylight: return {1000.0, 30000.0};
    default: return {2.0, 5000.0};
  }
}

}  // namespace

LuxCorrection calibrate_corrections(const SensorTwin& twin) {
  LuxCorrection c;
  for (std::size_t i = 0; i < kLightClassCount; ++i) {
    const auto cls = static_cast<LightClass>(i);
    if (cls == LightClass::dark) continue;
    const auto range = calibration_range(cls);
    const auto samples = twin_lux_samples(twin, cls, range.lo, range.hi);
    c.entries[cls] = fit_natural_correction(samples, is_natural(cls) ? 2 : 0);
  }
  return c;
}

LightClass classify_natural_subclass(const PseudoSpectrum& ps, LightClass classified,
                                     const TrainedClassifier& extended, const LuxCorrection& correction) {
  if (!is_natural(classified))
    fail(Errc::taxonomy_error, std::string(to_string(classified)) + " is not a natural light class");
  if (extended.taxonomy() != Taxonomy::extended)
    fail(Errc::taxonomy_error, "sub-class refinement needs an extended-taxonomy classifier");
  LightClass sub = extended.predict(ps);
  if (!is_natural(sub)) sub = LightClass::daylight;  // spectral evidence is ambiguous; the lux test decides below
  if (sub == LightClass::daylight || sub == LightClass::strong_daylight) {
    const double lux = correct_lux(ps.lux, LightClass::daylight, correction).lux;
    sub = lux > kStrongDaylightLux ? LightClass::strong_daylight : LightClass::daylight;
  }
  return sub;
}

ReferenceLibrary::ReferenceLibrary(std::map<LightClass, Spd> spectra, LuxCorrection correction)
    : spectra_(std::move(spectra)), correction_(std::move(correction)) {
  for (const auto& [cls, spd] : spectra_) {
    if (cls == LightClass::dark) continue;
    if (!(illuminance(spd) > 0.0))
      fail(Errc::degenerate_spectrum, "reference for " + std::string(to_string(cls)) + " has zero illuminance");
  }
}

ReferenceLibrary ReferenceLibrary::from_twin(const SensorTwin& twin) {
  std::map<LightClass, Spd> spectra;
  for (std::size_t i = 1; i < kLightClassCount; ++i) {
    const auto cls = static_cast<LightClass>(i);
    spectra.emplace(cls, reference_spd(cls));
  }
  return ReferenceLibrary(std::move(spectra), calibrate_corrections(twin));
}

const Spd* ReferenceLibrary::find(LightClass cls) const {
  const auto it = spectra_.find(cls);
  return it == spectra_.end() ? nullptr : &it->second;
}

std::string correction_json(const std::map<LightClass, CorrectionEntry>& entries) {
  json j = json::object();
  for (const auto& [cls, e] : entries) {
    json entry;
    entry["type"] = e.type == CorrectionEntry::Type::constant ? "constant" : "poly";
    entry["params"] = e.type == CorrectionEntry::Type::constant ? std::vector<double>{e.factor} : e.coeffs;
    entry["range_lux"] = {e.range_lo, e.range_hi};
    entry["rms"] = e.rms;
    j[std::string(to_string(cls))] = entry;
  }
  return j.dump(1) + "\n";
}

namespace {

std::map<LightClass, CorrectionEntry> corrections_from(const json& j) {
  std::map<LightClass, CorrectionEntry> out;
  for (const auto& [name, v] : j.items()) {
    CorrectionEntry e;
    const auto type = v.at("type").get<std::string>();
    const auto params = v.at("params").get<std::vector<double>>();
    if (type == "constant") {
      if (params.size() != 1 || !(params[0] > 0.0)) fail(Errc::parse_error, name + ": constant needs one factor > 0");
      e.type = CorrectionEntry::Type::constant;
      e.factor = params[0];
    } else if (type == "poly") {
      if (params.empty() || params.size() > 3) fail(Errc::parse_error, name + ": poly needs 1 to 3 coefficients");
      e.type = CorrectionEntry::Type::poly;
      e.coeffs = params;
    } else {
      fail(Errc::parse_error, name + ": unknown correction type '" + type + "'");
    }
    if (v.contains("range_lux")) {
      const auto r = v.at("range_lux").get<std::vector<double>>();
      if (r.size() != 2 || !(r[1] >= r[0])) fail(Errc::parse_error, name + ": range_lux must be [lo, hi]");
      e.range_lo = r[0];
      e.range_hi = r[1];
    } else if (e.type == CorrectionEntry::Type::poly) {
      fail(Errc::parse_error, name + ": poly correction needs range_lux");
    }
    e.rms = v.value("rms", 0.0);
    out[parse_light_class(name)] = std::move(e);
  }
  return out;
}

}  // namespace

std::map<LightClass, CorrectionEntry> parse_correction_json(std::string_view text) {
  try {
    return corrections_from(json::parse(text));
  } catch (const json::exception& e) {
    fail(Errc::parse_error, std::string("correction JSON: ") + e.what());
  }
}

ReferenceLibrary ReferenceLibrary::load(const std::filesystem::path& manifest) {
  json j;
  try {
    j = json::parse(csv::read_text(manifest));
  } catch (const json::exception& e) {
    fail(Errc::parse_error, "library manifest: " + std::string(e.what()));
  }
  try {
    const auto base = manifest.parent_path();
    std::map<LightClass, Spd> spectra;
    for (const auto& [name, path] : j.at("spectra").items()) {
      const std::filesystem::path p = path.get<std::string>();
      spectra.emplace(parse_light_class(name), read_spd_csv(p.is_absolute() ? p : base / p));
    }
    LuxCorrection correction;
    if (j.contains("corrections")) correction.entries = corrections_from(j.at("corrections"));
    return ReferenceLibrary(std::move(spectra), std::move(correction));
  } catch (const json::exception& e) {
    fail(Errc::parse_error, "library manifest: " + std::string(e.what()));
  }
}

void ReferenceLibrary::save(const std::filesystem::path& dir) const {
  json j;
  j["spectra"] = json::object();
  for (const auto& [cls, spd] : spectra_) {
    const std::string file = std::string(to_string(cls)) + ".csv";
    write_spd_csv(dir / file, spd);
    j["spectra"][std::string(to_string(cls))] = file;
  }
  j["corrections"] = json::parse(correction_json(correction_.entries));
  csv::write_text(dir / "manifest.json", j.dump(1) + "\n");
}

Spd reconstruct(LightClass cls, double corrected_lux, const ReferenceLibrary& library) {
  if (cls == LightClass::dark) return Spd::zero(reference_grid());
  const Spd* ref = library.find(cls);
  if (!ref) fail(Errc::missing_reference, "no reference spectrum for " + std::string(to_string(cls)));
  return scale_to_lux(*ref, corrected_lux);
}

}  // namespace lxh
