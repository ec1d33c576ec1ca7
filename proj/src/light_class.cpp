#include "lxh/light_class.hpp"

#include <array>
#include <string>

#include "lxh/error.hpp"

namespace lxh {

namespace {

constexpr std::array<std::string_view, kLightClassCount> kNames = {
    "dark",      "led_3000k", "led_4000k", "cfl_2700k", "cfl_6500k",      "nltw_clear",
    "nltw_cloudy", "sunrise", "sunset",    "daylight",  "strong_daylight",
};

constexpr std::array<LightClass, 7> kBase = {
    LightClass::dark,      LightClass::led_3000k,  LightClass::led_4000k,   LightClass::cfl_2700k,
    LightClass::cfl_6500k, LightClass::nltw_clear, LightClass::nltw_cloudy,
};

constexpr std::array<LightClass, 9> kExtended = {
    LightClass::dark,      LightClass::led_3000k, LightClass::led_4000k,
    LightClass::cfl_2700k, LightClass::cfl_6500k, LightClass::sunrise,
    LightClass::sunset,    LightClass::daylight,  LightClass::strong_daylight,
};

}  // namespace

std::span<const LightClass> classes_of(Taxonomy taxonomy) {
  if (taxonomy == Taxonomy::base) return kBase;
  return kExtended;
}

bool belongs_to(LightClass cls, Taxonomy taxonomy) {
  for (auto c : classes_of(taxonomy))
    if (c == cls) return true;
  return false;
}

bool is_natural(LightClass cls) {
  switch (cls) {
    case LightClass::nltw_clear:
    case LightClass::nltw_cloudy:
    case LightClass::sunrise:
    case LightClass::sunset:
    case LightClass::daylight:
    case LightClass::strong_daylight:
      return true;
    default:
      return false;
  }
}

bool is_artificial(LightClass cls) { return cls != LightClass::dark && !is_natural(cls); }

std::string_view to_string(LightClass cls) { return kNames[index_of(cls)]; }

LightClass parse_light_class(std::string_view name) {
  for (std::size_t i = 0; i < kNames.size(); ++i)
    if (kNames[i] == name) return static_cast<LightClass>(i);
  fail(Errc::unknown_class, "unknown light class '" + std::string(name) + "'");
}

std::string_view to_string(Taxonomy taxonomy) {
  return taxonomy == Taxonomy::base ? "base" : "extended";
}

Taxonomy parse_taxonomy(std::string_view name) {
  if (name == "base") return Taxonomy::base;
  if (name == "extended") return Taxonomy::extended;
  fail(Errc::config_error, "unknown taxonomy '" + std::string(name) + "'");
}

}  // namespace lxh
