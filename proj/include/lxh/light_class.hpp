#pragma once

#include <cstdint>
#include <span>
#include <string_view>

namespace lxh {

/// Light-source classes. Enumerator order is the canonical order used to
/// break every tie (votes, argmax, confusion-matrix layout).
enum class LightClass : std::uint8_t {
  dark,
  led_3000k,
  led_4000k,
  cfl_2700k,
  cfl_6500k,
  nltw_clear,
  nltw_cloudy,
  sunrise,
  sunset,
  daylight,
  strong_daylight,
};

inline constexpr std::size_t kLightClassCount = 11;

/// base: the 7 controlled-lab classes; extended: natural light split into
/// four times-of-day sub-classes.
enum class Taxonomy { base, extended };

std::span<const LightClass> classes_of(Taxonomy taxonomy);
bool belongs_to(LightClass cls, Taxonomy taxonomy);
bool is_natural(LightClass cls);
bool is_artificial(LightClass cls);

std::string_view to_string(LightClass cls);
LightClass parse_light_class(std::string_view name);

std::string_view to_string(Taxonomy taxonomy);
Taxonomy parse_taxonomy(std::string_view name);

inline std::size_t index_of(LightClass cls) { return static_cast<std::size_t>(cls); }

}  // namespace lxh
