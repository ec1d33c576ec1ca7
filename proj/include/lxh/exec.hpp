#pragma once

#include <cstddef>

namespace lxh {

/// Selects between the OpenMP kernels and their serial reference versions.
/// Both paths must produce bit-identical results.
enum class Exec { serial, parallel };

}  // namespace lxh
