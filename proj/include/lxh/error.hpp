#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace lxh {

enum class Errc {
  invalid_grid,
  degenerate_spectrum,
  shape_mismatch,
  unknown_class,
  invalid_channel_value,
  config_error,
  invalid_fold,
  degenerate_training,
  numerical_failure,
  taxonomy_error,
  missing_correction,
  missing_reference,
  out_of_range,
  converter_range_exceeded,
  invalid_timeline,
  cannot_size,
  empty_result,
  io_error,
  parse_error,
};

std::string_view to_string(Errc code);

/// Every failure raised by the library carries one of the codes above so the
/// CLI can map it onto an exit status.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message);

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] void fail(Errc code, const std::string& message);

}  // namespace lxh
