#include "lxh/error.hpp"

namespace lxh {

std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::invalid_grid: return "InvalidGrid";
    case Errc::degenerate_spectrum: return "DegenerateSpectrum";
    case Errc::shape_mismatch: return "ShapeMismatch";
    case Errc::unknown_class: return "UnknownClass";
    case Errc::invalid_channel_value: return "InvalidChannelValue";
    case Errc::config_error: return "ConfigError";
    case Errc::invalid_fold: return "InvalidFold";
    case Errc::degenerate_training: return "DegenerateTraining";
    case Errc::numerical_failure: return "NumericalFailure";
    case Errc::taxonomy_error: return "TaxonomyError";
    case Errc::missing_correction: return "MissingCorrection";
    case Errc::missing_reference: return "MissingReference";
    case Errc::out_of_range: return "OutOfRange";
    case Errc::converter_range_exceeded: return "ConverterRangeExceeded";
    case Errc::invalid_timeline: return "InvalidTimeline";
    case Errc::cannot_size: return "CannotSize";
    case Errc::empty_result: return "EmptyResult";
    case Errc::io_error: return "IoError";
    case Errc::parse_error: return "ParseError";
  }
  return "Unknown";
}

Error::Error(Errc code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

void fail(Errc code, const std::string& message) { throw Error(code, message); }

}  // namespace lxh
