#include "skintone/error.hpp"

namespace skintone {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::parse: return "parse error";
    case Errc::duplicate_key: return "duplicate key";
    case Errc::empty_manifest: return "empty manifest";
    case Errc::invalid_argument: return "invalid argument";
    case Errc::out_of_bounds: return "out of bounds";
    case Errc::too_few_pixels: return "too few pixels";
    case Errc::all_zero: return "all-zero input";
    case Errc::zero_variance: return "zero variance";
    case Errc::degenerate_kernel: return "degenerate kernel";
    case Errc::insufficient_data: return "insufficient data";
    case Errc::version_mismatch: return "version mismatch";
    case Errc::malformed_model: return "malformed model";
    case Errc::missing_cell: return "missing cell";
    case Errc::io: return "i/o error";
  }
  return "unknown error";
}

Error::Error(Errc code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

} // namespace skintone
