#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace skintone {

enum class Errc {
  parse,
  duplicate_key,
  empty_manifest,
  invalid_argument,
  out_of_bounds,
  too_few_pixels,
  all_zero,
  zero_variance,
  degenerate_kernel,
  insufficient_data,
  version_mismatch,
  malformed_model,
  missing_cell,
  io,
};

std::string_view to_string(Errc code) noexcept;

/// Every recoverable failure in the library is reported as an Error; code()
/// lets callers (and tests) branch on the failure class without parsing text.
class Error : public std::runtime_error {
public:
  Error(Errc code, const std::string& message);

  Errc code() const noexcept { return code_; }

private:
  Errc code_;
};

} // namespace skintone
