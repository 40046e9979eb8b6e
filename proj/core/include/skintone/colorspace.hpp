#pragma once

#include <Eigen/Core>

#include <compare>
#include <cstdint>

namespace skintone {

using Vec3 = Eigen::Vector3d;

struct RgbPixel {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;

  friend constexpr auto operator<=>(const RgbPixel&, const RgbPixel&) = default;
};

struct LabPixel {
  double L = 0.0;
  double a = 0.0;
  double b = 0.0;
};

/// sRGB transfer function, both directions, on [0,1] values.
double srgb_decode(double encoded) noexcept;
double srgb_encode(double linear) noexcept;

/// 8-bit sRGB channel to linear [0,1] (table lookup).
double srgb_to_linear(std::uint8_t channel) noexcept;
Vec3 to_linear(RgbPixel p) noexcept;

/// Linear RGB -> CIE-Lab, D65 white, 2 degree observer.
LabPixel linear_to_lab(const Vec3& linear) noexcept;
LabPixel srgb_to_lab(RgbPixel p) noexcept;

/// Individual typology angle in degrees: atan((L - 50) / b) * 180 / pi.
/// At b == 0 the limit is taken: +90 above L = 50, -90 below, 0 at L = 50.
double lab_ita(double L, double b) noexcept;
inline double lab_ita(const LabPixel& p) noexcept { return lab_ita(p.L, p.b); }

} // namespace skintone
