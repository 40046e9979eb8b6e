#include "skintone/colorspace.hpp"

#include <array>
#include <cmath>
#include <numbers>

namespace skintone {

namespace {

// IEC 61966-2-1 sRGB -> XYZ. The reference white is the image of (1,1,1)
// under this matrix, so every gray maps to a = b = 0.
constexpr double kM[3][3] = {
    {0.4124, 0.3576, 0.1805},
    {0.2126, 0.7152, 0.0722},
    {0.0193, 0.1192, 0.9505},
};
constexpr double kWhite[3] = {
    kM[0][0] + kM[0][1] + kM[0][2],
    kM[1][0] + kM[1][1] + kM[1][2],
    kM[2][0] + kM[2][1] + kM[2][2],
};

constexpr double kDelta = 6.0 / 29.0;

double lab_f(double t) noexcept {
  if (t > kDelta * kDelta * kDelta) return std::cbrt(t);
  return t / (3.0 * kDelta * kDelta) + 4.0 / 29.0;
}

const std::array<double, 256>& linear_table() {
  static const std::array<double, 256> table = [] {
    std::array<double, 256> t{};
    for (int i = 0; i < 256; ++i) t[i] = srgb_decode(i / 255.0);
    return t;
  }();
  return table;
}

} // namespace

double srgb_decode(double v) noexcept {
  if (v <= 0.04045) return v / 12.92;
  return std::pow((v + 0.055) / 1.055, 2.4);
}

double srgb_encode(double x) noexcept {
  if (x <= 0.0031308) return 12.92 * x;
  return 1.055 * std::pow(x, 1.0 / 2.4) - 0.055;
}

double srgb_to_linear(std::uint8_t channel) noexcept { return linear_table()[channel]; }

Vec3 to_linear(RgbPixel p) noexcept {
  const auto& t = linear_table();
  return {t[p.r], t[p.g], t[p.b]};
}

LabPixel linear_to_lab(const Vec3& rgb) noexcept {
  double xyz[3];
  for (int i = 0; i < 3; ++i) {
    xyz[i] = (kM[i][0] * rgb[0] + kM[i][1] * rgb[1] + kM[i][2] * rgb[2]) / kWhite[i];
  }
  const double fx = lab_f(xyz[0]);
  const double fy = lab_f(xyz[1]);
  const double fz = lab_f(xyz[2]);
  return {116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz)};
}

LabPixel srgb_to_lab(RgbPixel p) noexcept { return linear_to_lab(to_linear(p)); }

double lab_ita(double L, double b) noexcept {
  const double dl = L - 50.0;
  if (b == 0.0) {
    if (dl > 0.0) return 90.0;
    if (dl < 0.0) return -90.0;
    return 0.0;
  }
  return std::atan(dl / b) * (180.0 / std::numbers::pi);
}

} // namespace skintone
