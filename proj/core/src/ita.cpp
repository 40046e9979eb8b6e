#include "skintone/ita.hpp"

#include "skintone/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace skintone {

ItaMap ita_map(const PixelPatch& patch) {
  ItaMap out;
  out.values.reserve(patch.size());
  for (const RgbPixel& p : patch.pixels) out.values.push_back(lab_ita(srgb_to_lab(p)));
  return out;
}

ItaMap smooth_ita(const ItaMap& map, std::span<const Point> coords, int kernel) {
  if (kernel < 1 || kernel % 2 == 0) {
    throw Error(Errc::invalid_argument, "ITA kernel must be an odd integer >= 1, got " +
                                            std::to_string(kernel));
  }
  if (coords.size() != map.values.size()) {
    throw Error(Errc::invalid_argument, "ITA map and coordinate list differ in length");
  }
  if (kernel == 1 || map.values.empty()) return map;

  int x0 = coords[0].x, x1 = coords[0].x, y0 = coords[0].y, y1 = coords[0].y;
  for (const Point& p : coords) {
    x0 = std::min(x0, p.x);
    x1 = std::max(x1, p.x);
    y0 = std::min(y0, p.y);
    y1 = std::max(y1, p.y);
  }
  const int w = x1 - x0 + 1;
  const int h = y1 - y0 + 1;
  // Index of the patch member at each bounding-box cell, -1 where absent.
  std::vector<int> grid(static_cast<std::size_t>(w) * h, -1);
  for (std::size_t i = 0; i < coords.size(); ++i) {
    grid[static_cast<std::size_t>(coords[i].y - y0) * w + (coords[i].x - x0)] = static_cast<int>(i);
  }

  const int r = kernel / 2;
  ItaMap out;
  out.values.resize(map.values.size());
  for (std::size_t i = 0; i < coords.size(); ++i) {
    const int cx = coords[i].x - x0;
    const int cy = coords[i].y - y0;
    double sum = 0.0;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    int count = 0;
    for (int y = std::max(0, cy - r); y <= std::min(h - 1, cy + r); ++y) {
      for (int x = std::max(0, cx - r); x <= std::min(w - 1, cx + r); ++x) {
        const int idx = grid[static_cast<std::size_t>(y) * w + x];
        if (idx < 0) continue;
        const double v = map.values[static_cast<std::size_t>(idx)];
        sum += v;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
        ++count;
      }
    }
    // The clamp absorbs summation rounding so the result stays a convex combination.
    out.values[i] = std::clamp(sum / count, lo, hi);
  }
  return out;
}

double region_ita(const ItaMap& smoothed) {
  if (smoothed.values.empty()) throw Error(Errc::insufficient_data, "empty ITA map");
  std::array<std::size_t, 180> hist{};
  for (double v : smoothed.values) {
    const int bin = std::clamp(static_cast<int>(std::floor(v + 90.0)), 0, 179);
    ++hist[static_cast<std::size_t>(bin)];
  }
  // max_element returns the first maximum, i.e. the lower bin on ties.
  const auto mode = std::max_element(hist.begin(), hist.end()) - hist.begin();
  return -90.0 + static_cast<double>(mode) + 0.5;
}

double face_ita(std::span<const double> region_values) {
  if (region_values.empty()) throw Error(Errc::insufficient_data, "no region ITA values");
  // Summing in sorted order makes the mean exactly permutation-invariant.
  std::vector<double> sorted(region_values.begin(), region_values.end());
  std::sort(sorted.begin(), sorted.end());
  double sum = 0.0;
  for (double v : sorted) sum += v;
  return sum / static_cast<double>(sorted.size());
}

double face_ita(std::span<const PixelPatch> patches, const ItaOptions& options) {
  std::vector<double> modes;
  modes.reserve(patches.size());
  for (const auto& patch : patches) {
    modes.push_back(region_ita(smooth_ita(ita_map(patch), patch.coords, options.kernel)));
  }
  return face_ita(modes);
}

} // namespace skintone
