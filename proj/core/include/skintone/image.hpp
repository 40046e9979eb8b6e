#pragma once

#include "skintone/colorspace.hpp"

#include <cstddef>
#include <filesystem>
#include <vector>

namespace skintone {

/// Row-major 8-bit RGB raster.
struct RgbImage {
  int width = 0;
  int height = 0;
  std::vector<RgbPixel> pixels;

  RgbImage() = default;
  RgbImage(int w, int h, RgbPixel fill = {})
      : width(w), height(h), pixels(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), fill) {}

  RgbPixel& at(int x, int y) { return pixels[static_cast<std::size_t>(y) * width + x]; }
  const RgbPixel& at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }
};

/// Decodes PNG or JPEG; an alpha channel, if present, is dropped.
RgbImage read_image(const std::filesystem::path& path);

/// Lossless PNG with fixed encoder settings (byte-stable for a given build).
void write_png(const std::filesystem::path& path, const RgbImage& image);

} // namespace skintone
