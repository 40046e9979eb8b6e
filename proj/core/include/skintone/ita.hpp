#pragma once

#include "skintone/ingestion.hpp"

#include <span>
#include <vector>

namespace skintone {

/// Per-pixel ITA degrees, aligned with the coords of the patch it came from.
struct ItaMap {
  std::vector<double> values;
};

struct ItaOptions {
  int kernel = 5;  // odd box-filter width
};

ItaMap ita_map(const PixelPatch& patch);

/// Box filter over the kernel x kernel window, restricted to pixels that belong
/// to the patch; windows clipped by the patch boundary average what they hold.
ItaMap smooth_ita(const ItaMap& map, std::span<const Point> coords, int kernel = 5);

/// Mode of a 1-degree histogram over [-90, 90]; returns the bin center.
/// Ties go to the lower bin.
double region_ita(const ItaMap& smoothed);

/// Mean of the available region modes.
double face_ita(std::span<const double> region_values);

/// ita_map -> smooth_ita -> region_ita per patch, then face_ita.
double face_ita(std::span<const PixelPatch> patches, const ItaOptions& options = {});

} // namespace skintone
