#pragma once

#include "skintone/colorspace.hpp"
#include "skintone/image.hpp"

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace skintone {

enum class RegionKind { forehead = 0, left_cheek = 1, right_cheek = 2 };

inline constexpr RegionKind kAllRegions[] = {RegionKind::forehead, RegionKind::left_cheek,
                                             RegionKind::right_cheek};

std::string_view to_string(RegionKind kind) noexcept;
std::optional<RegionKind> parse_region_kind(std::string_view name) noexcept;

/// Integer pixel-corner coordinates; pixel (x, y) covers [x, x+1) x [y, y+1).
struct Point {
  int x = 0;
  int y = 0;

  friend constexpr bool operator==(const Point&, const Point&) = default;
};

struct RegionPolygon {
  RegionKind kind = RegionKind::forehead;
  std::vector<Point> vertices;
};

/// Throws Errc::invalid_argument unless the polygon has >= 3 vertices,
/// non-negative coordinates, and no crossing edges.
void validate_polygon(const RegionPolygon& poly);

struct SampleRecord {
  std::string image_path;
  std::string subject_id;
  std::string sample_id;
  std::optional<std::string> group_label;
  std::vector<RegionPolygon> regions;  // forehead, left_cheek, right_cheek order
};

struct DatasetManifest {
  std::string dataset_name;
  std::vector<SampleRecord> samples;
  std::filesystem::path base_dir;  // relative image paths resolve against this

  std::filesystem::path resolve(const SampleRecord& s) const;
};

/// JSON Lines manifest; one SampleRecord per non-blank line. The dataset name
/// defaults to the file stem.
DatasetManifest load_manifest(const std::filesystem::path& path);
DatasetManifest parse_manifest(std::istream& in, std::string dataset_name,
                               std::filesystem::path base_dir = {});
void write_manifest(std::ostream& out, const DatasetManifest& manifest);

struct PixelPatch {
  RegionKind kind = RegionKind::forehead;
  std::vector<RgbPixel> pixels;
  std::vector<Point> coords;

  std::size_t size() const noexcept { return pixels.size(); }
};

struct PatchOptions {
  std::size_t min_patch_pixels = 64;
};

/// Pixels whose centers lie inside the polygon under the even-odd rule, in
/// row-major order. Scanline fill over the polygon's row span.
PixelPatch extract_patch(const RgbImage& image, const RegionPolygon& poly,
                         const PatchOptions& options = {});

/// One patch per region of the record, in region order.
std::vector<PixelPatch> extract_patches(const RgbImage& image, const SampleRecord& record,
                                        const PatchOptions& options = {});

} // namespace skintone
