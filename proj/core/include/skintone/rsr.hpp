#pragma once

#include "skintone/colorspace.hpp"
#include "skintone/image.hpp"
#include "skintone/ingestion.hpp"

#include <filesystem>
#include <span>
#include <string>

namespace skintone {

/// PCA line through per-face mean skin colors (linear RGB).
struct RsrModel {
  static constexpr int kVersion = 1;

  Vec3 mean_rgb = Vec3::Zero();
  Vec3 direction = Vec3::UnitX();  // unit length
  int sign = 1;                    // +1 or -1
  std::string trained_on;
  int version = kVersion;
  bool normalization_applied = false;

  friend bool operator==(const RsrModel&, const RsrModel&) = default;
};

/// Gray-world channel gains for an image: mean linear luminance over the
/// per-channel means. Applying them makes the whole image average to gray.
Vec3 gray_world_gains(const RgbImage& image);

/// Pixel-weighted mean over all patches, in linear RGB, times `gains`.
Vec3 face_mean_rgb(std::span<const PixelPatch> patches, const Vec3& gains = Vec3::Ones());

/// Oriented so that scores correlate positively with r + g + b.
RsrModel fit_rsr(std::span<const Vec3> faces, std::string dataset_name,
                 bool normalization_applied = false);

double score_rsr(const RsrModel& model, const Vec3& face);

std::string rsr_to_json(const RsrModel& model);
RsrModel rsr_from_json(const std::string& text);
void save_rsr(const RsrModel& model, const std::filesystem::path& path);
RsrModel load_rsr(const std::filesystem::path& path);

} // namespace skintone
