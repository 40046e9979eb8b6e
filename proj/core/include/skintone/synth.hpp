#pragma once

#include "skintone/colorspace.hpp"
#include "skintone/ingestion.hpp"
#include "skintone/nnmf.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace skintone {

/// Dichromatic forward model parameters for a synthetic population.
struct SynthSpec {
  std::string dataset_name = "synth";
  std::size_t n_subjects = 40;
  std::size_t samples_per_subject = 5;
  double melanin_lo = 0.25;
  double melanin_hi = 1.0;
  bool melanin_grid = false;  // evenly spaced over the range instead of random draws
  Vec3 base_albedo{0.75, 0.55, 0.45};
  std::vector<Vec3> illuminants{Vec3(1.0, 1.0, 1.0), Vec3(1.0, 0.95, 0.9), Vec3(0.92, 0.96, 1.0)};
  double specular_lo = 0.0;
  double specular_hi = 0.2;
  double shading_variation = 0.1;
  double noise_sigma = 0.005;
  std::size_t patch_size = 256;
  std::size_t min_patch_pixels = 64;
  std::uint64_t seed = 0;
};

/// Every violated field, one message per field; empty when the spec is valid.
std::vector<std::string> validation_errors(const SynthSpec& spec);
/// Throws Errc::invalid_argument listing validation_errors().
void validate(const SynthSpec& spec);

/// JSON object with the SynthSpec field names; ranges are two-element arrays
/// (`melanin_range`, `specular_range`). Missing keys keep their defaults.
SynthSpec parse_synth_spec(const std::string& json_text);
SynthSpec load_synth_spec(const std::filesystem::path& path);
std::string synth_spec_to_json(const SynthSpec& spec);

struct RenderParams {
  Vec3 albedo = Vec3::Zero();
  Vec3 illuminant = Vec3::Ones();
  double specular_strength = 0.0;
  double shading_sigma = 0.0;
  double noise_sigma = 0.0;
  std::size_t n_pixels = 0;
  std::uint64_t seed = 0;
};

/// Clamped linear radiance before quantization:
/// g_j * (albedo * illuminant) + s_j * illuminant + eps_j with
/// g ~ lognormal(0, shading), s ~ |N(0, specular)|, eps ~ N(0, noise).
ColorMatrix render_linear(const RenderParams& params);

/// render_linear, sRGB-encoded and rounded to 8 bits. Pixels are laid out
/// row-major on a grid of patch_width(n_pixels) columns.
PixelPatch render_patch(const RenderParams& params);

/// Columns of the square-ish grid used for a patch of n pixels.
std::size_t patch_width(std::size_t n_pixels) noexcept;

/// Writes `<out_dir>/<dataset_name>.jsonl` plus `<out_dir>/images/*.png`.
/// Output bytes depend only on the spec, never on `threads`.
DatasetManifest generate_dataset(const SynthSpec& spec, const std::filesystem::path& out_dir,
                                 std::size_t threads = 1);

/// Melanin scale of subject `index` (grid position or seeded draw).
double subject_melanin(const SynthSpec& spec, std::size_t index);

/// Inverse of the subject-id encoding used by generate_dataset.
std::optional<double> melanin_from_subject_id(const std::string& subject_id);

} // namespace skintone
