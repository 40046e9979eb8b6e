#pragma once

#include "skintone/colorspace.hpp"
#include "skintone/ingestion.hpp"
#include "skintone/nnmf.hpp"

#include <Eigen/Core>

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace skintone {

/// Two-color split of a patch into body (diffuse) and interface (specular)
/// reflection. Basis columns are L1-normalized.
struct DichromaticDecomposition {
  Basis basis = Basis::Zero();
  Activations activations;
  int diffuse_index = 0;
  int specular_index = 1;
  double recon_rel_error = 0.0;
};

struct BasisRoles {
  int diffuse = 0;
  int specular = 1;
};

/// The specular column is the one at the smaller angle to `illuminant`
/// (default white). Angles within 1e-6 rad of each other resolve to column 0.
BasisRoles classify_bases(const Basis& W, const Vec3& illuminant = Vec3::Ones());

/// Mean diffuse radiance per pixel: diffuse color times mean diffuse activation.
struct DiffuseFeature {
  Vec3 value = Vec3::Zero();

  friend bool operator==(const DiffuseFeature&, const DiffuseFeature&) = default;
};

struct DiffuseOptions {
  NnmfOptions nnmf;
  Vec3 illuminant = Vec3::Ones();
  /// After the free factorization, re-fit the activations with the specular
  /// column held at the illuminant color.
  bool pin_specular = true;
};

/// Decomposition of a 3 x N linear-RGB matrix (columns in caller order).
DichromaticDecomposition decompose(const ColorMatrix& linear, const DiffuseOptions& options = {});

DiffuseFeature diffuse_feature(const DichromaticDecomposition& d);

/// Linearizes the patch, sorts pixels into canonical order, decomposes.
DichromaticDecomposition decompose_patch(const PixelPatch& patch, const DiffuseOptions& options = {});
DiffuseFeature extract_diffuse(const PixelPatch& patch, const DiffuseOptions& options = {});

/// Kernel PCA state for the first component of an RBF kernel over anchors.
struct SredsModel {
  static constexpr int kVersion = 1;

  Eigen::Matrix<double, Eigen::Dynamic, 3> anchors;  // M x 3
  double gamma = 0.0;                                // k(x, y) = exp(-gamma |x - y|^2)
  Eigen::VectorXd row_means;                         // M
  double grand_mean = 0.0;
  Eigen::VectorXd alpha;                             // v1 / sqrt(lambda1)
  double eigenvalue = 0.0;
  int sign = 1;
  std::uint64_t seed = 0;
  std::string trained_on;
  int version = kVersion;

  std::size_t anchor_count() const noexcept { return static_cast<std::size_t>(anchors.rows()); }
};

struct SredsFitOptions {
  std::size_t max_anchors = 2000;
  std::optional<double> gamma;  // default: 1 / (2 median^2) of pairwise anchor distances
  std::uint64_t seed = 0;
};

/// Anchors beyond max_anchors are thinned by a seeded shuffle; the retained
/// features keep their input order. Sign makes anchor scores correlate
/// positively with the anchors' summed diffuse radiance.
SredsModel fit_sreds(std::span<const DiffuseFeature> features, const SredsFitOptions& options,
                     std::string dataset_name);

/// Median-heuristic bandwidth over the rows of `points`.
double median_heuristic_gamma(const Eigen::Matrix<double, Eigen::Dynamic, 3>& points);

double project_sreds(const SredsModel& model, const DiffuseFeature& feature);

/// Scores of the anchors themselves (sign * Kc * alpha).
Eigen::VectorXd anchor_scores(const SredsModel& model);

double face_sreds(const SredsModel& model, std::span<const DiffuseFeature> region_features);
double face_sreds(const SredsModel& model, std::span<const PixelPatch> patches,
                  const DiffuseOptions& options = {});

std::string sreds_to_json(const SredsModel& model);
SredsModel sreds_from_json(const std::string& text);
void save_sreds(const SredsModel& model, const std::filesystem::path& path);
SredsModel load_sreds(const std::filesystem::path& path);

} // namespace skintone
