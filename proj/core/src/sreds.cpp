#include "skintone/sreds.hpp"

#include "skintone/error.hpp"
#include "skintone/random.hpp"

#include "json_writer.hpp"
#include "model_io.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace skintone {

namespace {

using AnchorMatrix = Eigen::Matrix<double, Eigen::Dynamic, 3>;

double angle_to(const Eigen::Vector3d& v, const Vec3& ref) {
  const double c = v.dot(ref) / (v.norm() * ref.norm());
  return std::acos(std::clamp(c, -1.0, 1.0));
}

double sorted_mean(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

} // namespace

BasisRoles classify_bases(const Basis& W, const Vec3& illuminant) {
  for (int k = 0; k < 2; ++k) {
    if (!(W.col(k).norm() > 0.0)) {
      throw Error(Errc::invalid_argument, "basis column " + std::to_string(k) + " is zero");
    }
  }
  const double a0 = angle_to(W.col(0), illuminant);
  const double a1 = angle_to(W.col(1), illuminant);
  if (std::abs(a0 - a1) <= 1e-6 || a0 < a1) return {1, 0};
  return {0, 1};
}

DichromaticDecomposition decompose(const ColorMatrix& linear, const DiffuseOptions& options) {
  const NnmfResult free_fit = nnmf(linear, options.nnmf);
  const BasisRoles roles = classify_bases(free_fit.W, options.illuminant);

  DichromaticDecomposition d;
  if (!options.pin_specular) {
    d.basis = free_fit.W;
    d.activations = free_fit.H;
    d.diffuse_index = roles.diffuse;
    d.specular_index = roles.specular;
    d.recon_rel_error = free_fit.rel_error;
    return d;
  }

  Basis W0;
  W0.col(0) = free_fit.W.col(roles.diffuse);
  W0.col(1) = options.illuminant / options.illuminant.sum();
  const NnmfResult pinned = nnmf_from(linear, W0, options.nnmf, {false, true});
  d.basis = pinned.W;
  d.activations = pinned.H;
  d.diffuse_index = 0;
  d.specular_index = 1;
  d.recon_rel_error = pinned.rel_error;
  return d;
}

DiffuseFeature diffuse_feature(const DichromaticDecomposition& d) {
  const double mean_activation = d.activations.row(d.diffuse_index).mean();
  return {d.basis.col(d.diffuse_index) * mean_activation};
}

DichromaticDecomposition decompose_patch(const PixelPatch& patch, const DiffuseOptions& options) {
  // Canonical pixel order: the result cannot depend on scan order.
  std::vector<RgbPixel> pixels = patch.pixels;
  std::sort(pixels.begin(), pixels.end());
  ColorMatrix V(3, static_cast<Eigen::Index>(pixels.size()));
  for (std::size_t j = 0; j < pixels.size(); ++j) V.col(static_cast<Eigen::Index>(j)) = to_linear(pixels[j]);
  return decompose(V, options);
}

DiffuseFeature extract_diffuse(const PixelPatch& patch, const DiffuseOptions& options) {
  return diffuse_feature(decompose_patch(patch, options));
}

double median_heuristic_gamma(const AnchorMatrix& points) {
  const Eigen::Index m = points.rows();
  std::vector<double> dist;
  dist.reserve(static_cast<std::size_t>(m * (m - 1) / 2));
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = i + 1; j < m; ++j) dist.push_back((points.row(i) - points.row(j)).norm());
  }
  auto median_of = [](std::vector<double>& v) {
    const std::size_t mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
    double med = v[mid];
    if (v.size() % 2 == 0) {
      med = 0.5 * (med + *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid)));
    }
    return med;
  };
  if (dist.empty()) throw Error(Errc::degenerate_kernel, "need at least 2 anchors for a bandwidth");
  double med = median_of(dist);
  if (med == 0.0) {
    // Mostly duplicated anchors: take the median over distinct pairs instead.
    std::erase(dist, 0.0);
    if (dist.empty()) throw Error(Errc::degenerate_kernel, "all anchors coincide");
    med = median_of(dist);
  }
  return 1.0 / (2.0 * med * med);
}

SredsModel fit_sreds(std::span<const DiffuseFeature> features, const SredsFitOptions& options,
                     std::string dataset_name) {
  if (features.size() < 2) {
    throw Error(Errc::insufficient_data, "SREDS fit needs at least 2 features, got " +
                                             std::to_string(features.size()));
  }
  if (options.max_anchors < 2) throw Error(Errc::invalid_argument, "max_anchors must be >= 2");

  std::vector<std::size_t> keep(features.size());
  std::iota(keep.begin(), keep.end(), std::size_t{0});
  if (keep.size() > options.max_anchors) {
    Rng rng(derive_seed(options.seed, {0x616e63686f72ULL}));
    for (std::size_t i = keep.size() - 1; i > 0; --i) std::swap(keep[i], keep[rng.below(i + 1)]);
    keep.resize(options.max_anchors);
    std::sort(keep.begin(), keep.end());
  }

  SredsModel model;
  model.seed = options.seed;
  model.trained_on = std::move(dataset_name);
  const auto m = static_cast<Eigen::Index>(keep.size());
  model.anchors.resize(m, 3);
  for (Eigen::Index i = 0; i < m; ++i) {
    model.anchors.row(i) = features[keep[static_cast<std::size_t>(i)]].value.transpose();
  }

  if (options.gamma) {
    if (!(*options.gamma > 0.0) || !std::isfinite(*options.gamma)) {
      throw Error(Errc::invalid_argument, "gamma must be a positive finite number");
    }
    model.gamma = *options.gamma;
  } else {
    model.gamma = median_heuristic_gamma(model.anchors);
  }

  Eigen::MatrixXd K(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    K(i, i) = 1.0;
    for (Eigen::Index j = i + 1; j < m; ++j) {
      const double v = std::exp(-model.gamma * (model.anchors.row(i) - model.anchors.row(j)).squaredNorm());
      K(i, j) = v;
      K(j, i) = v;
    }
  }
  model.row_means = K.rowwise().mean();
  model.grand_mean = model.row_means.mean();
  Eigen::MatrixXd Kc = K;
  Kc.colwise() -= model.row_means;
  Kc.rowwise() -= model.row_means.transpose();
  Kc.array() += model.grand_mean;

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(Kc);
  if (eig.info() != Eigen::Success) throw Error(Errc::degenerate_kernel, "eigensolver failed");
  const double lambda = eig.eigenvalues()(m - 1);
  if (!(lambda > 1e-12)) {
    throw Error(Errc::degenerate_kernel, "leading centered-kernel eigenvalue " + std::to_string(lambda) +
                                             " <= 1e-12 (features too similar)");
  }
  model.eigenvalue = lambda;
  model.alpha = eig.eigenvectors().col(m - 1) / std::sqrt(lambda);

  const Eigen::VectorXd scores = Kc * model.alpha;
  const Eigen::VectorXd lum = model.anchors.rowwise().sum();
  const double cov = (scores.array() - scores.mean()).matrix().dot((lum.array() - lum.mean()).matrix());
  model.sign = cov < 0.0 ? -1 : 1;
  return model;
}

double project_sreds(const SredsModel& model, const DiffuseFeature& feature) {
  const Eigen::Index m = model.anchors.rows();
  Eigen::VectorXd k(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    k(i) = std::exp(-model.gamma * (model.anchors.row(i).transpose() - feature.value).squaredNorm());
  }
  const double k_mean = k.mean();
  k.array() -= k_mean;
  k -= model.row_means;
  k.array() += model.grand_mean;
  return model.sign * k.dot(model.alpha);
}

Eigen::VectorXd anchor_scores(const SredsModel& model) {
  // Kc v = lambda v, so Kc alpha = lambda alpha.
  return model.sign * model.eigenvalue * model.alpha;
}

double face_sreds(const SredsModel& model, std::span<const DiffuseFeature> region_features) {
  if (region_features.empty()) throw Error(Errc::insufficient_data, "no usable regions for SREDS");
  std::vector<double> scores;
  scores.reserve(region_features.size());
  for (const auto& f : region_features) scores.push_back(project_sreds(model, f));
  return sorted_mean(std::move(scores));
}

double face_sreds(const SredsModel& model, std::span<const PixelPatch> patches,
                  const DiffuseOptions& options) {
  std::vector<DiffuseFeature> features;
  features.reserve(patches.size());
  for (const auto& p : patches) features.push_back(extract_diffuse(p, options));
  return face_sreds(model, features);
}

std::string sreds_to_json(const SredsModel& m) {
  std::vector<double> anchors(static_cast<std::size_t>(m.anchors.rows()) * 3);
  for (Eigen::Index i = 0; i < m.anchors.rows(); ++i) {
    for (int c = 0; c < 3; ++c) anchors[static_cast<std::size_t>(i) * 3 + c] = m.anchors(i, c);
  }
  const std::vector<double> row_means(m.row_means.data(), m.row_means.data() + m.row_means.size());
  const std::vector<double> alpha(m.alpha.data(), m.alpha.data() + m.alpha.size());
  detail::JsonWriter w;
  w.begin_object()
      .key("format").value(std::string_view("skintone.sreds"))
      .key("version").value(m.version)
      .key("trained_on").value(std::string_view(m.trained_on))
      .key("seed").value(m.seed)
      .key("kernel").value(std::string_view("rbf"))
      .key("gamma").value(m.gamma)
      .key("eigenvalue").value(m.eigenvalue)
      .key("sign").value(m.sign)
      .key("grand_mean").value(m.grand_mean)
      .key("anchor_count").value(static_cast<std::uint64_t>(m.anchors.rows()))
      .key("row_means").value(std::span<const double>(row_means))
      .key("alpha").value(std::span<const double>(alpha))
      .key("anchors").matrix(anchors, static_cast<std::size_t>(m.anchors.rows()), 3)
      .end_object();
  return w.str();
}

SredsModel sreds_from_json(const std::string& text) {
  const auto doc = detail::parse_model_text(text);
  detail::check_header(doc, "skintone.sreds", SredsModel::kVersion);
  SredsModel m;
  m.version = SredsModel::kVersion;
  m.trained_on = detail::field<std::string>(doc, "trained_on");
  m.seed = detail::field<std::uint64_t>(doc, "seed");
  m.gamma = detail::field<double>(doc, "gamma");
  m.eigenvalue = detail::field<double>(doc, "eigenvalue");
  m.sign = detail::field<int>(doc, "sign");
  m.grand_mean = detail::field<double>(doc, "grand_mean");
  const auto count = detail::field<std::size_t>(doc, "anchor_count");
  const auto row_means = detail::field<std::vector<double>>(doc, "row_means");
  const auto alpha = detail::field<std::vector<double>>(doc, "alpha");
  const auto anchors = detail::field<std::vector<std::vector<double>>>(doc, "anchors");

  auto inconsistent = [](const std::string& what) { throw Error(Errc::malformed_model, what); };
  if (detail::field<std::string>(doc, "kernel") != "rbf") inconsistent("unsupported kernel");
  if (count < 2) inconsistent("anchor_count must be >= 2");
  if (anchors.size() != count) {
    inconsistent("anchors has " + std::to_string(anchors.size()) + " rows, anchor_count says " +
                 std::to_string(count));
  }
  if (row_means.size() != count || alpha.size() != count) {
    inconsistent("row_means/alpha length does not match anchor_count");
  }
  if (!(m.gamma > 0.0)) inconsistent("gamma must be positive");
  if (!(m.eigenvalue > 0.0)) inconsistent("eigenvalue must be positive");
  if (m.sign != 1 && m.sign != -1) inconsistent("sign must be +1 or -1");

  const auto n = static_cast<Eigen::Index>(count);
  m.anchors.resize(n, 3);
  m.row_means.resize(n);
  m.alpha.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& row = anchors[static_cast<std::size_t>(i)];
    if (row.size() != 3) inconsistent("anchor row " + std::to_string(i) + " does not have 3 entries");
    for (int c = 0; c < 3; ++c) m.anchors(i, c) = row[static_cast<std::size_t>(c)];
    m.row_means(i) = row_means[static_cast<std::size_t>(i)];
    m.alpha(i) = alpha[static_cast<std::size_t>(i)];
  }
  return m;
}

void save_sreds(const SredsModel& model, const std::filesystem::path& path) {
  detail::write_text(path, sreds_to_json(model));
}

SredsModel load_sreds(const std::filesystem::path& path) {
  return sreds_from_json(detail::read_text(path));
}

} // namespace skintone
