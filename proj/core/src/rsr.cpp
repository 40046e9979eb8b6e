#include "skintone/rsr.hpp"

#include "json_writer.hpp"
#include "model_io.hpp"

#include <Eigen/Eigenvalues>

#include <array>
#include <vector>

namespace skintone {

Vec3 gray_world_gains(const RgbImage& image) {
  Vec3 sum = Vec3::Zero();
  for (const RgbPixel& p : image.pixels) sum += to_linear(p);
  if ((sum.array() <= 0.0).any()) return Vec3::Ones();
  const double gray = sum.mean();
  return (gray / sum.array()).matrix();
}

Vec3 face_mean_rgb(std::span<const PixelPatch> patches, const Vec3& gains) {
  if (patches.empty()) throw Error(Errc::insufficient_data, "face_mean_rgb needs at least one patch");
  Vec3 sum = Vec3::Zero();
  std::size_t count = 0;
  for (const auto& patch : patches) {
    for (const RgbPixel& p : patch.pixels) sum += to_linear(p);
    count += patch.size();
  }
  if (count == 0) throw Error(Errc::insufficient_data, "face_mean_rgb: patches hold no pixels");
  return (sum / static_cast<double>(count)).cwiseProduct(gains);
}

RsrModel fit_rsr(std::span<const Vec3> faces, std::string dataset_name, bool normalization_applied) {
  if (faces.size() < 2) {
    throw Error(Errc::insufficient_data, "RSR fit needs at least 2 faces, got " + std::to_string(faces.size()));
  }
  Vec3 mean = Vec3::Zero();
  for (const Vec3& f : faces) mean += f;
  mean /= static_cast<double>(faces.size());

  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  for (const Vec3& f : faces) {
    const Vec3 d = f - mean;
    cov += d * d.transpose();
  }
  cov /= static_cast<double>(faces.size() - 1);

  bool identical = true;
  for (const Vec3& f : faces) identical = identical && f == faces.front();
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(cov);
  const double top = eig.eigenvalues()(2);
  if (identical || !(top > 0.0)) {
    throw Error(Errc::zero_variance, "all face colors are identical; RSR direction is undefined");
  }

  RsrModel model;
  model.mean_rgb = mean;
  model.direction = eig.eigenvectors().col(2).normalized();
  model.trained_on = std::move(dataset_name);
  model.normalization_applied = normalization_applied;

  // Orientation: covariance between projections and the luminance proxy r+g+b.
  double cov_tl = 0.0;
  double mean_l = 0.0;
  for (const Vec3& f : faces) mean_l += f.sum();
  mean_l /= static_cast<double>(faces.size());
  for (const Vec3& f : faces) cov_tl += (f - mean).dot(model.direction) * (f.sum() - mean_l);
  if (cov_tl == 0.0) {
    // Direction orthogonal to (1,1,1): fall back to a positive leading component.
    for (int i = 0; i < 3; ++i) {
      if (model.direction[i] != 0.0) {
        cov_tl = model.direction[i];
        break;
      }
    }
  }
  model.sign = cov_tl < 0.0 ? -1 : 1;
  return model;
}

double score_rsr(const RsrModel& model, const Vec3& face) {
  return model.sign * (face - model.mean_rgb).dot(model.direction);
}

std::string rsr_to_json(const RsrModel& m) {
  const std::array<double, 3> mean{m.mean_rgb[0], m.mean_rgb[1], m.mean_rgb[2]};
  const std::array<double, 3> dir{m.direction[0], m.direction[1], m.direction[2]};
  detail::JsonWriter w;
  w.begin_object()
      .key("format").value(std::string_view("skintone.rsr"))
      .key("version").value(m.version)
      .key("trained_on").value(std::string_view(m.trained_on))
      .key("normalization_applied").value(m.normalization_applied)
      .key("mean_rgb").value(std::span<const double>(mean))
      .key("direction").value(std::span<const double>(dir))
      .key("sign").value(m.sign)
      .end_object();
  return w.str();
}

namespace {

Vec3 read_vec3(const nlohmann::json& doc, const char* name) {
  const auto v = detail::field<std::vector<double>>(doc, name);
  if (v.size() != 3) throw Error(Errc::malformed_model, std::string("field '") + name + "' must have 3 entries");
  return {v[0], v[1], v[2]};
}

} // namespace

RsrModel rsr_from_json(const std::string& text) {
  const auto doc = detail::parse_model_text(text);
  detail::check_header(doc, "skintone.rsr", RsrModel::kVersion);
  RsrModel m;
  m.version = RsrModel::kVersion;
  m.trained_on = detail::field<std::string>(doc, "trained_on");
  m.normalization_applied = detail::field<bool>(doc, "normalization_applied");
  m.mean_rgb = read_vec3(doc, "mean_rgb");
  m.direction = read_vec3(doc, "direction");
  m.sign = detail::field<int>(doc, "sign");
  if (m.sign != 1 && m.sign != -1) throw Error(Errc::malformed_model, "sign must be +1 or -1");
  if (std::abs(m.direction.norm() - 1.0) > 1e-9) {
    throw Error(Errc::malformed_model, "direction is not a unit vector");
  }
  return m;
}

void save_rsr(const RsrModel& model, const std::filesystem::path& path) {
  detail::write_text(path, rsr_to_json(model));
}

RsrModel load_rsr(const std::filesystem::path& path) { return rsr_from_json(detail::read_text(path)); }

} // namespace skintone
