#include "skintone/synth.hpp"

#include "skintone/error.hpp"
#include "skintone/image.hpp"
#include "skintone/parallel.hpp"
#include "skintone/random.hpp"

#include "json_writer.hpp"
#include "model_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>

namespace skintone {

namespace {

using nlohmann::json;

// Stream tags keep the seeded sub-streams of a dataset apart.
constexpr std::uint64_t kMelaninStream = 0;
constexpr std::uint64_t kSampleStream = 1;
constexpr std::uint64_t kRegionStream = 2;

bool in_unit_interval(const Vec3& v) {
  return (v.array() > 0.0).all() && (v.array() <= 1.0).all();
}

std::string subject_id_for(std::size_t index, double melanin) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "subj%04zu_m%.6f", index, melanin);
  return buf;
}

Vec3 read_vec3(const json& j, const std::string& name) {
  if (!j.is_array() || j.size() != 3)
    throw Error(Errc::parse, "synth spec field '" + name + "' must be an array of 3 numbers");
  Vec3 v;
  for (int i = 0; i < 3; ++i) {
    if (!j[i].is_number())
      throw Error(Errc::parse, "synth spec field '" + name + "' must be an array of 3 numbers");
    v[i] = j[i].get<double>();
  }
  return v;
}

std::pair<double, double> read_range(const json& j, const std::string& name) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw Error(Errc::parse, "synth spec field '" + name + "' must be [lo, hi]");
  return {j[0].get<double>(), j[1].get<double>()};
}

template <class T>
T read_scalar(const json& j, const std::string& name) {
  try {
    if constexpr (std::is_same_v<T, bool>) {
      if (!j.is_boolean()) throw Error(Errc::parse, "");
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!j.is_string()) throw Error(Errc::parse, "");
    } else if constexpr (std::is_integral_v<T>) {
      if (!j.is_number_unsigned()) throw Error(Errc::parse, "");
    } else {
      if (!j.is_number()) throw Error(Errc::parse, "");
    }
    return j.get<T>();
  } catch (const std::exception&) {
    throw Error(Errc::parse, "synth spec field '" + name + "' has the wrong type");
  }
}

} // namespace

std::vector<std::string> validation_errors(const SynthSpec& s) {
  std::vector<std::string> errs;
  if (s.dataset_name.empty() || s.dataset_name.find_first_of("/\\") != std::string::npos)
    errs.emplace_back("dataset_name: must be a non-empty file name");
  if (s.n_subjects == 0) errs.emplace_back("n_subjects: must be at least 1");
  if (s.samples_per_subject == 0) errs.emplace_back("samples_per_subject: must be at least 1");
  if (!(s.melanin_lo > 0.0) || !std::isfinite(s.melanin_hi))
    errs.emplace_back("melanin_range: lower bound must be positive");
  if (!(s.melanin_lo <= s.melanin_hi)) errs.emplace_back("melanin_range: bounds out of order");
  if (!in_unit_interval(s.base_albedo)) errs.emplace_back("base_albedo: entries must lie in (0, 1]");
  if (s.illuminants.empty()) errs.emplace_back("illuminants: at least one is required");
  for (std::size_t i = 0; i < s.illuminants.size(); ++i)
    if (!in_unit_interval(s.illuminants[i]))
      errs.push_back("illuminants[" + std::to_string(i) + "]: entries must lie in (0, 1]");
  if (!(s.specular_lo >= 0.0) || !std::isfinite(s.specular_hi))
    errs.emplace_back("specular_range: lower bound must be non-negative");
  if (!(s.specular_lo <= s.specular_hi)) errs.emplace_back("specular_range: bounds out of order");
  if (!(s.shading_variation >= 0.0) || !std::isfinite(s.shading_variation))
    errs.emplace_back("shading_variation: must be non-negative");
  if (!(s.noise_sigma >= 0.0) || !std::isfinite(s.noise_sigma))
    errs.emplace_back("noise_sigma: must be non-negative");
  if (s.patch_size < s.min_patch_pixels)
    errs.push_back("patch_size: must be at least min_patch_pixels (" +
                   std::to_string(s.min_patch_pixels) + ")");
  return errs;
}

void validate(const SynthSpec& spec) {
  const auto errs = validation_errors(spec);
  if (errs.empty()) return;
  std::string msg = "invalid synth spec:";
  for (const auto& e : errs) msg += "\n  " + e;
  throw Error(Errc::invalid_argument, msg);
}

SynthSpec parse_synth_spec(const std::string& json_text) {
  const json doc = detail::parse_model_text(json_text);
  if (!doc.is_object()) throw Error(Errc::parse, "synth spec must be a JSON object");
  SynthSpec s;
  static const std::set<std::string> known = {
      "dataset_name", "n_subjects",  "samples_per_subject", "melanin_range",
      "melanin_grid", "base_albedo", "illuminants",         "specular_range",
      "shading_variation", "noise_sigma", "patch_size",     "min_patch_pixels",
      "seed"};
  for (const auto& [key, val] : doc.items()) {
    if (!known.count(key)) throw Error(Errc::parse, "synth spec has unknown field '" + key + "'");
    if (key == "dataset_name") s.dataset_name = read_scalar<std::string>(val, key);
    else if (key == "n_subjects") s.n_subjects = read_scalar<std::size_t>(val, key);
    else if (key == "samples_per_subject") s.samples_per_subject = read_scalar<std::size_t>(val, key);
    else if (key == "melanin_range") std::tie(s.melanin_lo, s.melanin_hi) = read_range(val, key);
    else if (key == "melanin_grid") s.melanin_grid = read_scalar<bool>(val, key);
    else if (key == "base_albedo") s.base_albedo = read_vec3(val, key);
    else if (key == "illuminants") {
      if (!val.is_array()) throw Error(Errc::parse, "synth spec field 'illuminants' must be an array");
      s.illuminants.clear();
      for (std::size_t i = 0; i < val.size(); ++i)
        s.illuminants.push_back(read_vec3(val[i], "illuminants[" + std::to_string(i) + "]"));
    } else if (key == "specular_range") std::tie(s.specular_lo, s.specular_hi) = read_range(val, key);
    else if (key == "shading_variation") s.shading_variation = read_scalar<double>(val, key);
    else if (key == "noise_sigma") s.noise_sigma = read_scalar<double>(val, key);
    else if (key == "patch_size") s.patch_size = read_scalar<std::size_t>(val, key);
    else if (key == "min_patch_pixels") s.min_patch_pixels = read_scalar<std::size_t>(val, key);
    else if (key == "seed") s.seed = read_scalar<std::uint64_t>(val, key);
  }
  return s;
}

SynthSpec load_synth_spec(const std::filesystem::path& path) {
  return parse_synth_spec(detail::read_text(path));
}

std::string synth_spec_to_json(const SynthSpec& s) {
  detail::JsonWriter w;
  auto vec = [](const Vec3& v) { return std::vector<double>{v[0], v[1], v[2]}; };
  w.begin_object();
  w.key("dataset_name").value(std::string_view(s.dataset_name));
  w.key("n_subjects").value(static_cast<std::uint64_t>(s.n_subjects));
  w.key("samples_per_subject").value(static_cast<std::uint64_t>(s.samples_per_subject));
  const double mel[2] = {s.melanin_lo, s.melanin_hi};
  w.key("melanin_range").value(std::span<const double>(mel));
  w.key("melanin_grid").value(s.melanin_grid);
  const auto albedo = vec(s.base_albedo);
  w.key("base_albedo").value(std::span<const double>(albedo));
  std::vector<double> ills;
  for (const auto& v : s.illuminants) ills.insert(ills.end(), {v[0], v[1], v[2]});
  w.key("illuminants").matrix(ills, s.illuminants.size(), 3);
  const double spec[2] = {s.specular_lo, s.specular_hi};
  w.key("specular_range").value(std::span<const double>(spec));
  w.key("shading_variation").value(s.shading_variation);
  w.key("noise_sigma").value(s.noise_sigma);
  w.key("patch_size").value(static_cast<std::uint64_t>(s.patch_size));
  w.key("min_patch_pixels").value(static_cast<std::uint64_t>(s.min_patch_pixels));
  w.key("seed").value(s.seed);
  w.end_object();
  return w.str();
}

ColorMatrix render_linear(const RenderParams& p) {
  Rng rng(p.seed);
  const Vec3 body = p.albedo.cwiseProduct(p.illuminant);
  ColorMatrix out(3, static_cast<Eigen::Index>(p.n_pixels));
  for (Eigen::Index j = 0; j < out.cols(); ++j) {
    const double g = p.shading_sigma > 0.0 ? std::exp(rng.normal(0.0, p.shading_sigma)) : 1.0;
    const double s = p.specular_strength > 0.0 ? std::abs(rng.normal(0.0, p.specular_strength)) : 0.0;
    Vec3 v = g * body + s * p.illuminant;
    if (p.noise_sigma > 0.0)
      for (int c = 0; c < 3; ++c) v[c] += rng.normal(0.0, p.noise_sigma);
    out.col(j) = v.cwiseMax(0.0).cwiseMin(1.0);
  }
  return out;
}

std::size_t patch_width(std::size_t n_pixels) noexcept {
  if (n_pixels == 0) return 0;
  auto w = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(n_pixels))));
  while (w > 1 && (w - 1) * (w - 1) >= n_pixels) --w;
  return w;
}

PixelPatch render_patch(const RenderParams& params) {
  const ColorMatrix lin = render_linear(params);
  const std::size_t w = patch_width(params.n_pixels);
  PixelPatch patch;
  patch.pixels.reserve(params.n_pixels);
  patch.coords.reserve(params.n_pixels);
  auto q = [](double v) {
    return static_cast<std::uint8_t>(std::lround(std::clamp(srgb_encode(v), 0.0, 1.0) * 255.0));
  };
  for (std::size_t j = 0; j < params.n_pixels; ++j) {
    const auto c = lin.col(static_cast<Eigen::Index>(j));
    patch.pixels.push_back({q(c[0]), q(c[1]), q(c[2])});
    patch.coords.push_back({static_cast<int>(j % w), static_cast<int>(j / w)});
  }
  return patch;
}

double subject_melanin(const SynthSpec& spec, std::size_t index) {
  if (spec.melanin_grid) {
    if (spec.n_subjects <= 1) return 0.5 * (spec.melanin_lo + spec.melanin_hi);
    const double t = static_cast<double>(index) / static_cast<double>(spec.n_subjects - 1);
    return spec.melanin_lo + t * (spec.melanin_hi - spec.melanin_lo);
  }
  Rng rng(derive_seed(spec.seed, {kMelaninStream, index}));
  return rng.uniform(spec.melanin_lo, spec.melanin_hi);
}

std::optional<double> melanin_from_subject_id(const std::string& subject_id) {
  const auto pos = subject_id.rfind("_m");
  if (pos == std::string::npos) return std::nullopt;
  const std::string tail = subject_id.substr(pos + 2);
  try {
    std::size_t used = 0;
    const double v = std::stod(tail, &used);
    if (used != tail.size()) return std::nullopt;
    return v;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

DatasetManifest generate_dataset(const SynthSpec& spec, const std::filesystem::path& out_dir,
                                 std::size_t threads) {
  validate(spec);
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir / "images", ec);
  if (ec) throw Error(Errc::io, "cannot create '" + (out_dir / "images").string() + "': " + ec.message());

  // Each region is a full w x h rectangle; regions sit side by side.
  const int w = static_cast<int>(patch_width(spec.patch_size));
  const int h = static_cast<int>((spec.patch_size + w - 1) / w);
  const std::size_t region_pixels = static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
  const double mid = 0.5 * (spec.melanin_lo + spec.melanin_hi);

  DatasetManifest manifest;
  manifest.dataset_name = spec.dataset_name;
  manifest.base_dir = out_dir;
  manifest.samples.resize(spec.n_subjects * spec.samples_per_subject);

  parallel_for(spec.n_subjects, resolve_threads(threads), [&](std::size_t subj) {
    const double melanin = subject_melanin(spec, subj);
    const std::string subject_id = subject_id_for(subj, melanin);
    const Vec3 albedo = spec.base_albedo * melanin;
    for (std::size_t k = 0; k < spec.samples_per_subject; ++k) {
      Rng rng(derive_seed(spec.seed, {kSampleStream, subj, k}));
      const Vec3 ill = spec.illuminants[rng.below(spec.illuminants.size())];
      const double strength = rng.uniform(spec.specular_lo, spec.specular_hi);

      RgbImage img(3 * w, h);
      SampleRecord rec;
      for (int r = 0; r < 3; ++r) {
        const RenderParams params{albedo, ill, strength, spec.shading_variation, spec.noise_sigma,
                                  region_pixels,
                                  derive_seed(spec.seed, {kRegionStream, subj, k,
                                                          static_cast<std::uint64_t>(r)})};
        const PixelPatch patch = render_patch(params);
        for (std::size_t j = 0; j < patch.size(); ++j)
          img.at(r * w + patch.coords[j].x, patch.coords[j].y) = patch.pixels[j];
        rec.regions.push_back(RegionPolygon{
            kAllRegions[r], {{r * w, 0}, {(r + 1) * w, 0}, {(r + 1) * w, h}, {r * w, h}}});
      }

      char sample_id[32];
      std::snprintf(sample_id, sizeof sample_id, "s%02zu", k);
      rec.subject_id = subject_id;
      rec.sample_id = sample_id;
      rec.group_label = melanin < mid ? "low_melanin" : "high_melanin";
      rec.image_path = "images/" + subject_id + "_" + rec.sample_id + ".png";
      write_png(out_dir / rec.image_path, img);
      manifest.samples[subj * spec.samples_per_subject + k] = std::move(rec);
    }
  });

  const fs::path manifest_path = out_dir / (spec.dataset_name + ".jsonl");
  std::ofstream out(manifest_path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::io, "cannot write '" + manifest_path.string() + "'");
  write_manifest(out, manifest);
  if (!out) throw Error(Errc::io, "write failed for '" + manifest_path.string() + "'");
  return manifest;
}

} // namespace skintone
