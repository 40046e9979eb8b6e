#include "skintone/pipeline.hpp"

#include "skintone/error.hpp"
#include "skintone/image.hpp"
#include "skintone/parallel.hpp"

#include <optional>

namespace skintone {

namespace {

std::string sample_label(const SampleRecord& s) { return s.subject_id + "/" + s.sample_id; }

// Runs fn per sample; any exception becomes a failure slot instead of a value.
template <class T, class Fn>
std::vector<std::optional<T>> map_samples(const DatasetManifest& manifest, std::size_t threads,
                                          std::vector<SampleFailure>& failures, Fn&& fn) {
  const std::size_t n = manifest.samples.size();
  std::vector<std::optional<T>> values(n);
  std::vector<std::string> errors(n);
  parallel_for(n, resolve_threads(threads), [&](std::size_t i) {
    try {
      values[i] = fn(manifest.samples[i]);
    } catch (const std::exception& e) {
      errors[i] = e.what();
      if (errors[i].empty()) errors[i] = "unknown error";
    }
  });
  for (std::size_t i = 0; i < n; ++i)
    if (!values[i])
      failures.push_back({i, "sample " + sample_label(manifest.samples[i]) + ": " + errors[i]});
  return values;
}

void require_samples(const DatasetManifest& manifest) {
  if (manifest.samples.empty())
    throw Error(Errc::empty_manifest, "manifest '" + manifest.dataset_name + "' has no samples");
}

template <class Fn>
ScoreRun score_with(const DatasetManifest& manifest, Metric metric, std::size_t threads, Fn&& fn) {
  require_samples(manifest);
  ScoreRun run;
  const auto values = map_samples<double>(manifest, threads, run.failures, fn);
  run.table.rows.reserve(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    const auto& s = manifest.samples[i];
    run.table.rows.push_back({manifest.dataset_name, s.subject_id, s.sample_id, metric, values[i]});
  }
  validate_unique(run.table);
  return run;
}

} // namespace

std::vector<PixelPatch> load_patches(const DatasetManifest& manifest, const SampleRecord& sample,
                                     const PatchOptions& options, RgbImage* image) {
  RgbImage img = read_image(manifest.resolve(sample));
  auto patches = extract_patches(img, sample, options);
  if (image) *image = std::move(img);
  return patches;
}

ScoreRun score_ita(const DatasetManifest& manifest, const PipelineOptions& options) {
  return score_with(manifest, Metric::ita, options.threads, [&](const SampleRecord& s) {
    const auto patches = load_patches(manifest, s, options.patch);
    return face_ita(patches, options.ita);
  });
}

ScoreRun score_rsr(const DatasetManifest& manifest, const RsrModel& model,
                   const PipelineOptions& options) {
  ScoreRun run = score_with(manifest, Metric::rsr, options.threads, [&](const SampleRecord& s) {
    RgbImage img;
    const auto patches = load_patches(manifest, s, options.patch, &img);
    const Vec3 gains = model.normalization_applied ? gray_world_gains(img) : Vec3::Ones();
    return score_rsr(model, face_mean_rgb(patches, gains));
  });
  run.table.trained_on = model.trained_on;
  return run;
}

ScoreRun score_sreds(const DatasetManifest& manifest, const SredsModel& model,
                     const PipelineOptions& options) {
  ScoreRun run = score_with(manifest, Metric::sreds, options.threads, [&](const SampleRecord& s) {
    const auto patches = load_patches(manifest, s, options.patch);
    return face_sreds(model, patches, options.diffuse);
  });
  run.table.trained_on = model.trained_on;
  run.table.seed = model.seed;
  return run;
}

FitRun<RsrModel> fit_rsr_manifest(const DatasetManifest& manifest, const PipelineOptions& options) {
  require_samples(manifest);
  std::vector<SampleFailure> failures;
  const auto faces = map_samples<Vec3>(manifest, options.threads, failures, [&](const SampleRecord& s) {
    RgbImage img;
    const auto patches = load_patches(manifest, s, options.patch, &img);
    return face_mean_rgb(patches, options.gray_world ? gray_world_gains(img) : Vec3::Ones());
  });
  std::vector<Vec3> usable;
  for (const auto& f : faces)
    if (f) usable.push_back(*f);
  return {fit_rsr(usable, manifest.dataset_name, options.gray_world), std::move(failures)};
}

FitRun<SredsModel> fit_sreds_manifest(const DatasetManifest& manifest,
                                      const SredsFitOptions& fit_options,
                                      const PipelineOptions& options) {
  require_samples(manifest);
  std::vector<SampleFailure> failures;
  const auto per_sample = map_samples<std::vector<DiffuseFeature>>(
      manifest, options.threads, failures, [&](const SampleRecord& s) {
        std::vector<DiffuseFeature> feats;
        for (const auto& p : load_patches(manifest, s, options.patch))
          feats.push_back(extract_diffuse(p, options.diffuse));
        return feats;
      });
  std::vector<DiffuseFeature> features;
  for (const auto& f : per_sample)
    if (f) features.insert(features.end(), f->begin(), f->end());
  return {fit_sreds(features, fit_options, manifest.dataset_name), std::move(failures)};
}

} // namespace skintone
