#pragma once

#include "skintone/analysis.hpp"
#include "skintone/ingestion.hpp"
#include "skintone/ita.hpp"
#include "skintone/rsr.hpp"
#include "skintone/sreds.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace skintone {

/// Batch runs over a manifest. Samples are processed on a worker pool and
/// results are assembled in manifest order.
struct PipelineOptions {
  PatchOptions patch;
  ItaOptions ita;
  DiffuseOptions diffuse;
  bool gray_world = false;  // RSR fitting only; scoring follows the model
  std::size_t threads = 1;
};

/// One message per sample that could not be processed, in manifest order.
struct SampleFailure {
  std::size_t index = 0;
  std::string message;
};

struct ScoreRun {
  ScoreTable table;
  std::vector<SampleFailure> failures;
};

/// Reads the sample's image and extracts its regions.
std::vector<PixelPatch> load_patches(const DatasetManifest& manifest, const SampleRecord& sample,
                                     const PatchOptions& options, RgbImage* image = nullptr);

/// Failed samples become rows without a score.
ScoreRun score_ita(const DatasetManifest& manifest, const PipelineOptions& options);
ScoreRun score_rsr(const DatasetManifest& manifest, const RsrModel& model,
                   const PipelineOptions& options);
ScoreRun score_sreds(const DatasetManifest& manifest, const SredsModel& model,
                     const PipelineOptions& options);

template <class Model>
struct FitRun {
  Model model;
  std::vector<SampleFailure> failures;  // samples left out of the fit
};

FitRun<RsrModel> fit_rsr_manifest(const DatasetManifest& manifest, const PipelineOptions& options);

/// One diffuse feature per region of every usable sample, in manifest order.
FitRun<SredsModel> fit_sreds_manifest(const DatasetManifest& manifest,
                                      const SredsFitOptions& fit_options,
                                      const PipelineOptions& options);

} // namespace skintone
