#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace skintone::cli {

/// Everything a command needs, resolved and validated before any work starts.
struct RunConfig {
  std::string command;     // fit | score | analyze | synth
  std::string subcommand;  // metric for fit/score, analysis kind for analyze
  std::vector<std::string> manifests;
  std::vector<std::string> models;  // score: a path; cross: TRAIN:METRIC=path
  std::vector<std::string> scores;
  std::vector<std::string> train_datasets;
  std::vector<std::string> metrics;
  std::string out;
  std::string long_out;
  std::string spec;
  std::string dataset;
  std::string metric;
  std::uint64_t seed = 0;
  bool seed_given = false;
  std::size_t threads = 0;  // 0 = hardware concurrency
  int ita_kernel = 5;
  std::size_t max_anchors = 2000;
  std::optional<double> gamma;
  int nnmf_iters = 500;
  double nnmf_tol = 1e-6;
  std::size_t min_patch_pixels = 64;
  bool gray_world = false;
  std::optional<bool> normalize;  // default depends on the analysis
  std::size_t bins = 50;
  std::string strategy = "median";
  int k = 4;
  std::optional<std::size_t> max_failures;  // unset = no limit
};

/// Exit codes: 0 success, 1 runtime failure, 2 usage error.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

/// Runs one command line (without the program name). Reports go to files;
/// summaries go to `out`, the resolved config and diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace skintone::cli
