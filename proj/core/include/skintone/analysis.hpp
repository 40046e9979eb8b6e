#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace skintone {

enum class Metric { ita, rsr, sreds };

std::string_view to_string(Metric metric) noexcept;   // "ITA", "RSR", "SREDS"
std::optional<Metric> parse_metric(std::string_view name) noexcept;  // case-insensitive
inline bool is_trainable(Metric m) noexcept { return m != Metric::ita; }

struct ScoreRow {
  std::string dataset;
  std::string subject_id;
  std::string sample_id;
  Metric metric = Metric::sreds;
  std::optional<double> score;  // empty = per-sample failure, written as NA
};

struct ScoreTable {
  std::vector<ScoreRow> rows;
  std::string trained_on;  // provenance, not serialized in the CSV
  std::uint64_t seed = 0;

  std::vector<ScoreRow> slice(std::string_view dataset, Metric metric) const;
};

/// Throws Errc::duplicate_key on a repeated (dataset, subject, sample, metric).
void validate_unique(const ScoreTable& table);

/// Header `dataset,subject_id,sample_id,metric,score`; scores with 9
/// significant digits, failures as NA.
void write_scores_csv(std::ostream& out, const ScoreTable& table);
ScoreTable read_scores_csv(std::istream& in);
ScoreTable load_scores_csv(const std::filesystem::path& path);

struct VariabilityEntry {
  std::string train_dataset;
  std::string test_dataset;
  Metric metric = Metric::sreds;
  std::optional<double> value;  // empty = not applicable (ITA off the diagonal)
  std::size_t subjects = 0;
  std::size_t excluded_singletons = 0;
  bool normalized = false;
};

/// Mean over subjects of the per-subject sample standard deviation (n - 1).
/// With `normalize`, scores are first z-scored over the whole slice. Rows
/// without a score are ignored; subjects with one sample are counted and
/// excluded.
VariabilityEntry intra_subject_variability(std::span<const ScoreRow> rows, bool normalize);

struct VariabilityReport {
  std::vector<std::string> train_datasets;
  std::vector<std::string> test_datasets;
  std::vector<Metric> metrics;
  std::vector<VariabilityEntry> cells;  // train-major, then test, then metric

  const VariabilityEntry& at(std::size_t train, std::size_t test, std::size_t metric) const;
};

/// Scores of the test dataset under the model calibrated on the train dataset.
/// Should throw Error(Errc::missing_cell) when the cell cannot be produced.
using CellResolver =
    std::function<std::vector<ScoreRow>(const std::string& train, const std::string& test, Metric)>;

/// ITA has no training component: its cells are resolved only where
/// train == test and are NA elsewhere.
VariabilityReport cross_dataset_matrix(const std::vector<std::string>& train_datasets,
                                       const std::vector<std::string>& test_datasets,
                                       const std::vector<Metric>& metrics,
                                       const CellResolver& resolve, bool normalize,
                                       std::size_t threads = 1);

/// One row per train dataset, one column per (test dataset, metric).
void write_report_csv(std::ostream& out, const VariabilityReport& report);
/// One row per cell with subject counts.
void write_report_long_csv(std::ostream& out, const VariabilityReport& report);

struct BinStrategy {
  enum class Kind { median, quantile };
  Kind kind = Kind::median;
  int k = 2;

  static BinStrategy median() { return {}; }
  static BinStrategy quantile(int k) { return {Kind::quantile, k}; }
};

struct Binning {
  std::vector<double> thresholds;
  std::vector<std::string> labels;  // "low"/"high" for median, "q1".."qk" for quantile
};

/// Bins are left-closed: a score equal to a threshold goes to the upper bin.
Binning bin_scores(std::span<const double> scores, const BinStrategy& strategy);

double median(std::span<const double> values);

struct GroupHistogram {
  std::string group;
  std::vector<std::size_t> counts;
};

struct GroupDistribution {
  std::vector<double> edges;  // bins + 1, shared by all groups
  std::vector<GroupHistogram> groups;  // sorted by group name
};

/// Per-group histograms over the observed range of the labeled scores.
GroupDistribution group_distribution(std::span<const double> scores,
                                     std::span<const std::optional<std::string>> labels,
                                     std::size_t bins = 50);
void write_distribution_csv(std::ostream& out, const GroupDistribution& dist);

/// Spearman rank correlation with average ranks for ties.
double spearman(std::span<const double> x, std::span<const double> y);

/// Minimal RFC 4180 field handling shared by the CSV readers.
std::vector<std::string> split_csv_line(std::string_view line);
std::string csv_escape(std::string_view field);
std::string format_score(double v);  // "%.9g"

} // namespace skintone
