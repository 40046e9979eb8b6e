#include "skintone/analysis.hpp"

#include "skintone/error.hpp"
#include "skintone/parallel.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <set>
#include <tuple>

namespace skintone {

namespace {

constexpr std::string_view kScoresHeader = "dataset,subject_id,sample_id,metric,score";

bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() &&
         std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
           return std::tolower(static_cast<unsigned char>(x)) ==
                  std::tolower(static_cast<unsigned char>(y));
         });
}

// Sums sorted values so the result does not depend on input order.
double sorted_mean(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double sample_sd(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const double m = sorted_mean(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

std::string strip_cr(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

std::vector<double> ranks(std::span<const double> v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](auto a, auto b) { return v[a] < v[b]; });
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
    const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t t = i; t <= j; ++t) r[idx[t]] = avg;
    i = j + 1;
  }
  return r;
}

} // namespace

std::string_view to_string(Metric metric) noexcept {
  switch (metric) {
    case Metric::ita: return "ITA";
    case Metric::rsr: return "RSR";
    case Metric::sreds: return "SREDS";
  }
  return "?";
}

std::optional<Metric> parse_metric(std::string_view name) noexcept {
  for (Metric m : {Metric::ita, Metric::rsr, Metric::sreds})
    if (iequals(name, to_string(m))) return m;
  return std::nullopt;
}

std::vector<ScoreRow> ScoreTable::slice(std::string_view dataset, Metric metric) const {
  std::vector<ScoreRow> out;
  for (const auto& r : rows)
    if (r.dataset == dataset && r.metric == metric) out.push_back(r);
  return out;
}

void validate_unique(const ScoreTable& table) {
  std::set<std::tuple<std::string_view, std::string_view, std::string_view, Metric>> seen;
  for (const auto& r : table.rows) {
    if (!seen.emplace(r.dataset, r.subject_id, r.sample_id, r.metric).second)
      throw Error(Errc::duplicate_key, "duplicate score row (" + r.dataset + ", " + r.subject_id +
                                           ", " + r.sample_id + ", " +
                                           std::string(to_string(r.metric)) + ")");
  }
}

std::string format_score(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

std::string csv_escape(std::string_view field) {
  if (field.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (quoted) throw Error(Errc::parse, "unterminated quoted field");
  fields.push_back(std::move(cur));
  return fields;
}

void write_scores_csv(std::ostream& out, const ScoreTable& table) {
  out << kScoresHeader << '\n';
  for (const auto& r : table.rows) {
    out << csv_escape(r.dataset) << ',' << csv_escape(r.subject_id) << ','
        << csv_escape(r.sample_id) << ',' << to_string(r.metric) << ','
        << (r.score ? format_score(*r.score) : std::string("NA")) << '\n';
  }
}

ScoreTable read_scores_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw Error(Errc::parse, "scores CSV is empty");
  if (strip_cr(line) != kScoresHeader)
    throw Error(Errc::parse, "scores CSV header mismatch: expected '" + std::string(kScoresHeader) +
                                 "'");
  ScoreTable table;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    line = strip_cr(line);
    if (line.empty()) continue;
    const std::string where = "scores CSV line " + std::to_string(lineno) + ": ";
    std::vector<std::string> f;
    try {
      f = split_csv_line(line);
    } catch (const Error& e) {
      throw Error(Errc::parse, where + e.what());
    }
    if (f.size() != 5) throw Error(Errc::parse, where + "expected 5 fields");
    const auto metric = parse_metric(f[3]);
    if (!metric) throw Error(Errc::parse, where + "unknown metric '" + f[3] + "'");
    ScoreRow row{f[0], f[1], f[2], *metric, std::nullopt};
    if (f[4] != "NA") {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(f[4], &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != f[4].size() || f[4].empty() || !std::isfinite(v))
        throw Error(Errc::parse, where + "bad score '" + f[4] + "'");
      row.score = v;
    }
    table.rows.push_back(std::move(row));
  }
  validate_unique(table);
  return table;
}

ScoreTable load_scores_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io, "cannot open scores CSV " + path.string());
  try {
    return read_scores_csv(in);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

VariabilityEntry intra_subject_variability(std::span<const ScoreRow> rows, bool normalize) {
  VariabilityEntry entry;
  entry.normalized = normalize;
  if (!rows.empty()) {
    entry.test_dataset = rows.front().dataset;
    entry.metric = rows.front().metric;
  }

  std::vector<double> all;
  for (const auto& r : rows)
    if (r.score) all.push_back(*r.score);

  double mean = 0.0;
  double scale = 1.0;
  if (normalize && all.size() >= 2) {
    mean = sorted_mean(all);
    const double sd = sample_sd(all);
    scale = sd > 0.0 ? 1.0 / sd : 0.0;
  } else if (normalize) {
    scale = 0.0;
  }

  std::map<std::string, std::vector<double>> by_subject;
  for (const auto& r : rows) {
    if (!r.score) continue;
    by_subject[r.subject_id].push_back(normalize ? (*r.score - mean) * scale : *r.score);
  }

  std::vector<double> sds;
  for (auto& [subject, values] : by_subject) {
    if (values.size() < 2) {
      ++entry.excluded_singletons;
      continue;
    }
    sds.push_back(sample_sd(std::move(values)));
  }
  if (sds.empty())
    throw Error(Errc::insufficient_data, "no subject has at least 2 scored samples");
  entry.subjects = sds.size();
  entry.value = sorted_mean(std::move(sds));
  return entry;
}

const VariabilityEntry& VariabilityReport::at(std::size_t train, std::size_t test,
                                              std::size_t metric) const {
  if (train >= train_datasets.size() || test >= test_datasets.size() || metric >= metrics.size())
    throw Error(Errc::out_of_bounds, "report cell index out of range");
  return cells[(train * test_datasets.size() + test) * metrics.size() + metric];
}

VariabilityReport cross_dataset_matrix(const std::vector<std::string>& train_datasets,
                                       const std::vector<std::string>& test_datasets,
                                       const std::vector<Metric>& metrics,
                                       const CellResolver& resolve, bool normalize,
                                       std::size_t threads) {
  VariabilityReport report{train_datasets, test_datasets, metrics, {}};
  const std::size_t nt = test_datasets.size();
  const std::size_t nm = metrics.size();
  report.cells.resize(train_datasets.size() * nt * nm);

  parallel_for(report.cells.size(), resolve_threads(threads), [&](std::size_t i) {
    const std::size_t m = i % nm;
    const std::size_t t = (i / nm) % nt;
    const std::size_t r = i / (nm * nt);
    const auto& train = train_datasets[r];
    const auto& test = test_datasets[t];
    VariabilityEntry e;
    if (metrics[m] == Metric::ita && train != test) {
      e.normalized = normalize;
      e.metric = metrics[m];
    } else {
      const auto rows = resolve(train, test, metrics[m]);
      try {
        e = intra_subject_variability(rows, normalize);
      } catch (const Error& err) {
        throw Error(err.code(), "cell (" + train + " -> " + test + ", " +
                                    std::string(to_string(metrics[m])) + "): " + err.what());
      }
    }
    e.train_dataset = train;
    e.test_dataset = test;
    e.metric = metrics[m];
    report.cells[i] = std::move(e);
  });
  return report;
}

void write_report_csv(std::ostream& out, const VariabilityReport& report) {
  out << "train_dataset";
  for (const auto& test : report.test_datasets)
    for (Metric m : report.metrics) out << ',' << csv_escape(test + ":" + std::string(to_string(m)));
  out << '\n';
  for (std::size_t r = 0; r < report.train_datasets.size(); ++r) {
    out << csv_escape(report.train_datasets[r]);
    for (std::size_t t = 0; t < report.test_datasets.size(); ++t)
      for (std::size_t m = 0; m < report.metrics.size(); ++m) {
        const auto& v = report.at(r, t, m).value;
        out << ',' << (v ? format_score(*v) : std::string("NA"));
      }
    out << '\n';
  }
}

void write_report_long_csv(std::ostream& out, const VariabilityReport& report) {
  out << "train_dataset,test_dataset,metric,value,subjects,excluded_singletons,normalized\n";
  for (const auto& e : report.cells) {
    out << csv_escape(e.train_dataset) << ',' << csv_escape(e.test_dataset) << ','
        << to_string(e.metric) << ',' << (e.value ? format_score(*e.value) : std::string("NA"))
        << ',' << e.subjects << ',' << e.excluded_singletons << ','
        << (e.normalized ? "true" : "false") << '\n';
  }
}

double median(std::span<const double> values) {
  if (values.empty()) throw Error(Errc::insufficient_data, "median of no values");
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

Binning bin_scores(std::span<const double> scores, const BinStrategy& strategy) {
  Binning out;
  if (strategy.kind == BinStrategy::Kind::median) {
    if (scores.size() < 2)
      throw Error(Errc::insufficient_data, "median binning needs at least 2 scores");
    const double t = median(scores);
    out.thresholds = {t};
    out.labels.reserve(scores.size());
    for (double s : scores) out.labels.emplace_back(s >= t ? "high" : "low");
    return out;
  }

  const int k = strategy.k;
  if (k < 2) throw Error(Errc::invalid_argument, "quantile binning needs k >= 2");
  if (scores.size() < static_cast<std::size_t>(k))
    throw Error(Errc::insufficient_data,
                "quantile(" + std::to_string(k) + ") binning needs at least k scores");
  std::vector<double> v(scores.begin(), scores.end());
  std::sort(v.begin(), v.end());
  const double n1 = static_cast<double>(v.size() - 1);
  for (int i = 1; i < k; ++i) {
    // Linear interpolation between order statistics (Hyndman-Fan type 7).
    const double h = n1 * static_cast<double>(i) / static_cast<double>(k);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, v.size() - 1);
    out.thresholds.push_back(v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]));
  }
  out.labels.reserve(scores.size());
  for (double s : scores) {
    const auto bin = std::upper_bound(out.thresholds.begin(), out.thresholds.end(), s) -
                     out.thresholds.begin();
    out.labels.push_back("q" + std::to_string(bin + 1));
  }
  return out;
}

GroupDistribution group_distribution(std::span<const double> scores,
                                     std::span<const std::optional<std::string>> labels,
                                     std::size_t bins) {
  if (scores.size() != labels.size())
    throw Error(Errc::invalid_argument, "scores and labels differ in length");
  if (bins == 0) throw Error(Errc::invalid_argument, "bin count must be positive");

  std::map<std::string, std::vector<double>> groups;
  for (std::size_t i = 0; i < scores.size(); ++i)
    if (labels[i] && std::isfinite(scores[i])) groups[*labels[i]].push_back(scores[i]);
  if (groups.empty()) throw Error(Errc::insufficient_data, "no labeled rows");

  double lo = INFINITY, hi = -INFINITY;
  for (const auto& [g, v] : groups)
    for (double s : v) {
      lo = std::min(lo, s);
      hi = std::max(hi, s);
    }
  if (lo == hi) {
    lo -= 0.5;
    hi += 0.5;
  }

  GroupDistribution dist;
  dist.edges.resize(bins + 1);
  const double width = (hi - lo) / static_cast<double>(bins);
  for (std::size_t i = 0; i <= bins; ++i) dist.edges[i] = lo + width * static_cast<double>(i);
  dist.edges.back() = hi;

  for (const auto& [g, v] : groups) {
    GroupHistogram h{g, std::vector<std::size_t>(bins, 0)};
    for (double s : v) {
      auto b = static_cast<std::size_t>(std::floor((s - lo) / (hi - lo) * static_cast<double>(bins)));
      ++h.counts[std::min(b, bins - 1)];
    }
    dist.groups.push_back(std::move(h));
  }
  return dist;
}

void write_distribution_csv(std::ostream& out, const GroupDistribution& dist) {
  out << "group,bin,bin_lo,bin_hi,count\n";
  for (const auto& g : dist.groups)
    for (std::size_t b = 0; b < g.counts.size(); ++b)
      out << csv_escape(g.group) << ',' << b << ',' << format_score(dist.edges[b]) << ','
          << format_score(dist.edges[b + 1]) << ',' << g.counts[b] << '\n';
}

double spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw Error(Errc::invalid_argument, "spearman: length mismatch");
  if (x.size() < 2) throw Error(Errc::insufficient_data, "spearman needs at least 2 pairs");
  const auto rx = ranks(x);
  const auto ry = ranks(y);
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) throw Error(Errc::zero_variance, "spearman: constant input");
  return sxy / std::sqrt(sxx * syy);
}

} // namespace skintone
