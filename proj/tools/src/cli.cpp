#include "skintone_cli/cli.hpp"

#include "skintone/analysis.hpp"
#include "skintone/error.hpp"
#include "skintone/ingestion.hpp"
#include "skintone/parallel.hpp"
#include "skintone/pipeline.hpp"
#include "skintone/rsr.hpp"
#include "skintone/sreds.hpp"
#include "skintone/synth.hpp"

#include "CLI11.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <ostream>
#include <set>
#include <sstream>

namespace skintone::cli {

namespace {

namespace fs = std::filesystem;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string join(const std::vector<std::string>& v) {
  std::string s;
  for (const auto& x : v) s += (s.empty() ? "" : ",") + x;
  return s;
}

void log_config(std::ostream& err, const RunConfig& c) {
  err << "config: command=" << c.command;
  if (!c.subcommand.empty()) err << ' ' << c.subcommand;
  err << " seed=" << c.seed << " threads=" << resolve_threads(c.threads)
      << " ita_kernel=" << c.ita_kernel << " max_anchors=" << c.max_anchors
      << " gamma=" << (c.gamma ? format_score(*c.gamma) : std::string("median-heuristic"))
      << " nnmf_iters=" << c.nnmf_iters << " nnmf_tol=" << format_score(c.nnmf_tol)
      << " min_patch_pixels=" << c.min_patch_pixels << " gray_world=" << c.gray_world
      << " normalize=" << (c.normalize ? (*c.normalize ? "on" : "off") : "default")
      << " bins=" << c.bins << " strategy=" << c.strategy << " k=" << c.k << " max_failures="
      << (c.max_failures ? std::to_string(*c.max_failures) : std::string("unlimited"));
  if (!c.manifests.empty()) err << " manifests=" << join(c.manifests);
  if (!c.models.empty()) err << " models=" << join(c.models);
  if (!c.scores.empty()) err << " scores=" << join(c.scores);
  if (!c.train_datasets.empty()) err << " train=" << join(c.train_datasets);
  if (!c.metrics.empty()) err << " metrics=" << join(c.metrics);
  if (!c.dataset.empty()) err << " dataset=" << c.dataset;
  if (!c.metric.empty()) err << " metric=" << c.metric;
  if (!c.spec.empty()) err << " spec=" << c.spec;
  if (!c.out.empty()) err << " out=" << c.out;
  if (!c.long_out.empty()) err << " long_out=" << c.long_out;
  err << '\n';
}

void validate_config(const RunConfig& c) {
  if (c.ita_kernel < 1 || c.ita_kernel % 2 == 0)
    throw UsageError("--ita-kernel must be a positive odd integer");
  if (c.max_anchors < 2) throw UsageError("--max-anchors must be at least 2");
  if (c.gamma && !(*c.gamma > 0.0)) throw UsageError("--gamma must be positive");
  if (c.nnmf_iters < 1) throw UsageError("--nnmf-iters must be at least 1");
  if (!(c.nnmf_tol >= 0.0)) throw UsageError("--nnmf-tol must be non-negative");
  if (c.min_patch_pixels < 1) throw UsageError("--min-patch-pixels must be at least 1");
  if (c.bins < 1) throw UsageError("--bins must be at least 1");
  if (c.strategy != "median" && c.strategy != "quantile")
    throw UsageError("--strategy must be 'median' or 'quantile'");
  if (c.strategy == "quantile" && c.k < 2) throw UsageError("--k must be at least 2");
  if (!c.metric.empty() && !parse_metric(c.metric))
    throw UsageError("unknown metric '" + c.metric + "'");
  for (const auto& m : c.metrics)
    if (!parse_metric(m)) throw UsageError("unknown metric '" + m + "'");
}

PipelineOptions pipeline_options(const RunConfig& c) {
  PipelineOptions p;
  p.patch.min_patch_pixels = c.min_patch_pixels;
  p.ita.kernel = c.ita_kernel;
  p.diffuse.nnmf.max_iters = c.nnmf_iters;
  p.diffuse.nnmf.tol = c.nnmf_tol;
  p.diffuse.nnmf.seed = c.seed;
  p.gray_world = c.gray_world;
  p.threads = resolve_threads(c.threads);
  return p;
}

// Output goes to the named file, or to `fallback` when no path was given.
void emit(const std::string& path, std::ostream& fallback,
          const std::function<void(std::ostream&)>& write) {
  if (path.empty()) {
    write(fallback);
    return;
  }
  std::ostringstream buf;
  write(buf);
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error(Errc::io, "cannot write '" + path + "'");
  f << buf.str();
  if (!f) throw Error(Errc::io, "write failed for '" + path + "'");
}

void log_failures(std::ostream& err, const std::vector<SampleFailure>& failures) {
  for (const auto& f : failures) err << "warning: " << f.message << '\n';
}

// ---- fit -------------------------------------------------------------------

int cmd_fit(const RunConfig& c, std::ostream& out, std::ostream& err) {
  const auto manifest = load_manifest(c.manifests.front());
  const auto opts = pipeline_options(c);
  char buf[256];
  if (c.subcommand == "rsr") {
    auto run = fit_rsr_manifest(manifest, opts);
    log_failures(err, run.failures);
    save_rsr(run.model, c.out);
    const auto& d = run.model.direction;
    std::snprintf(buf, sizeof buf, "direction=(%.6f, %.6f, %.6f) sign=%+d", d[0], d[1], d[2],
                  run.model.sign);
    out << "fit RSR on '" << manifest.dataset_name << "': faces="
        << manifest.samples.size() - run.failures.size() << ' ' << buf << " seed=" << c.seed
        << " -> " << c.out << '\n';
  } else {
    SredsFitOptions fo;
    fo.max_anchors = c.max_anchors;
    fo.gamma = c.gamma;
    fo.seed = c.seed;
    auto run = fit_sreds_manifest(manifest, fo, opts);
    log_failures(err, run.failures);
    save_sreds(run.model, c.out);
    std::snprintf(buf, sizeof buf, "anchors=%zu gamma=%.9g eigenvalue=%.9g", run.model.anchor_count(),
                  run.model.gamma, run.model.eigenvalue);
    out << "fit SREDS on '" << manifest.dataset_name << "': " << buf << " seed=" << c.seed << " -> "
        << c.out << '\n';
  }
  return kExitOk;
}

// ---- score -----------------------------------------------------------------

int cmd_score(const RunConfig& c, std::ostream& out, std::ostream& err) {
  const auto metric = *parse_metric(c.subcommand);
  if (metric != Metric::ita && c.models.empty())
    throw UsageError("score " + c.subcommand + " requires --model");
  const auto manifest = load_manifest(c.manifests.front());
  const auto opts = pipeline_options(c);

  ScoreRun run;
  if (metric == Metric::ita) {
    if (!c.models.empty()) err << "warning: --model is ignored for ITA\n";
    run = score_ita(manifest, opts);
  } else if (metric == Metric::rsr) {
    run = score_rsr(manifest, load_rsr(c.models.front()), opts);
  } else {
    run = score_sreds(manifest, load_sreds(c.models.front()), opts);
  }
  log_failures(err, run.failures);
  emit(c.out, out, [&](std::ostream& os) { write_scores_csv(os, run.table); });
  err << "scored " << run.table.rows.size() << " samples of '" << manifest.dataset_name << "' ("
      << run.failures.size() << " failed)\n";
  if (c.max_failures && run.failures.size() > *c.max_failures) {
    err << "error: " << run.failures.size() << " failed samples exceed --max-failures "
        << *c.max_failures << '\n';
    return kExitFailure;
  }
  return kExitOk;
}

// ---- analyze ---------------------------------------------------------------

ScoreTable load_all_scores(const std::vector<std::string>& paths) {
  ScoreTable all;
  for (const auto& p : paths) {
    auto t = load_scores_csv(p);
    all.rows.insert(all.rows.end(), std::make_move_iterator(t.rows.begin()),
                    std::make_move_iterator(t.rows.end()));
  }
  validate_unique(all);
  return all;
}

// Distinct (dataset, metric) slices after filtering, sorted.
std::vector<std::pair<std::string, Metric>> slices(const ScoreTable& t, const RunConfig& c) {
  std::set<std::pair<std::string, Metric>> keys;
  const auto want = c.metric.empty() ? std::nullopt : parse_metric(c.metric);
  for (const auto& r : t.rows) {
    if (!c.dataset.empty() && r.dataset != c.dataset) continue;
    if (want && r.metric != *want) continue;
    keys.emplace(r.dataset, r.metric);
  }
  if (keys.empty()) throw Error(Errc::insufficient_data, "no score rows match the selection");
  return {keys.begin(), keys.end()};
}

int cmd_variability(const RunConfig& c, std::ostream& out) {
  const auto table = load_all_scores(c.scores);
  const bool normalize = c.normalize.value_or(false);
  std::vector<VariabilityEntry> entries;
  for (const auto& [ds, m] : slices(table, c)) {
    const auto rows = table.slice(ds, m);
    try {
      entries.push_back(intra_subject_variability(rows, normalize));
    } catch (const Error& e) {
      throw Error(e.code(), ds + " " + std::string(to_string(m)) + ": " + e.what());
    }
  }
  emit(c.out, out, [&](std::ostream& os) {
    os << "dataset,metric,value,subjects,excluded_singletons,normalized\n";
    for (const auto& e : entries)
      os << csv_escape(e.test_dataset) << ',' << to_string(e.metric) << ',' << format_score(*e.value)
         << ',' << e.subjects << ',' << e.excluded_singletons << ','
         << (e.normalized ? "true" : "false") << '\n';
  });
  return kExitOk;
}

struct CrossInputs {
  std::map<std::string, DatasetManifest> tests;
  std::vector<std::string> test_order;
  std::map<std::pair<std::string, Metric>, std::string> models;
  std::vector<std::string> train_order;
};

CrossInputs parse_cross_inputs(const RunConfig& c) {
  CrossInputs in;
  for (const auto& spec : c.manifests) {
    const auto eq = spec.find('=');
    const std::string path = eq == std::string::npos ? spec : spec.substr(eq + 1);
    auto m = load_manifest(path);
    if (eq != std::string::npos) m.dataset_name = spec.substr(0, eq);
    if (in.tests.count(m.dataset_name))
      throw UsageError("test dataset '" + m.dataset_name + "' given twice");
    in.test_order.push_back(m.dataset_name);
    in.tests.emplace(m.dataset_name, std::move(m));
  }
  for (const auto& spec : c.models) {
    const auto colon = spec.find(':');
    const auto eq = spec.find('=', colon == std::string::npos ? 0 : colon);
    if (colon == std::string::npos || eq == std::string::npos)
      throw UsageError("--model for cross must be TRAIN:METRIC=path, got '" + spec + "'");
    const std::string train = spec.substr(0, colon);
    const auto metric = parse_metric(spec.substr(colon + 1, eq - colon - 1));
    if (!metric || *metric == Metric::ita)
      throw UsageError("--model '" + spec + "' must name RSR or SREDS");
    if (!in.models.emplace(std::pair{train, *metric}, spec.substr(eq + 1)).second)
      throw UsageError("duplicate model for " + train + ":" + std::string(to_string(*metric)));
    if (std::find(in.train_order.begin(), in.train_order.end(), train) == in.train_order.end())
      in.train_order.push_back(train);
  }
  if (!c.train_datasets.empty()) in.train_order = c.train_datasets;
  if (in.train_order.empty()) in.train_order = in.test_order;
  return in;
}

int cmd_cross(const RunConfig& c, std::ostream& out, std::ostream& err) {
  auto in = parse_cross_inputs(c);
  std::vector<Metric> metrics;
  if (c.metrics.empty()) {
    metrics.push_back(Metric::ita);
    for (Metric m : {Metric::rsr, Metric::sreds})
      for (const auto& [key, path] : in.models)
        if (key.second == m) {
          metrics.push_back(m);
          break;
        }
  } else {
    for (const auto& m : c.metrics) metrics.push_back(*parse_metric(m));
  }
  const auto opts = pipeline_options(c);

  std::mutex log_mutex;
  auto resolve = [&](const std::string& train, const std::string& test, Metric m) {
    const std::string cell =
        "cell (" + train + " -> " + test + ", " + std::string(to_string(m)) + ")";
    const auto& manifest = in.tests.at(test);
    ScoreRun run;
    if (m == Metric::ita) {
      run = score_ita(manifest, opts);
    } else {
      const auto it = in.models.find({train, m});
      if (it == in.models.end()) throw Error(Errc::missing_cell, "no model for " + cell);
      if (!fs::exists(it->second))
        throw Error(Errc::missing_cell, "model '" + it->second + "' for " + cell + " does not exist");
      run = m == Metric::rsr ? score_rsr(manifest, load_rsr(it->second), opts)
                             : score_sreds(manifest, load_sreds(it->second), opts);
    }
    std::lock_guard lock(log_mutex);
    log_failures(err, run.failures);
    return run.table.rows;
  };

  const auto report = cross_dataset_matrix(in.train_order, in.test_order, metrics, resolve,
                                           c.normalize.value_or(true), 1);
  emit(c.out, out, [&](std::ostream& os) { write_report_csv(os, report); });
  if (!c.long_out.empty())
    emit(c.long_out, out, [&](std::ostream& os) { write_report_long_csv(os, report); });
  return kExitOk;
}

int cmd_bin(const RunConfig& c, std::ostream& out, std::ostream& err) {
  const auto table = load_all_scores(c.scores);
  const auto strategy =
      c.strategy == "median" ? BinStrategy::median() : BinStrategy::quantile(c.k);
  std::vector<std::optional<std::string>> labels(table.rows.size());
  std::vector<bool> selected(table.rows.size(), false);
  for (const auto& [ds, m] : slices(table, c)) {
    std::vector<std::size_t> idx;
    std::vector<double> values;
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
      const auto& r = table.rows[i];
      if (r.dataset != ds || r.metric != m) continue;
      selected[i] = true;
      if (r.score) {
        idx.push_back(i);
        values.push_back(*r.score);
      }
    }
    const auto binning = bin_scores(values, strategy);
    for (std::size_t j = 0; j < idx.size(); ++j) labels[idx[j]] = binning.labels[j];
    err << "bin " << ds << ' ' << to_string(m) << ": thresholds";
    for (double t : binning.thresholds) err << ' ' << format_score(t);
    err << '\n';
  }
  emit(c.out, out, [&](std::ostream& os) {
    os << "dataset,subject_id,sample_id,metric,score,bin\n";
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
      if (!selected[i]) continue;
      const auto& r = table.rows[i];
      os << csv_escape(r.dataset) << ',' << csv_escape(r.subject_id) << ','
         << csv_escape(r.sample_id) << ',' << to_string(r.metric) << ','
         << (r.score ? format_score(*r.score) : std::string("NA")) << ','
         << labels[i].value_or("NA") << '\n';
    }
  });
  return kExitOk;
}

int cmd_dist(const RunConfig& c, std::ostream& out) {
  const auto table = load_all_scores(c.scores);
  std::map<std::tuple<std::string, std::string, std::string>, std::optional<std::string>> groups;
  for (const auto& path : c.manifests) {
    const auto m = load_manifest(path);
    for (const auto& s : m.samples) groups[{m.dataset_name, s.subject_id, s.sample_id}] = s.group_label;
  }
  std::vector<std::tuple<std::string, Metric, GroupDistribution>> results;
  for (const auto& [ds, m] : slices(table, c)) {
    std::vector<double> values;
    std::vector<std::optional<std::string>> labels;
    for (const auto& r : table.rows) {
      if (r.dataset != ds || r.metric != m || !r.score) continue;
      const auto it = groups.find({r.dataset, r.subject_id, r.sample_id});
      values.push_back(*r.score);
      labels.push_back(it == groups.end() ? std::nullopt : it->second);
    }
    try {
      results.emplace_back(ds, m, group_distribution(values, labels, c.bins));
    } catch (const Error& e) {
      throw Error(e.code(), ds + " " + std::string(to_string(m)) + ": " + e.what());
    }
  }
  emit(c.out, out, [&](std::ostream& os) {
    os << "dataset,metric,group,bin,bin_lo,bin_hi,count\n";
    for (const auto& [ds, m, dist] : results)
      for (const auto& g : dist.groups)
        for (std::size_t b = 0; b < g.counts.size(); ++b)
          os << csv_escape(ds) << ',' << to_string(m) << ',' << csv_escape(g.group) << ',' << b
             << ',' << format_score(dist.edges[b]) << ',' << format_score(dist.edges[b + 1]) << ','
             << g.counts[b] << '\n';
  });
  return kExitOk;
}

// ---- synth -----------------------------------------------------------------

int cmd_synth(const RunConfig& c, std::ostream& out) {
  SynthSpec spec = c.spec.empty() ? SynthSpec{} : load_synth_spec(c.spec);
  if (c.seed_given) spec.seed = c.seed;
  if (c.min_patch_pixels != 64) spec.min_patch_pixels = c.min_patch_pixels;
  validate(spec);
  const auto manifest = generate_dataset(spec, c.out, resolve_threads(c.threads));
  out << "wrote " << manifest.samples.size() << " samples ("
      << spec.n_subjects << " subjects) to "
      << (fs::path(c.out) / (spec.dataset_name + ".jsonl")).string() << '\n';
  return kExitOk;
}

// ---- command line ----------------------------------------------------------

void add_common(CLI::App* sub, RunConfig& c, CLI::Option*& seed_opt) {
  seed_opt = sub->add_option("--seed", c.seed, "Root seed for every random draw");
  sub->add_option("--threads", c.threads, "Worker threads (0 = all cores; SKINTONE_THREADS wins)");
}

void add_metric_flags(CLI::App* sub, RunConfig& c) {
  sub->add_option("--min-patch-pixels", c.min_patch_pixels, "Smallest usable region");
  sub->add_option("--ita-kernel", c.ita_kernel, "Odd ITA smoothing window");
  sub->add_option("--nnmf-iters", c.nnmf_iters, "NNMF iteration cap");
  sub->add_option("--nnmf-tol", c.nnmf_tol, "NNMF relative-decrease tolerance");
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig c;
  CLI::App app{"Skin-tone metrics: ITA, RSR and SREDS", "skintone"};
  app.require_subcommand(1);
  std::vector<CLI::Option*> seed_opts(4, nullptr);
  std::vector<CLI::Option*> normalize_opts;
  bool normalize = false;

  auto* fit = app.add_subcommand("fit", "Calibrate a trainable metric on a manifest");
  fit->add_option("metric", c.subcommand, "rsr | sreds")->required()
      ->check(CLI::IsMember({"ita", "rsr", "sreds"}, CLI::ignore_case));
  fit->add_option("--manifest", c.manifests, "Training manifest (JSON Lines)")->required()
      ->expected(1);
  fit->add_option("--out", c.out, "Model file to write")->required();
  fit->add_option("--max-anchors", c.max_anchors, "SREDS anchor cap");
  fit->add_option("--gamma", c.gamma, "SREDS RBF gamma (default: median heuristic)");
  fit->add_flag("--gray-world", c.gray_world, "RSR: gray-world normalize each image");
  add_common(fit, c, seed_opts[0]);
  add_metric_flags(fit, c);

  auto* score = app.add_subcommand("score", "Score every sample of a manifest");
  score->add_option("metric", c.subcommand, "ita | rsr | sreds")->required()
      ->check(CLI::IsMember({"ita", "rsr", "sreds"}, CLI::ignore_case));
  score->add_option("--manifest", c.manifests, "Manifest to score")->required()->expected(1);
  score->add_option("--model", c.models, "Model file (RSR, SREDS)")->expected(1);
  score->add_option("--out", c.out, "Scores CSV (default: stdout)");
  score->add_option("--max-failures", c.max_failures, "Fail when more samples than this fail");
  add_common(score, c, seed_opts[1]);
  add_metric_flags(score, c);

  auto* analyze = app.add_subcommand("analyze", "Variability, cross-dataset, binning, distributions");
  analyze->require_subcommand(1);
  auto add_normalize = [&](CLI::App* sub) {
    normalize_opts.push_back(sub->add_flag("--normalize,!--no-normalize", normalize,
                                  "z-score each slice before measuring spread"));
  };
  auto* variability = analyze->add_subcommand("variability", "Mean intra-subject sd per slice");
  variability->add_option("--scores", c.scores, "Scores CSV(s)")->required();
  variability->add_option("--dataset", c.dataset, "Only this dataset");
  variability->add_option("--metric", c.metric, "Only this metric");
  variability->add_option("--out", c.out, "Report CSV (default: stdout)");
  add_normalize(variability);

  auto* cross = analyze->add_subcommand("cross", "Train x test x metric variability table");
  cross->add_option("--test", c.manifests, "Test manifest, optionally NAME=path")->required();
  cross->add_option("--model", c.models, "Model as TRAIN:METRIC=path");
  cross->add_option("--train", c.train_datasets, "Training dataset rows (default: from models)");
  cross->add_option("--metrics", c.metrics, "Metrics to tabulate")->delimiter(',');
  cross->add_option("--out", c.out, "Wide report CSV (default: stdout)");
  cross->add_option("--long-out", c.long_out, "One row per cell with subject counts");
  cross->add_option("--ita-kernel", c.ita_kernel, "Odd ITA smoothing window");
  cross->add_option("--min-patch-pixels", c.min_patch_pixels, "Smallest usable region");
  cross->add_option("--nnmf-iters", c.nnmf_iters, "NNMF iteration cap");
  cross->add_option("--nnmf-tol", c.nnmf_tol, "NNMF relative-decrease tolerance");
  cross->add_option("--threads", c.threads, "Worker threads");
  cross->add_option("--seed", c.seed, "Root seed");
  add_normalize(cross);

  auto* bin = analyze->add_subcommand("bin", "Label scores by median or quantile bins");
  bin->add_option("--scores", c.scores, "Scores CSV(s)")->required();
  bin->add_option("--dataset", c.dataset, "Only this dataset");
  bin->add_option("--metric", c.metric, "Only this metric");
  bin->add_option("--strategy", c.strategy, "median | quantile");
  bin->add_option("--k", c.k, "Bin count for quantile binning");
  bin->add_option("--out", c.out, "Labeled CSV (default: stdout)");

  auto* dist = analyze->add_subcommand("dist", "Per-group score histograms");
  dist->add_option("--scores", c.scores, "Scores CSV(s)")->required();
  dist->add_option("--manifest", c.manifests, "Manifest(s) carrying group labels")->required();
  dist->add_option("--dataset", c.dataset, "Only this dataset");
  dist->add_option("--metric", c.metric, "Only this metric");
  dist->add_option("--bins", c.bins, "Histogram bins over the observed range");
  dist->add_option("--out", c.out, "Histogram CSV (default: stdout)");

  auto* synth = app.add_subcommand("synth", "Generate a synthetic dichromatic dataset");
  synth->add_option("--spec", c.spec, "SynthSpec JSON (default: built-in spec)");
  synth->add_option("--out", c.out, "Output directory")->required();
  synth->add_option("--min-patch-pixels", c.min_patch_pixels, "Smallest usable region");
  add_common(synth, c, seed_opts[2]);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n';
    if (const auto subs = app.get_subcommands(); !subs.empty()) err << subs.front()->help();
    return kExitUsage;
  }

  for (auto* o : seed_opts)
    if (o && o->count() > 0) c.seed_given = true;
  for (auto* o : normalize_opts)
    if (o->count() > 0) c.normalize = normalize;

  c.command = app.get_subcommands().front()->get_name();
  if (c.command == "analyze") c.subcommand = analyze->get_subcommands().front()->get_name();
  std::transform(c.subcommand.begin(), c.subcommand.end(), c.subcommand.begin(),
                 [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });

  try {
    if (c.command == "fit" && c.subcommand == "ita")
      throw UsageError("ITA has no training component; score it directly with 'score ita'");
    validate_config(c);
    log_config(err, c);
    if (c.command == "fit") return cmd_fit(c, out, err);
    if (c.command == "score") return cmd_score(c, out, err);
    if (c.command == "synth") return cmd_synth(c, out);
    if (c.subcommand == "variability") return cmd_variability(c, out);
    if (c.subcommand == "cross") return cmd_cross(c, out, err);
    if (c.subcommand == "bin") return cmd_bin(c, out, err);
    return cmd_dist(c, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    err << "error [" << to_string(e.code()) << "]: " << e.what() << '\n';
    return kExitFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}

} // namespace skintone::cli
