// Acceptance suite: one line per criterion, nonzero exit if any fails.

#include "skintone/analysis.hpp"
#include "skintone/colorspace.hpp"
#include "skintone/nnmf.hpp"
#include "skintone/pipeline.hpp"
#include "skintone/random.hpp"
#include "skintone/sreds.hpp"
#include "skintone/synth.hpp"
#include "skintone_cli/cli.hpp"

#include "oracles.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

using namespace skintone;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* pattern, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, pattern, args...);
  return buf;
}

double cosine(const Vec3& a, const Vec3& b) { return a.dot(b) / (a.norm() * b.norm()); }

SynthSpec grid_spec(const std::string& name, std::uint64_t seed) {
  SynthSpec s;
  s.dataset_name = name;
  s.n_subjects = 40;
  s.samples_per_subject = 5;
  s.melanin_grid = true;
  s.seed = seed;
  return s;
}

// Per-subject mean score against the melanin encoded in the subject id.
std::pair<std::vector<double>, std::vector<double>> subject_means(const ScoreTable& t) {
  std::map<std::string, std::vector<double>> by;
  for (const auto& r : t.rows)
    if (r.score) by[r.subject_id].push_back(*r.score);
  std::vector<double> mel, mean;
  for (const auto& [id, v] : by) {
    mel.push_back(*melanin_from_subject_id(id));
    mean.push_back(oracle::mean(v));
  }
  return {mel, mean};
}

// ---------------------------------------------------------------------------

Outcome colorimetry() {
  double worst = 0.0;
  for (const auto& row : oracle::lab_reference()) {
    const auto p = srgb_to_lab({static_cast<std::uint8_t>(row.r), static_cast<std::uint8_t>(row.g),
                                static_cast<std::uint8_t>(row.b)});
    worst = std::max({worst, std::abs(p.L - row.L), std::abs(p.a - row.a), std::abs(p.b - row.bb)});
  }
  const bool ita_exact = lab_ita(50, 7) == 0.0 && lab_ita(60, 10) == 45.0 && lab_ita(40, 10) == -45.0 &&
                         lab_ita(70, 0) == 90.0 && lab_ita(30, 0) == -90.0;
  return {worst < 1e-3 && ita_exact,
          fmt("%zu reference colors, max |dLab| = %.2e; ITA 0/+-45/+-90 exact: %s", oracle::lab_reference().size(),
              worst, ita_exact ? "yes" : "no")};
}

Outcome nnmf_correctness() {
  int ok = 0, monotone = 0, rejected_above_floor = 0;
  double worst = 0.0;
  int max_iters = 0;
  for (std::uint64_t t = 0; t < 100; ++t) {
    Rng rng(derive_seed(42, {t}));
    Basis W;
    for (int i = 0; i < 3; ++i) W(i, 0) = rng.uniform(), W(i, 1) = rng.uniform();
    Activations H(2, 256);
    for (Eigen::Index j = 0; j < 256; ++j) H(0, j) = rng.uniform(), H(1, j) = rng.uniform();
    ColorMatrix V = W * H;
    V /= V.maxCoeff();
    const auto r = nnmf(V, {.max_iters = 500, .tol = 1e-6, .seed = t});
    worst = std::max(worst, r.rel_error);
    max_iters = std::max(max_iters, r.iterations);
    if (r.rel_error < 1e-4 && r.iterations <= 500) ++ok;
    bool mono = true;
    for (std::size_t i = 1; i < r.objective.size(); ++i) mono = mono && r.objective[i] <= r.objective[i - 1];
    monotone += mono;
    if (r.stop == NnmfStop::non_decrease && r.rel_error >= 1e-12) ++rejected_above_floor;
  }
  return {ok == 100 && monotone == 100 && rejected_above_floor == 0,
          fmt("%d/100 below 1e-4 (worst %.1e, max %d iters); monotone %d/100; rejected steps above noise floor: %d",
              ok, worst, max_iters, monotone, rejected_above_floor)};
}

Outcome dichromatic_recovery() {
  const SynthSpec defaults;
  std::string detail;
  bool pass = true;
  for (double spec : {0.0, 0.1, 0.3}) {
    int hits = 0;
    double worst = 1.0;
    for (std::uint64_t t = 0; t < 100; ++t) {
      Rng rng(derive_seed(7, {static_cast<std::uint64_t>(spec * 1000), t}));
      const double melanin = rng.uniform(defaults.melanin_lo, defaults.melanin_hi);
      const Vec3 ill = defaults.illuminants[rng.below(defaults.illuminants.size())];
      const Vec3 albedo = defaults.base_albedo * melanin;
      const auto patch = render_patch({albedo, ill, spec, defaults.shading_variation, defaults.noise_sigma,
                                       defaults.patch_size, rng.next()});
      const auto d = decompose_patch(patch);
      const double c = cosine(d.basis.col(d.diffuse_index), albedo.cwiseProduct(ill));
      worst = std::min(worst, c);
      hits += c > 0.99;
    }
    pass = pass && hits >= 95;
    detail += fmt("%sspecular %.1f: %d/100 (min cos %.5f)", detail.empty() ? "" : "; ", spec, hits, worst);
  }
  return {pass, detail};
}

Outcome kpca_oracle() {
  int sets_ok = 0;
  double worst = 0.0;
  for (std::uint64_t t = 0; t < 50; ++t) {
    Rng rng(derive_seed(99, {t}));
    const std::size_t n = 5 + rng.below(46);
    std::vector<DiffuseFeature> feats;
    for (std::size_t i = 0; i < n; ++i) {
      const double s = rng.uniform(0.05, 1.0);
      feats.push_back({Vec3(s * rng.uniform(0.4, 0.6), s * rng.uniform(0.25, 0.4), s * rng.uniform(0.15, 0.3))});
    }
    const auto model = fit_sreds(feats, {}, "kpca");
    std::vector<std::array<double, 3>> pts;
    for (const auto& f : feats) pts.push_back({f.value[0], f.value[1], f.value[2]});
    const oracle::KpcaOracle ref(pts, model.gamma);
    const auto scores = anchor_scores(model);

    std::vector<double> ref_scores = ref.anchor_scores, lum;
    for (const auto& f : feats) lum.push_back(f.value.sum());
    const double sign = oracle::pearson(ref_scores, lum) < 0 ? -1.0 : 1.0;
    double err = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      err = std::max(err, std::abs(scores[static_cast<Eigen::Index>(i)] - sign * ref_scores[i]));
    for (int k = 0; k < 10; ++k) {
      const std::array<double, 3> x{rng.uniform(0.0, 0.6), rng.uniform(0.0, 0.4), rng.uniform(0.0, 0.3)};
      err = std::max(err, std::abs(project_sreds(model, {Vec3(x[0], x[1], x[2])}) - sign * ref.project(x)));
    }
    worst = std::max(worst, err);
    sets_ok += err < 1e-8;
  }
  return {sets_ok == 50, fmt("%d/50 sets within 1e-8 (worst %.2e)", sets_ok, worst)};
}

// Shared by the gradient and binning criteria.
ScoreTable g_gradient_scores;

Outcome tone_gradient() {
  oracle::TempDir dir("acc_gradient");
  const auto manifest = generate_dataset(grid_spec("gradient", 1), dir.path());
  const auto model = fit_sreds_manifest(manifest, {}, {}).model;
  const auto run = score_sreds(manifest, model, {});
  g_gradient_scores = run.table;
  const auto [mel, mean] = subject_means(run.table);
  const double rho = oracle::spearman(mean, mel);
  return {std::abs(rho) > 0.95 && run.failures.empty() && mel.size() == 40,
          fmt("40 subjects x 5 samples, |rho| = %.4f, failed samples %zu", std::abs(rho), run.failures.size())};
}

Outcome variability_ordering() {
  int wins = 0;
  std::string values;
  for (std::uint64_t rep = 1; rep <= 10; ++rep) {
    oracle::TempDir dir("acc_var");
    const auto manifest = generate_dataset(grid_spec("var", 1000 + rep), dir.path());
    const auto model = fit_sreds_manifest(manifest, {.seed = rep}, {}).model;
    const auto sreds = score_sreds(manifest, model, {}).table;
    const auto ita = score_ita(manifest, {}).table;
    const double vs = *intra_subject_variability(sreds.rows, true).value;
    const double vi = *intra_subject_variability(ita.rows, true).value;
    wins += vs < vi;
    values += fmt("%s%.3f/%.3f", values.empty() ? "" : " ", vs, vi);
  }
  return {wins >= 8, fmt("SREDS < ITA in %d/10 replicates (SREDS/ITA: %s)", wins, values.c_str())};
}

Outcome cross_dataset() {
  oracle::TempDir a("acc_cross_a"), b("acc_cross_b");
  SynthSpec sa = grid_spec("A", 11), sb = grid_spec("B", 12);
  sa.illuminants = {Vec3(1.0, 1.0, 1.0)};
  sb.illuminants = {Vec3(1.0, 0.95, 0.9)};
  const auto ma = generate_dataset(sa, a.path());
  const auto mb = generate_dataset(sb, b.path());
  const auto model = fit_sreds_manifest(ma, {}, {}).model;
  const auto run = score_sreds(mb, model, {});
  std::vector<double> mel, score;
  for (const auto& r : run.table.rows) {
    if (!r.score) continue;
    mel.push_back(*melanin_from_subject_id(r.subject_id));
    score.push_back(*r.score);
  }
  const double rho = oracle::spearman(score, mel);
  const auto [smel, smean] = subject_means(run.table);
  return {rho > 0.9 && score.size() == mb.samples.size(),
          fmt("fit on A (white light), scored %zu samples of B: rho = %.4f (subject means %.4f)", score.size(), rho,
              oracle::spearman(smean, smel))};
}

Outcome binning() {
  const auto start = std::chrono::steady_clock::now();
  std::vector<std::pair<std::string, std::vector<double>>> sets;
  std::vector<double> gradient;
  for (const auto& r : g_gradient_scores.rows)
    if (r.score) gradient.push_back(*r.score);
  sets.emplace_back("gradient SREDS", gradient);
  Rng rng(5);
  for (std::size_t n : {2u, 3u, 51u, 200u, 1001u}) {
    std::vector<double> v(n);
    for (auto& x : v) x = rng.normal();
    sets.emplace_back("random n=" + std::to_string(n), v);
  }
  bool pass = gradient.size() == 200;
  std::string detail;
  for (const auto& [name, v] : sets) {
    const auto labels = bin_scores(v, BinStrategy::median()).labels;
    const auto high = static_cast<long>(std::count(labels.begin(), labels.end(), "high"));
    const long low = static_cast<long>(labels.size()) - high;
    bool invariant = true;
    for (const auto& f : std::vector<std::function<double(double)>>{
             [](double x) { return std::exp(x); }, [](double x) { return x * x * x; },
             [](double x) { return 3.0 * x + 1.0; }, [](double x) { return std::atan(x); }}) {
      std::vector<double> t;
      for (double x : v) t.push_back(f(x));
      invariant = invariant && bin_scores(t, BinStrategy::median()).labels == labels;
    }
    const bool balanced = std::abs(high - low) <= 1;
    pass = pass && balanced && invariant;
    detail += fmt("%s%s %ld/%ld%s", detail.empty() ? "" : "; ", name.c_str(), low, high, invariant ? "" : " (NOT invariant)");
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return {pass && secs < 1.0, detail};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome determinism() {
  oracle::TempDir work("acc_det");
  std::ofstream(work / "a.json") << R"({"dataset_name":"A","melanin_grid":true})";
  std::ofstream(work / "b.json") << R"({"dataset_name":"B","illuminants":[[1.0,0.95,0.9]]})";

  auto pipeline = [&](const std::string& threads) {
    const std::string root = (work / ("t" + threads)).string();
    std::filesystem::create_directories(root);
    const std::vector<std::vector<std::string>> steps = {
        {"synth", "--spec", (work / "a.json").string(), "--out", root + "/A", "--seed", "21"},
        {"synth", "--spec", (work / "b.json").string(), "--out", root + "/B", "--seed", "22"},
        {"fit", "sreds", "--manifest", root + "/A/A.jsonl", "--out", root + "/a_sreds.json", "--seed", "3"},
        {"fit", "rsr", "--manifest", root + "/A/A.jsonl", "--out", root + "/a_rsr.json"},
        {"fit", "sreds", "--manifest", root + "/B/B.jsonl", "--out", root + "/b_sreds.json", "--seed", "3"},
        {"score", "ita", "--manifest", root + "/A/A.jsonl", "--out", root + "/a_ita.csv"},
        {"score", "rsr", "--manifest", root + "/B/B.jsonl", "--model", root + "/a_rsr.json", "--out",
         root + "/b_rsr.csv"},
        {"score", "sreds", "--manifest", root + "/B/B.jsonl", "--model", root + "/a_sreds.json", "--out",
         root + "/b_sreds.csv", "--seed", "3"},
        {"analyze", "variability", "--scores", root + "/a_ita.csv", root + "/b_rsr.csv", root + "/b_sreds.csv",
         "--normalize", "--out", root + "/variability.csv"},
        {"analyze", "cross", "--test", root + "/A/A.jsonl", "--test", root + "/B/B.jsonl", "--model",
         "A:SREDS=" + root + "/a_sreds.json", "--model", "B:SREDS=" + root + "/b_sreds.json", "--seed", "3",
         "--out", root + "/cross.csv", "--long-out", root + "/cross_long.csv"},
        {"analyze", "bin", "--scores", root + "/b_sreds.csv", "--out", root + "/bins.csv"},
        {"analyze", "dist", "--scores", root + "/b_sreds.csv", "--manifest", root + "/B/B.jsonl", "--out",
         root + "/dist.csv"},
    };
    for (auto step : steps) {
      if (step[1] != "variability" && step[1] != "bin" && step[1] != "dist") {
        step.push_back("--threads");
        step.push_back(threads);
      }
      std::ostringstream out, err;
      if (cli::run_cli(step, out, err) != 0) throw std::runtime_error("step failed: " + err.str());
    }
    return root;
  };

  const auto r1 = pipeline("1");
  const auto r8 = pipeline("8");
  std::size_t compared = 0, differing = 0;
  for (const auto& e : std::filesystem::recursive_directory_iterator(r1)) {
    if (!e.is_regular_file()) continue;
    const auto rel = std::filesystem::relative(e.path(), r1);
    ++compared;
    if (slurp(e.path()) != slurp(std::filesystem::path(r8) / rel)) ++differing;
  }
  return {compared > 0 && differing == 0,
          fmt("synth/fit/score/analyze at 1 and 8 threads: %zu files compared, %zu differ", compared, differing)};
}

} // namespace

int main() {
  // The thread-count comparison is meaningless if the environment pins it.
  ::unsetenv("SKINTONE_THREADS");

  struct Criterion {
    const char* name;
    double budget_s;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {"Colorimetry oracle", 1, colorimetry},
      {"NNMF correctness", 30, nnmf_correctness},
      {"Dichromatic recovery", 60, dichromatic_recovery},
      {"KPCA oracle equivalence", 30, kpca_oracle},
      {"Tone-gradient monotonicity", 300, tone_gradient},
      {"Variability ordering", 600, variability_ordering},
      {"Cross-dataset generalization", 300, cross_dataset},
      {"Binning workflow", 1, binning},
      {"Determinism", 600, determinism},
  };

  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_budget = secs < c.budget_s;
    const bool pass = o.pass && in_budget;
    failed += !pass;
    std::cout << (pass ? "[PASS] " : "[FAIL] ") << c.name << " (" << fmt("%.2f s, budget %.0f s", secs, c.budget_s)
              << (in_budget ? "" : ", OVER BUDGET") << "): " << o.detail << std::endl;
  }
  std::cout << (failed == 0 ? "all acceptance criteria passed" : fmt("%d acceptance criteria failed", failed))
            << std::endl;
  return failed == 0 ? 0 : 1;
}
