#include "skintone/analysis.hpp"
#include "skintone/pipeline.hpp"
#include "skintone/sreds.hpp"
#include "skintone_cli/cli.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

using namespace skintone;
using skintone::cli::run_cli;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::map<std::string, std::string> tree(const std::filesystem::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : std::filesystem::recursive_directory_iterator(root))
    if (e.is_regular_file()) out[std::filesystem::relative(e.path(), root).string()] = slurp(e.path());
  return out;
}

std::size_t count_lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

class CliTest : public testing::Test {
protected:
  static void SetUpTestSuite() {
    dir_ = new oracle::TempDir("cli");
    std::ofstream(*dir_ / "a.json") << R"({"dataset_name":"A","n_subjects":5,"samples_per_subject":2,"melanin_grid":true})";
    std::ofstream(*dir_ / "b.json")
        << R"({"dataset_name":"B","n_subjects":5,"samples_per_subject":2,"melanin_grid":true,"illuminants":[[1.0,0.95,0.9]]})";
    ASSERT_EQ(run({"synth", "--spec", (*dir_ / "a.json").string(), "--out", (*dir_ / "A").string()}).code, 0);
    ASSERT_EQ(run({"synth", "--spec", (*dir_ / "b.json").string(), "--out", (*dir_ / "B").string(), "--seed", "5"}).code,
              0);
  }
  static void TearDownTestSuite() { delete dir_; }

  static std::string path(const std::string& rel) { return (dir_->path() / rel).string(); }
  static std::string manifest_a() { return path("A/A.jsonl"); }
  static std::string manifest_b() { return path("B/B.jsonl"); }

  static oracle::TempDir* dir_;
};

oracle::TempDir* CliTest::dir_ = nullptr;

} // namespace

TEST_F(CliTest, FitItaIsAUsageError) {
  const auto r = run({"fit", "ita", "--manifest", manifest_a(), "--out", path("x.json")});
  EXPECT_EQ(r.code, cli::kExitUsage);
  EXPECT_NE(r.err.find("ITA has no training component"), std::string::npos);
}

TEST_F(CliTest, FitOnEmptyManifestFails) {
  std::ofstream(path("empty.jsonl")) << "\n";
  const auto r = run({"fit", "rsr", "--manifest", path("empty.jsonl"), "--out", path("x.json")});
  EXPECT_EQ(r.code, cli::kExitFailure);
  EXPECT_NE(r.err.find("empty manifest"), std::string::npos);
  EXPECT_NE(r.err.find("no samples"), std::string::npos);
}

TEST_F(CliTest, ScoreNeedsModelExceptForIta) {
  const auto r = run({"score", "rsr", "--manifest", manifest_a(), "--out", path("x.csv")});
  EXPECT_EQ(r.code, cli::kExitUsage);
  EXPECT_NE(r.err.find("--model"), std::string::npos);
  const auto ok = run({"score", "ita", "--manifest", manifest_a(), "--out", path("ita.csv")});
  ASSERT_EQ(ok.code, 0) << ok.err;
  EXPECT_EQ(count_lines(slurp(path("ita.csv"))), 1u + 10u);
}

TEST_F(CliTest, ConfigIsLogged) {
  const auto r = run({"score", "ita", "--manifest", manifest_a(), "--ita-kernel", "3"});
  ASSERT_EQ(r.code, 0);
  EXPECT_NE(r.err.find("config: command=score ita"), std::string::npos);
  EXPECT_NE(r.err.find("ita_kernel=3"), std::string::npos);
  EXPECT_EQ(run({"score", "ita", "--manifest", manifest_a(), "--ita-kernel", "4"}).code, cli::kExitUsage);
}

TEST_F(CliTest, FitSredsRoundTripsAndTransfers) {
  const auto fit = run({"fit", "sreds", "--manifest", manifest_a(), "--out", path("a_sreds.json"), "--seed", "3"});
  ASSERT_EQ(fit.code, 0) << fit.err;
  EXPECT_NE(fit.out.find("anchors=30"), std::string::npos);
  EXPECT_NE(fit.out.find("seed=3"), std::string::npos);
  ASSERT_TRUE(std::filesystem::exists(path("a_sreds.json")));

  // Reloaded model projects exactly like the in-memory fit.
  PipelineOptions opts;
  opts.diffuse.nnmf.seed = 3;
  const auto direct = fit_sreds_manifest(load_manifest(manifest_a()), {.seed = 3}, opts).model;
  const auto loaded = load_sreds(path("a_sreds.json"));
  for (Eigen::Index i = 0; i < loaded.anchors.rows(); ++i)
    EXPECT_EQ(project_sreds(loaded, {loaded.anchors.row(i).transpose()}),
              project_sreds(direct, {direct.anchors.row(i).transpose()}));

  const auto score = run({"score", "sreds", "--manifest", manifest_b(), "--model", path("a_sreds.json"), "--out",
                          path("b_sreds.csv")});
  ASSERT_EQ(score.code, 0) << score.err;
  const auto table = load_scores_csv(path("b_sreds.csv"));
  ASSERT_EQ(table.rows.size(), 10u);
  for (const auto& r : table.rows) {
    ASSERT_TRUE(r.score);
    EXPECT_TRUE(std::isfinite(*r.score));
    EXPECT_EQ(r.dataset, "B");
  }
}

TEST_F(CliTest, OutputsDoNotDependOnThreadCount) {
  ASSERT_EQ(run({"fit", "rsr", "--manifest", manifest_a(), "--out", path("rsr1.json"), "--threads", "1"}).code, 0);
  ASSERT_EQ(run({"fit", "rsr", "--manifest", manifest_a(), "--out", path("rsr4.json"), "--threads", "4"}).code, 0);
  EXPECT_EQ(slurp(path("rsr1.json")), slurp(path("rsr4.json")));
  ASSERT_EQ(run({"score", "rsr", "--manifest", manifest_b(), "--model", path("rsr1.json"), "--out",
                 path("r1.csv"), "--threads", "1"})
                .code,
            0);
  ASSERT_EQ(run({"score", "rsr", "--manifest", manifest_b(), "--model", path("rsr4.json"), "--out",
                 path("r4.csv"), "--threads", "4"})
                .code,
            0);
  EXPECT_EQ(slurp(path("r1.csv")), slurp(path("r4.csv")));
}

TEST_F(CliTest, SoftFailuresAndMaxFailures) {
  std::ifstream in(manifest_a());
  std::ofstream out(path("A/broken.jsonl"));
  std::string line;
  int i = 0;
  while (std::getline(in, line)) {
    if (i++ == 2) {
      const auto p = line.find("images/");
      line.replace(p, line.find(".png", p) + 4 - p, "images/missing.png");
    }
    out << line << '\n';
  }
  out.close();
  const auto soft = run({"score", "ita", "--manifest", path("A/broken.jsonl"), "--out", path("broken.csv")});
  EXPECT_EQ(soft.code, 0) << soft.err;
  EXPECT_NE(soft.err.find("warning:"), std::string::npos);
  const auto table = load_scores_csv(path("broken.csv"));
  ASSERT_EQ(table.rows.size(), 10u);
  EXPECT_FALSE(table.rows[2].score);
  EXPECT_EQ(run({"score", "ita", "--manifest", path("A/broken.jsonl"), "--out", path("b2.csv"), "--max-failures",
                 "1"})
                .code,
            0);
  EXPECT_EQ(run({"score", "ita", "--manifest", path("A/broken.jsonl"), "--out", path("b3.csv"), "--max-failures",
                 "0"})
                .code,
            cli::kExitFailure);
}

TEST_F(CliTest, AnalyzeVariabilityOnHandCsv) {
  std::ofstream(path("hand.csv")) << "dataset,subject_id,sample_id,metric,score\n"
                                     "d,A,1,SREDS,0\nd,A,2,SREDS,2\nd,B,1,SREDS,5\nd,B,2,SREDS,5\n";
  const auto r = run({"analyze", "variability", "--scores", path("hand.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("d,SREDS,0.707106781,2,0,false"), std::string::npos) << r.out;
  const auto n = run({"analyze", "variability", "--scores", path("hand.csv"), "--normalize"});
  EXPECT_NE(n.out.find(",true"), std::string::npos);
}

TEST_F(CliTest, AnalyzeBinMedian) {
  std::ofstream(path("four.csv")) << "dataset,subject_id,sample_id,metric,score\n"
                                     "d,a,1,SREDS,-1\nd,b,1,SREDS,-0.5\nd,c,1,SREDS,0.1\nd,d,1,SREDS,2\n";
  const auto r = run({"analyze", "bin", "--scores", path("four.csv"), "--strategy", "median"});
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream lines(r.out);
  std::string l;
  std::vector<std::string> labels;
  std::getline(lines, l);
  while (std::getline(lines, l)) labels.push_back(l.substr(l.rfind(',') + 1));
  EXPECT_EQ(labels, (std::vector<std::string>{"low", "low", "high", "high"}));
  EXPECT_NE(r.err.find("thresholds -0.2"), std::string::npos);
}

TEST_F(CliTest, AnalyzeSchemaMismatch) {
  std::ofstream(path("bad.csv")) << "dataset,subject,sample,metric,score\nd,a,1,SREDS,1\n";
  const auto r = run({"analyze", "variability", "--scores", path("bad.csv")});
  EXPECT_EQ(r.code, cli::kExitFailure);
  EXPECT_NE(r.err.find("header"), std::string::npos);
}

TEST_F(CliTest, AnalyzeCrossAndMissingModel) {
  ASSERT_EQ(run({"fit", "sreds", "--manifest", manifest_a(), "--out", path("ma.json")}).code, 0);
  ASSERT_EQ(run({"fit", "sreds", "--manifest", manifest_b(), "--out", path("mb.json")}).code, 0);
  const auto ok = run({"analyze", "cross", "--test", manifest_a(), "--test", manifest_b(), "--model",
                       "A:SREDS=" + path("ma.json"), "--model", "B:SREDS=" + path("mb.json"), "--out",
                       path("cross.csv"), "--long-out", path("cross_long.csv")});
  ASSERT_EQ(ok.code, 0) << ok.err;
  const auto wide = slurp(path("cross.csv"));
  EXPECT_EQ(wide.substr(0, wide.find('\n')), "train_dataset,A:ITA,A:SREDS,B:ITA,B:SREDS");
  EXPECT_EQ(count_lines(wide), 3u);
  EXPECT_NE(wide.find("\nA,"), std::string::npos);
  EXPECT_NE(wide.find(",NA,"), std::string::npos);
  EXPECT_EQ(count_lines(slurp(path("cross_long.csv"))), 1u + 8u);

  const auto missing = run({"analyze", "cross", "--test", manifest_a(), "--test", manifest_b(), "--model",
                            "A:SREDS=" + path("ma.json"), "--model", "B:SREDS=" + path("nope.json")});
  EXPECT_EQ(missing.code, cli::kExitFailure);
  EXPECT_NE(missing.err.find("B -> A, SREDS"), std::string::npos) << missing.err;

  const auto absent = run({"analyze", "cross", "--test", manifest_a(), "--train", "A", "--train", "Z", "--model",
                           "A:SREDS=" + path("ma.json")});
  EXPECT_EQ(absent.code, cli::kExitFailure);
  EXPECT_NE(absent.err.find("no model for cell (Z -> A, SREDS)"), std::string::npos) << absent.err;
}

TEST_F(CliTest, AnalyzeDistUsesManifestGroups) {
  ASSERT_EQ(run({"score", "ita", "--manifest", manifest_a(), "--out", path("dist_in.csv")}).code, 0);
  const auto r = run({"analyze", "dist", "--scores", path("dist_in.csv"), "--manifest", manifest_a(), "--bins", "5"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(count_lines(r.out), 1u + 2u * 5u);
  EXPECT_NE(r.out.find("A,ITA,high_melanin,0,"), std::string::npos);
  EXPECT_NE(r.out.find("A,ITA,low_melanin,4,"), std::string::npos);
}

TEST_F(CliTest, SynthDefaultsRepeatabilityAndValidation) {
  const auto r = run({"synth", "--out", path("D1"), "--seed", "9"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(count_lines(slurp(path("D1/synth.jsonl"))), 200u);
  ASSERT_EQ(run({"synth", "--out", path("D2"), "--seed", "9", "--threads", "3"}).code, 0);
  EXPECT_EQ(tree(path("D1")), tree(path("D2")));

  std::ofstream(path("rev.json")) << R"({"melanin_range":[0.9,0.2],"noise_sigma":-1})";
  const auto bad = run({"synth", "--spec", path("rev.json"), "--out", path("D3")});
  EXPECT_NE(bad.code, 0);
  EXPECT_NE(bad.err.find("melanin_range"), std::string::npos);
  EXPECT_NE(bad.err.find("noise_sigma"), std::string::npos);
}

TEST_F(CliTest, HelpAndUnknownCommands) {
  EXPECT_EQ(run({"--help"}).code, 0);
  EXPECT_EQ(run({"frobnicate"}).code, cli::kExitUsage);
  EXPECT_EQ(run({}).code, cli::kExitUsage);
}
