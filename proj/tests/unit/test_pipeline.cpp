#include "skintone/error.hpp"
#include "skintone/pipeline.hpp"
#include "skintone/synth.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <sstream>

using namespace skintone;

namespace {

class PipelineTest : public testing::Test {
protected:
  static void SetUpTestSuite() {
    dir_ = new oracle::TempDir("pipeline");
    SynthSpec s;
    s.dataset_name = "pipe";
    s.n_subjects = 6;
    s.samples_per_subject = 3;
    s.melanin_grid = true;
    manifest_ = new DatasetManifest(generate_dataset(s, dir_->path()));
  }
  static void TearDownTestSuite() {
    delete manifest_;
    delete dir_;
  }

  static std::string csv(const ScoreTable& t) {
    std::ostringstream out;
    write_scores_csv(out, t);
    return out.str();
  }

  static oracle::TempDir* dir_;
  static DatasetManifest* manifest_;
};

oracle::TempDir* PipelineTest::dir_ = nullptr;
DatasetManifest* PipelineTest::manifest_ = nullptr;

} // namespace

TEST_F(PipelineTest, ItaScoresEverySampleInOrder) {
  const auto run = score_ita(*manifest_, {});
  ASSERT_EQ(run.table.rows.size(), manifest_->samples.size());
  EXPECT_TRUE(run.failures.empty());
  for (std::size_t i = 0; i < run.table.rows.size(); ++i) {
    EXPECT_EQ(run.table.rows[i].sample_id, manifest_->samples[i].sample_id);
    EXPECT_EQ(run.table.rows[i].subject_id, manifest_->samples[i].subject_id);
    ASSERT_TRUE(run.table.rows[i].score);
    EXPECT_GE(*run.table.rows[i].score, -90.0);
    EXPECT_LE(*run.table.rows[i].score, 90.0);
  }
}

TEST_F(PipelineTest, FitAndScoreAreThreadInvariant) {
  PipelineOptions one, many;
  many.threads = 4;
  const auto a = fit_sreds_manifest(*manifest_, {}, one).model;
  const auto b = fit_sreds_manifest(*manifest_, {}, many).model;
  EXPECT_EQ(a.anchors, b.anchors);
  EXPECT_EQ(a.alpha, b.alpha);
  EXPECT_EQ(a.anchor_count(), 3 * manifest_->samples.size());
  EXPECT_EQ(csv(score_sreds(*manifest_, a, one).table), csv(score_sreds(*manifest_, b, many).table));

  const auto r1 = fit_rsr_manifest(*manifest_, one).model;
  const auto r4 = fit_rsr_manifest(*manifest_, many).model;
  EXPECT_EQ(r1, r4);
  EXPECT_EQ(csv(score_rsr(*manifest_, r1, one).table), csv(score_rsr(*manifest_, r4, many).table));
  EXPECT_EQ(csv(score_ita(*manifest_, one).table), csv(score_ita(*manifest_, many).table));
}

TEST_F(PipelineTest, BadSamplesBecomeNaRows) {
  DatasetManifest m = *manifest_;
  m.samples[1].image_path = "images/does_not_exist.png";
  {
    std::ofstream(dir_->path() / "images" / "garbage.png") << "not an image";
  }
  m.samples[4].image_path = "images/garbage.png";
  const auto run = score_ita(m, {});
  ASSERT_EQ(run.table.rows.size(), m.samples.size());
  ASSERT_EQ(run.failures.size(), 2u);
  EXPECT_EQ(run.failures[0].index, 1u);
  EXPECT_EQ(run.failures[1].index, 4u);
  EXPECT_FALSE(run.table.rows[1].score);
  EXPECT_FALSE(run.table.rows[4].score);
  EXPECT_TRUE(run.table.rows[0].score);

  const auto fit = fit_sreds_manifest(m, {}, {});
  EXPECT_EQ(fit.failures.size(), 2u);
  EXPECT_EQ(fit.model.anchor_count(), 3 * (m.samples.size() - 2));
}

TEST_F(PipelineTest, RsrModelRemembersGrayWorld) {
  PipelineOptions gw;
  gw.gray_world = true;
  const auto model = fit_rsr_manifest(*manifest_, gw).model;
  EXPECT_TRUE(model.normalization_applied);
  // Scoring follows the model's flag, not the caller's.
  EXPECT_EQ(csv(score_rsr(*manifest_, model, {}).table), csv(score_rsr(*manifest_, model, gw).table));
}

TEST_F(PipelineTest, EmptyManifestIsRejected) {
  DatasetManifest empty{"e", {}, {}};
  try {
    fit_rsr_manifest(empty, {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::empty_manifest);
  }
}
