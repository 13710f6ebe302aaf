#include <gtest/gtest.h>

#include "bitext/error.hpp"
#include "bitext/io.hpp"
#include "bitext/pipeline.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace bitext;

namespace {

std::map<std::string, std::string> snapshot(const std::filesystem::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    files[e.path().filename().string()] = read_file(e.path());
  }
  return files;
}

}  // namespace

TEST(RunAll, RejectedPairsAreSentinelInEveryColumn) {
  oracle::TempDir dir("pipeline_sentinel");
  const auto crafted = fixture::crafted_case(dir.path());
  const auto result = run_all(crafted.config);
  ASSERT_EQ(result.verdicts.size(), 50u);
  for (std::size_t i = 0; i < 50; ++i) EXPECT_EQ(!result.verdicts[i].pass, crafted.rejected[i]) << i;

  std::size_t files = 0;
  for (const auto& e : std::filesystem::directory_iterator(crafted.config.out_dir)) {
    const auto name = e.path().filename().string();
    if (name.rfind("scores", 0) != 0) continue;
    ++files;
    const auto lines = read_lines(e.path());
    ASSERT_EQ(lines.size(), 50u) << name;
    for (std::size_t i = 0; i < 50; ++i) {
      if (crafted.rejected[i]) {
        EXPECT_EQ(lines[i], "-1") << name << " row " << i;
      } else {
        EXPECT_NE(lines[i], "-1") << name << " row " << i;
      }
    }
  }
  EXPECT_EQ(files, 5u);
  for (auto i : result.selection.indices) EXPECT_FALSE(crafted.rejected[i]);
  EXPECT_EQ(result.final_column, "ensemble");
}

TEST(RunAll, ByteIdenticalAcrossThreadCounts) {
  oracle::TempDir dir("pipeline_threads");
  auto crafted = fixture::crafted_case(dir.path());
  crafted.config.out_dir = dir / "one";
  run_all(crafted.config);
  crafted.config.out_dir = dir / "four";
  crafted.config.threads = 4;
  run_all(crafted.config);
  EXPECT_EQ(snapshot(dir / "one"), snapshot(dir / "four"));
}

TEST(RunAll, ConfigurationErrors) {
  oracle::TempDir dir("pipeline_errors");
  const auto base = fixture::crafted_case(dir.path()).config;
  auto c = base;
  c.dim = 0;
  EXPECT_THROW(run_all(c), ConfigError);
  c = base;
  c.scorers = {"bleu"};
  EXPECT_THROW(run_all(c), ConfigError);
  c = base;
  c.clean_src.clear();
  c.clean_tgt.clear();
  EXPECT_THROW(run_all(c), ConfigError);
  c = base;
  c.final_score = "nope";
  EXPECT_THROW(run_all(c), ConfigError);
  c = base;
  c.iterations = 3;
  EXPECT_THROW(run_all(c), ConfigError);
  c = base;
  c.ensemble = false;
  c.scorers = {"margin_local"};
  c.lid_labels_src.clear();
  c.lid_labels_tgt.clear();
  c.clean_src.clear();
  c.clean_tgt.clear();
  EXPECT_THROW(run_all(c), ConfigError);
  c.lid = false;
  EXPECT_NO_THROW(run_all(c));
}

TEST(RunAll, DataErrors) {
  oracle::TempDir dir("pipeline_data");
  auto c = fixture::crafted_case(dir.path()).config;
  c.dim = 15;
  EXPECT_THROW(run_all(c), FormatError);
  c.dim = 16;
  write_file_atomic(dir / "short.tgt", "one line\n");
  c.tgt = dir / "short.tgt";
  EXPECT_THROW(run_all(c), AlignmentError);
}

TEST(RunAll, LocalMarginOnlyWithTrainedLid) {
  oracle::TempDir dir("pipeline_lid");
  auto c = fixture::crafted_case(dir.path()).config;
  c.ensemble = false;
  c.scorers = {"margin_local"};
  c.lid_labels_src.clear();
  c.lid_labels_tgt.clear();
  const auto result = run_all(c);
  // Copies carry source-script text on the target side, so the identifier
  // trained on the clean corpus catches them first; the wrong-language rows
  // of the label files have ordinary text and now pass.
  for (std::size_t i = 0; i < 50; ++i) {
    if (i % 5 <= 1) {
      EXPECT_EQ(result.verdicts[i].reason, FilterReason::bad_tgt_lang) << i;
    } else {
      EXPECT_TRUE(result.verdicts[i].pass) << i;
    }
  }
  EXPECT_EQ(result.final_column, "margin_local");
  EXPECT_TRUE(std::filesystem::exists(c.out_dir / "manifest.txt"));
}
