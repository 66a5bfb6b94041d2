/**
 * Copyright 2026 The Vigil Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <gtest/gtest.h>

#include <sstream>

#include "cli.hpp"
#include "support.hpp"
#include "vigil/model.hpp"
#include "vigil/textio.hpp"
#include "vigil/train.hpp"

using namespace vigil;
namespace fs = std::filesystem;
using vigil::testing::TempDir;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run vigil_cmd(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::dispatch(args, out, err);
  return {code, out.str(), err.str()};
}

std::size_t file_count(const fs::path &dir) {
  std::size_t n = 0;
  if (!fs::exists(dir)) return 0;
  for (const auto &e : fs::recursive_directory_iterator(dir))
    if (e.is_regular_file()) ++n;
  return n;
}

std::string small_gen(const fs::path &root, const std::string &seed = "4") {
  const auto r = vigil_cmd({"gen", "--scenes", "1", "--events", "6", "--out", root.string(), "--seed", seed});
  EXPECT_EQ(r.code, 0) << r.err;
  return (root / "manifest.tsv").string();
}

}  // namespace

TEST(Cli, GenDefaultsGiveSixHundredFrames) {
  TempDir dir;
  const auto r = vigil_cmd({"gen", "--out", dir.path().string(), "--seed", "1"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(file_count(dir / "frames"), 600u);
  EXPECT_EQ(load_manifest((dir / "manifest.tsv").string()).records.size(), 600u);
  EXPECT_TRUE(fs::exists(dir / "events.tsv"));
  EXPECT_NE(r.out.find("frames=600"), std::string::npos);
}

TEST(Cli, TrainWritesFortyCurveRows) {
  TempDir dir;
  small_gen(dir.path());
  const auto r = vigil_cmd({"train", "--out", dir.path().string(), "--seed", "4"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto curves = parse_curves(read_text_file((dir / "curves.csv").string()));
  ASSERT_EQ(curves.size(), 40u);
  EXPECT_EQ(curves.front().step, 50);
  EXPECT_EQ(curves.back().step, 2000);
  EXPECT_TRUE(fs::exists(dir / "weights.bin"));
  EXPECT_TRUE(fs::exists(dir / "checkpoint.bin"));

  const auto e = vigil_cmd({"eval", "--out", dir.path().string()});
  ASSERT_EQ(e.code, 0) << e.err;
  EXPECT_NE(e.out.find("accuracy="), std::string::npos);
  EXPECT_TRUE(fs::exists(dir / "report_test.csv"));
}

TEST(Cli, EvalOnEmptySplitIsDataError) {
  TempDir dir;
  const std::string manifest = small_gen(dir.path());
  std::string text = read_text_file(manifest);
  for (std::size_t p; (p = text.find("\ttest\n")) != std::string::npos;) text.replace(p, 6, "\tval\n");
  write_text_file(manifest, text);
  save_weights(make_tiny_v1(0), HeadParams::zeros(64), (dir / "weights.bin").string());
  const auto r = vigil_cmd({"eval", "--out", dir.path().string(), "--split", "test"});
  EXPECT_EQ(r.code, cli::kData);
  EXPECT_FALSE(r.err.empty());
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(vigil_cmd({"bogus"}).code, cli::kUsage);
  EXPECT_EQ(vigil_cmd({}).code, cli::kUsage);
  TempDir dir;
  const auto r = vigil_cmd({"gen", "--out", dir.path().string(), "--events", "abc"});
  EXPECT_EQ(r.code, cli::kUsage);
  EXPECT_EQ(vigil_cmd({"gen", "--out", dir.path().string(), "--ratios", "0.5,0.5"}).code, cli::kUsage);
  EXPECT_EQ(vigil_cmd({"train", "--out", dir.path().string(), "--steps", "0"}).code, cli::kUsage);
  EXPECT_EQ(file_count(dir.path()), 0u);
  EXPECT_EQ(vigil_cmd({"eval", "--manifest", (dir / "missing.tsv").string(), "--weights",
                       (dir / "missing.bin").string()})
                .code,
            cli::kData);
}

TEST(Cli, RefusesOverwriteWithoutForce) {
  TempDir dir;
  small_gen(dir.path());
  const auto before = read_text_file((dir / "manifest.tsv").string());
  EXPECT_EQ(vigil_cmd({"gen", "--scenes", "1", "--events", "4", "--out", dir.path().string()}).code,
            cli::kUsage);
  EXPECT_EQ(read_text_file((dir / "manifest.tsv").string()), before);
  EXPECT_EQ(vigil_cmd({"gen", "--scenes", "1", "--events", "4", "--out", dir.path().string(), "--force"}).code,
            cli::kOk);
}

TEST(Cli, RepeatedRunsAreByteIdentical) {
  TempDir a, b;
  for (const auto *dir : {&a, &b}) {
    small_gen(dir->path(), "9");
    ASSERT_EQ(vigil_cmd({"train", "--out", dir->path().string(), "--seed", "9", "--steps", "300"}).code, 0);
    ASSERT_EQ(vigil_cmd({"eval", "--out", dir->path().string()}).code, 0);
  }
  for (const char *f : {"manifest.tsv", "events.tsv", "curves.csv", "report_test.csv"})
    EXPECT_EQ(read_text_file((a / f).string()), read_text_file((b / f).string())) << f;
  EXPECT_EQ(read_binary_file((a / "weights.bin").string()), read_binary_file((b / "weights.bin").string()));
  EXPECT_EQ(read_binary_file((a / "frames" / "A-e000_000007.png").string()),
            read_binary_file((b / "frames" / "A-e000_000007.png").string()));
}

TEST(Cli, CompareWithPublishedRows) {
  TempDir dir;
  small_gen(dir.path());
  ASSERT_EQ(vigil_cmd({"train", "--out", dir.path().string(), "--steps", "100"}).code, 0);
  ASSERT_EQ(vigil_cmd({"eval", "--out", dir.path().string()}).code, 0);
  const auto r = vigil_cmd({"compare", "--run", "A=" + dir.path().string(), "--published"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("Validation Accuracy"), std::string::npos);
  EXPECT_NE(r.out.find("CAVIAR"), std::string::npos);
  EXPECT_EQ(vigil_cmd({"compare"}).code, cli::kUsage);
}
