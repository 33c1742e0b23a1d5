// Copyright 2026 The RLLF Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cstdio>
#include <filesystem>
#include <set>
#include <string>

#include "gtest/gtest.h"
#include "rllf/errors.h"
#include "rllf/oracle.h"
#include "rllf/parser.h"
#include "rllf/random.h"
#include "rllf/taskgen.h"

namespace rllf {
namespace {

TEST(GenerateInstanceTest, DeterministicInSeed) {
  GenConfig config;
  const TaskInstance a = GenerateInstance(config, 42);
  const TaskInstance b = GenerateInstance(config, 42);
  EXPECT_EQ(ToJson(a).dump(), ToJson(b).dump());
  EXPECT_EQ(a.id, b.id);
  EXPECT_TRUE(SameClauses(a.program, b.program));
}

TEST(GenerateInstanceTest, DifferentSeedsDiffer) {
  GenConfig config;
  EXPECT_NE(ToJson(GenerateInstance(config, 1)).dump(),
            ToJson(GenerateInstance(config, 2)).dump());
}

TEST(GenerateInstanceTest, DepthZeroGivesFactsOnly) {
  GenConfig config;
  config.rule_depth = 0;
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const TaskInstance inst = GenerateInstance(config, seed);
    EXPECT_EQ(inst.program.rule_count(), 0u);
    bool listed = false;
    for (const Clause& c : inst.program.clauses) listed |= c.head == inst.query;
    EXPECT_EQ(inst.gold == VerdictValue::kEntailed, listed) << inst.id;
  }
}

TEST(GenerateInstanceTest, GoldMatchesOracle) {
  GenConfig config;
  config.n_predicates = 10;
  config.negation_rate = 0.5;
  for (std::uint64_t seed = 100; seed < 200; ++seed) {
    const TaskInstance inst = GenerateInstance(config, seed);
    ASSERT_TRUE(inst.program.IsGround());
    ASSERT_TRUE(IsStratified(inst.program));
    EXPECT_EQ(BruteForceEntailment(inst.program, inst.query), inst.gold);
    EXPECT_TRUE(ValidateInstance(inst).ok) << ValidateInstance(inst).diagnostic;
  }
}

TEST(GenerateInstanceTest, ProgramTextReparses) {
  const TaskInstance inst = GenerateInstance(GenConfig{}, 5);
  const Program again = ParseProgram(inst.program.source_text);
  EXPECT_TRUE(SameClauses(again, inst.program));
  EXPECT_EQ(ParseQuery(inst.query_text()), inst.query);
}

TEST(GenerateInstanceTest, RejectsBadConfig) {
  GenConfig config;
  config.negation_rate = 1.5;
  EXPECT_THROW(GenerateInstance(config, 1), InvalidConfig);
  config = GenConfig{};
  config.n_constants = 0;
  EXPECT_THROW(GenerateInstance(config, 1), InvalidConfig);
}

TEST(GenerateDatasetTest, BalanceWithinTolerance) {
  GenConfig config;
  config.balance = 0.5;
  const auto data = GenerateDataset(config, 100, 7);
  ASSERT_EQ(data.size(), 100u);
  int entailed = 0;
  std::set<std::string> ids;
  for (const TaskInstance& inst : data) {
    entailed += inst.gold == VerdictValue::kEntailed;
    ids.insert(inst.id);
  }
  EXPECT_GE(entailed, 40);
  EXPECT_LE(entailed, 60);
  EXPECT_EQ(ids.size(), 100u);
}

TEST(GenerateDatasetTest, SingletonMatchesSubSeed) {
  GenConfig config;
  const auto data = GenerateDataset(config, 1, 99);
  ASSERT_EQ(data.size(), 1u);
  EXPECT_EQ(ToJson(data[0]).dump(),
            ToJson(GenerateInstance(config, SubSeed(99, 0))).dump());
}

TEST(GenerateDatasetTest, Deterministic) {
  GenConfig config;
  const auto a = GenerateDataset(config, 20, 11);
  const auto b = GenerateDataset(config, 20, 11);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(ToJson(a[i]).dump(), ToJson(b[i]).dump());
  }
}

TEST(ValidateInstanceTest, FlippedGoldFails) {
  TaskInstance inst = GenerateInstance(GenConfig{}, 8);
  inst.gold = inst.gold == VerdictValue::kEntailed ? VerdictValue::kNotEntailed
                                                   : VerdictValue::kEntailed;
  const InstanceCheck check = ValidateInstance(inst);
  EXPECT_FALSE(check.ok);
  EXPECT_NE(check.diagnostic.find("oracle"), std::string::npos);
}

TEST(ValidateInstanceTest, CorruptedTextReportsSyntaxError) {
  TaskInstance inst = GenerateInstance(GenConfig{}, 8);
  inst.program.source_text = "p(a";
  const InstanceCheck check = ValidateInstance(inst);
  EXPECT_FALSE(check.ok);
  EXPECT_NE(check.diagnostic.find("unclosed parenthesis"), std::string::npos)
      << check.diagnostic;
  EXPECT_NE(check.diagnostic.find("line 1"), std::string::npos);
}

TEST(ValidateInstanceTest, NonGroundFails) {
  TaskInstance inst = GenerateInstance(GenConfig{}, 8);
  inst.program.source_text = "p(X) :- q(X).\nq(a).\n";
  EXPECT_FALSE(ValidateInstance(inst).ok);
}

TEST(DatasetIoTest, RoundTrip) {
  const auto data = GenerateDataset(GenConfig{}, 5, 3);
  const std::string path =
      (std::filesystem::temp_directory_path() / "rllf_taskgen_test.jsonl").string();
  WriteDataset(path, data);
  const auto back = ReadDataset(path);
  std::remove(path.c_str());
  ASSERT_EQ(back.size(), data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    EXPECT_EQ(ToJson(back[i]).dump(), ToJson(data[i]).dump());
  }
}

TEST(DatasetIoTest, MissingFileThrows) {
  EXPECT_THROW(ReadDataset("/nonexistent/rllf.jsonl"), IoError);
}

}  // namespace
}  // namespace rllf
