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

#ifndef RLLF_PREFERENCE_H_
#define RLLF_PREFERENCE_H_

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "json.hpp"
#include "rllf/policy.h"
#include "rllf/taskgen.h"

namespace rllf {

struct LogicRewardConfig;

struct SegmentPair {
  std::string pair_id;
  Response sigma1;
  Response sigma2;
  std::string instance_ref;
};

// mu(1) + mu(2) = 1.
struct Mu {
  double first = 0.5;
  double second = 0.5;

  friend bool operator==(const Mu&, const Mu&) = default;
};

inline constexpr Mu kPreferFirst{1.0, 0.0};
inline constexpr Mu kPreferSecond{0.0, 1.0};
inline constexpr Mu kTie{0.5, 0.5};

enum class RecordSource { kHuman, kSimulated, kLogicTeacher };
const char* ToString(RecordSource s);
std::optional<RecordSource> ParseRecordSource(std::string_view text);

struct AnnotatorConfig {
  double bias = 0.0;   // beta
  double noise = 0.0;  // label-flip probability
  std::uint64_t seed = 0;
  // appeal = length_weight * (1 - len / max_steps) + entailed_weight * [entailed]
  double appeal_length_weight = 0.6;
  double appeal_entailed_weight = 0.4;

  void Validate() const;
};

struct PreferenceRecord {
  std::string pair_id;
  Mu mu;
  RecordSource source = RecordSource::kSimulated;
  std::optional<AnnotatorConfig> annotator;
  std::optional<std::string> timestamp;
};

using InstanceIndex = std::unordered_map<std::string, const TaskInstance*>;
InstanceIndex IndexInstances(const std::vector<TaskInstance>& instances);
// Throws MissingInstance naming `context` when the id is absent.
const TaskInstance& LookupInstance(const InstanceIndex& index,
                                   const std::string& id,
                                   const std::string& context);

// Unordered distinct pairs within each group, chosen uniformly without
// replacement over all groups. Returns every pair when n_pairs exceeds the
// number available. Ids are unique for a given seed and across seeds.
std::vector<SegmentPair> SamplePairs(
    const std::vector<std::vector<Response>>& groups, std::size_t n_pairs,
    std::uint64_t seed);

double Appeal(const Response& response, const AnnotatorConfig& config);

// (1 - beta) * quality + beta * appeal, with quality the logic reward.
double AnnotatorScore(const Response& response, const TaskInstance& instance,
                      const AnnotatorConfig& config,
                      const LogicRewardConfig& logic);

PreferenceRecord SimulateAnnotation(const SegmentPair& pair,
                                    const AnnotatorConfig& config,
                                    const TaskInstance& instance);
PreferenceRecord SimulateAnnotation(const SegmentPair& pair,
                                    const AnnotatorConfig& config,
                                    const TaskInstance& instance,
                                    const LogicRewardConfig& logic);

enum class Choice { kSigma1, kSigma2, kTie };
std::optional<Choice> ParseChoice(std::string_view text);
Mu MuFor(Choice choice);

// Pending-pair bookkeeping for human labels. Not thread-safe.
class LabelBook {
 public:
  // Returns false when the id is already present.
  bool AddPair(const std::string& pair_id);

  // Builds the human record without marking the pair. Throws UnknownPair or
  // DuplicateLabel.
  PreferenceRecord PrepareLabel(const std::string& pair_id, Choice choice,
                                std::optional<std::string> timestamp = {}) const;
  void MarkLabeled(const std::string& pair_id);

  // PrepareLabel followed by MarkLabeled.
  PreferenceRecord Ingest(const std::string& pair_id, Choice choice,
                          std::optional<std::string> timestamp = {});

  bool Contains(const std::string& pair_id) const;
  bool IsLabeled(const std::string& pair_id) const;
  // First unlabeled pair in insertion order.
  std::optional<std::string> NextPending() const;
  std::size_t total() const { return order_.size(); }
  std::size_t labeled() const { return labeled_count_; }

 private:
  std::vector<std::string> order_;
  std::map<std::string, bool> labeled_;
  std::size_t labeled_count_ = 0;
  std::size_t cursor_ = 0;  // every pair before it is labeled
};

PreferenceRecord HumanRecord(const std::string& pair_id, Choice choice,
                             std::optional<std::string> timestamp = {});

nlohmann::json ToJson(const PreferenceRecord& record);
PreferenceRecord RecordFromJson(const nlohmann::json& j);

// Append-only JSONL store. Returns the number of records written.
std::size_t AppendRecords(const std::string& path,
                          const std::vector<PreferenceRecord>& records);
std::vector<PreferenceRecord> LoadRecords(const std::string& path);

// Pair queue lines carry everything needed to show or re-score a pair:
// {pair_id, instance_id, program_text, query_text, sigma1, sigma2}.
nlohmann::json PairToJson(const SegmentPair& pair, const TaskInstance& instance);
SegmentPair PairFromJson(const nlohmann::json& j, const TaskInstance& instance,
                         int max_steps = kDefaultMaxSteps);

void WritePairs(const std::string& path, const std::vector<SegmentPair>& pairs,
                const InstanceIndex& instances);
std::vector<nlohmann::json> ReadJsonLines(const std::string& path);
std::vector<SegmentPair> ReadPairs(const std::string& path,
                                   const InstanceIndex& instances,
                                   int max_steps = kDefaultMaxSteps);

}  // namespace rllf

#endif  // RLLF_PREFERENCE_H_
