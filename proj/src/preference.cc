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

#include "rllf/preference.h"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <span>
#include <tuple>

#include "rllf/errors.h"
#include "rllf/logical_feedback.h"
#include "rllf/random.h"
#include "rllf/transcript.h"

namespace rllf {

const char* ToString(RecordSource s) {
  switch (s) {
    case RecordSource::kHuman:
      return "human";
    case RecordSource::kSimulated:
      return "simulated";
    case RecordSource::kLogicTeacher:
      return "logic_teacher";
  }
  return "?";
}

std::optional<RecordSource> ParseRecordSource(std::string_view text) {
  if (text == "human") return RecordSource::kHuman;
  if (text == "simulated") return RecordSource::kSimulated;
  if (text == "logic_teacher") return RecordSource::kLogicTeacher;
  return std::nullopt;
}

void AnnotatorConfig::Validate() const {
  if (!(bias >= 0.0 && bias <= 1.0)) throw InvalidConfig("bias must be in [0, 1]");
  if (!(noise >= 0.0 && noise <= 0.5)) {
    throw InvalidConfig("noise must be in [0, 0.5]");
  }
}

InstanceIndex IndexInstances(const std::vector<TaskInstance>& instances) {
  InstanceIndex index;
  for (const TaskInstance& inst : instances) index.emplace(inst.id, &inst);
  return index;
}

const TaskInstance& LookupInstance(const InstanceIndex& index,
                                   const std::string& id,
                                   const std::string& context) {
  const auto it = index.find(id);
  if (it == index.end()) {
    throw MissingInstance(context + ": instance '" + id + "' not found");
  }
  return *it->second;
}

std::vector<SegmentPair> SamplePairs(
    const std::vector<std::vector<Response>>& groups, std::size_t n_pairs,
    std::uint64_t seed) {
  std::vector<std::tuple<std::size_t, std::size_t, std::size_t>> all;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    if (groups[g].size() < 2) {
      throw InsufficientResponses(
          "group " + std::to_string(g) + " has " +
          std::to_string(groups[g].size()) + " response(s), need 2");
    }
    for (std::size_t i = 0; i < groups[g].size(); ++i) {
      for (std::size_t j = i + 1; j < groups[g].size(); ++j) all.emplace_back(g, i, j);
    }
  }
  Rng rng(seed);
  rng.Shuffle(std::span(all));
  if (all.size() > n_pairs) all.resize(n_pairs);

  char tag[24];
  std::snprintf(tag, sizeof(tag), "%016llx", static_cast<unsigned long long>(seed));
  std::vector<SegmentPair> out;
  out.reserve(all.size());
  for (const auto& [g, i, j] : all) {
    const Response& a = groups[g][i];
    const Response& b = groups[g][j];
    SegmentPair p;
    p.instance_ref = a.instance_ref;
    p.pair_id = std::string(tag) + ":" + a.instance_ref + ":" + std::to_string(g) +
                ":" + std::to_string(i) + "-" + std::to_string(j);
    p.sigma1 = a;
    p.sigma2 = b;
    out.push_back(std::move(p));
  }
  return out;
}

double Appeal(const Response& response, const AnnotatorConfig& config) {
  const double len = static_cast<double>(response.length());
  const double brevity = 1.0 - len / static_cast<double>(response.max_steps);
  return config.appeal_length_weight * brevity +
         config.appeal_entailed_weight *
             (response.answer() == VerdictValue::kEntailed ? 1.0 : 0.0);
}

double AnnotatorScore(const Response& response, const TaskInstance& instance,
                      const AnnotatorConfig& config,
                      const LogicRewardConfig& logic) {
  const double quality = ScoreResponse(response, instance, logic).reward;
  return (1.0 - config.bias) * quality + config.bias * Appeal(response, config);
}

PreferenceRecord SimulateAnnotation(const SegmentPair& pair,
                                    const AnnotatorConfig& config,
                                    const TaskInstance& instance) {
  return SimulateAnnotation(pair, config, instance, LogicRewardConfig{});
}

PreferenceRecord SimulateAnnotation(const SegmentPair& pair,
                                    const AnnotatorConfig& config,
                                    const TaskInstance& instance,
                                    const LogicRewardConfig& logic) {
  const double s1 = AnnotatorScore(pair.sigma1, instance, config, logic);
  const double s2 = AnnotatorScore(pair.sigma2, instance, config, logic);
  Mu mu = s1 > s2 ? kPreferFirst : s2 > s1 ? kPreferSecond : kTie;
  if (config.noise > 0.0) {
    Rng rng(Mix64(config.seed ^ HashString(pair.pair_id)));
    if (rng.Bernoulli(config.noise)) std::swap(mu.first, mu.second);
  }
  return PreferenceRecord{pair.pair_id, mu, RecordSource::kSimulated, config,
                          std::nullopt};
}

std::optional<Choice> ParseChoice(std::string_view text) {
  if (text == "sigma1") return Choice::kSigma1;
  if (text == "sigma2") return Choice::kSigma2;
  if (text == "tie") return Choice::kTie;
  return std::nullopt;
}

Mu MuFor(Choice choice) {
  switch (choice) {
    case Choice::kSigma1:
      return kPreferFirst;
    case Choice::kSigma2:
      return kPreferSecond;
    case Choice::kTie:
      return kTie;
  }
  return kTie;
}

PreferenceRecord HumanRecord(const std::string& pair_id, Choice choice,
                             std::optional<std::string> timestamp) {
  return PreferenceRecord{pair_id, MuFor(choice), RecordSource::kHuman,
                          std::nullopt, std::move(timestamp)};
}

bool LabelBook::AddPair(const std::string& pair_id) {
  if (!labeled_.emplace(pair_id, false).second) return false;
  order_.push_back(pair_id);
  return true;
}

PreferenceRecord LabelBook::PrepareLabel(const std::string& pair_id,
                                         Choice choice,
                                         std::optional<std::string> timestamp) const {
  const auto it = labeled_.find(pair_id);
  if (it == labeled_.end()) throw UnknownPair("unknown pair '" + pair_id + "'");
  if (it->second) throw DuplicateLabel("pair '" + pair_id + "' is already labeled");
  return HumanRecord(pair_id, choice, std::move(timestamp));
}

void LabelBook::MarkLabeled(const std::string& pair_id) {
  auto it = labeled_.find(pair_id);
  if (it == labeled_.end()) throw UnknownPair("unknown pair '" + pair_id + "'");
  if (it->second) throw DuplicateLabel("pair '" + pair_id + "' is already labeled");
  it->second = true;
  ++labeled_count_;
  while (cursor_ < order_.size() && labeled_.at(order_[cursor_])) ++cursor_;
}

PreferenceRecord LabelBook::Ingest(const std::string& pair_id, Choice choice,
                                   std::optional<std::string> timestamp) {
  PreferenceRecord r = PrepareLabel(pair_id, choice, std::move(timestamp));
  MarkLabeled(pair_id);
  return r;
}

bool LabelBook::Contains(const std::string& pair_id) const {
  return labeled_.count(pair_id) > 0;
}

bool LabelBook::IsLabeled(const std::string& pair_id) const {
  const auto it = labeled_.find(pair_id);
  return it != labeled_.end() && it->second;
}

std::optional<std::string> LabelBook::NextPending() const {
  if (cursor_ >= order_.size()) return std::nullopt;
  return order_[cursor_];
}

nlohmann::json ToJson(const PreferenceRecord& record) {
  nlohmann::json j{{"pair_id", record.pair_id},
                   {"mu", {record.mu.first, record.mu.second}},
                   {"source", ToString(record.source)}};
  if (record.annotator) {
    const AnnotatorConfig& a = *record.annotator;
    j["annotator_config"] = {{"bias", a.bias},
                             {"noise", a.noise},
                             {"seed", a.seed},
                             {"appeal_length_weight", a.appeal_length_weight},
                             {"appeal_entailed_weight", a.appeal_entailed_weight}};
  }
  if (record.timestamp) j["timestamp"] = *record.timestamp;
  return j;
}

PreferenceRecord RecordFromJson(const nlohmann::json& j) {
  PreferenceRecord r;
  r.pair_id = j.at("pair_id").get<std::string>();
  const auto& mu = j.at("mu");
  if (!mu.is_array() || mu.size() != 2) throw Error("mu must be a pair");
  r.mu = Mu{mu[0].get<double>(), mu[1].get<double>()};
  if (r.mu.first < 0 || r.mu.second < 0 ||
      std::abs(r.mu.first + r.mu.second - 1.0) > 1e-9) {
    throw Error("record " + r.pair_id + ": mu must be non-negative and sum to 1");
  }
  const auto source = ParseRecordSource(j.at("source").get<std::string>());
  if (!source) throw Error("record " + r.pair_id + ": unknown source");
  r.source = *source;
  if (j.contains("annotator_config")) {
    const auto& a = j.at("annotator_config");
    AnnotatorConfig c;
    c.bias = a.value("bias", 0.0);
    c.noise = a.value("noise", 0.0);
    c.seed = a.value("seed", std::uint64_t{0});
    c.appeal_length_weight = a.value("appeal_length_weight", c.appeal_length_weight);
    c.appeal_entailed_weight = a.value("appeal_entailed_weight", c.appeal_entailed_weight);
    r.annotator = c;
  }
  if (j.contains("timestamp")) r.timestamp = j.at("timestamp").get<std::string>();
  return r;
}

std::size_t AppendRecords(const std::string& path,
                          const std::vector<PreferenceRecord>& records) {
  std::ofstream out(path, std::ios::binary | std::ios::app);
  if (!out) throw IoError("cannot open " + path + " for appending");
  for (const PreferenceRecord& r : records) out << ToJson(r).dump() << "\n";
  out.flush();
  if (!out) throw IoError("write failed: " + path);
  return records.size();
}

std::vector<nlohmann::json> ReadJsonLines(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::vector<nlohmann::json> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      out.push_back(nlohmann::json::parse(line));
    } catch (const nlohmann::json::exception& e) {
      throw Error(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

std::vector<PreferenceRecord> LoadRecords(const std::string& path) {
  std::vector<PreferenceRecord> out;
  for (const auto& j : ReadJsonLines(path)) out.push_back(RecordFromJson(j));
  return out;
}

nlohmann::json PairToJson(const SegmentPair& pair, const TaskInstance& instance) {
  return nlohmann::json{{"pair_id", pair.pair_id},
                        {"instance_id", instance.id},
                        {"program_text", instance.program.source_text},
                        {"query_text", instance.query_text()},
                        {"sigma1", TranscriptToJson(pair.sigma1, instance)},
                        {"sigma2", TranscriptToJson(pair.sigma2, instance)}};
}

SegmentPair PairFromJson(const nlohmann::json& j, const TaskInstance& instance,
                         int max_steps) {
  SegmentPair p;
  p.pair_id = j.at("pair_id").get<std::string>();
  p.instance_ref = j.at("instance_id").get<std::string>();
  p.sigma1 = ResponseFromTranscript(j.at("sigma1"), instance, max_steps);
  p.sigma2 = ResponseFromTranscript(j.at("sigma2"), instance, max_steps);
  return p;
}

void WritePairs(const std::string& path, const std::vector<SegmentPair>& pairs,
                const InstanceIndex& instances) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path + " for writing");
  for (const SegmentPair& p : pairs) {
    out << PairToJson(p, LookupInstance(instances, p.instance_ref, p.pair_id)).dump()
        << "\n";
  }
  if (!out) throw IoError("write failed: " + path);
}

std::vector<SegmentPair> ReadPairs(const std::string& path,
                                   const InstanceIndex& instances,
                                   int max_steps) {
  std::vector<SegmentPair> out;
  for (const auto& j : ReadJsonLines(path)) {
    const std::string id = j.at("pair_id").get<std::string>();
    const TaskInstance& inst =
        LookupInstance(instances, j.at("instance_id").get<std::string>(), id);
    out.push_back(PairFromJson(j, inst, max_steps));
  }
  return out;
}

}  // namespace rllf
