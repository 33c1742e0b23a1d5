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

#include "rllf/cli.h"

#include <openssl/evp.h>

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "rllf/annotation_service.h"
#include "rllf/errors.h"
#include "rllf/experiment.h"
#include "rllf/logical_feedback.h"
#include "rllf/parser.h"
#include "rllf/preference.h"
#include "rllf/random.h"
#include "rllf/reward_model.h"
#include "rllf/rllf_trainer.h"
#include "rllf/taskgen.h"
#include "rllf/transcript.h"

namespace rllf {
namespace {

using nlohmann::json;

// Bad flag combinations that CLI11 cannot express.
class UsageError : public Error {
 public:
  using Error::Error;
};

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void WriteFile(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path);
  out << content;
  if (!out) throw IoError("write failed: " + path);
}

std::string UtcNow() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string FormatDouble(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// Flags every subcommand takes.
struct CommonFlags {
  std::uint64_t seed = 0;
  std::string config_path;
  std::vector<std::string> overrides;
  std::string out;
};

void AddCommon(CLI::App* cmd, CommonFlags& f, bool out_required) {
  cmd->add_option("--seed", f.seed, "Master seed");
  cmd->add_option("--config", f.config_path, "key = value settings file")
      ->check(CLI::ExistingFile);
  cmd->add_option("--set", f.overrides, "key=value, overrides the config file");
  auto* out = cmd->add_option("--out", f.out, "Output path");
  if (out_required) out->required();
}

// Collects what the manifest needs while a command runs.
class Run {
 public:
  Run(std::string command, const CommonFlags& flags)
      : command_(std::move(command)), flags_(flags), started_(UtcNow()) {}

  // Config file, then --set overrides. Records the config file as an input.
  ExperimentConfig LoadConfig() {
    if (!flags_.config_path.empty()) {
      settings_ = ParseSettings(ReadInput(flags_.config_path));
    }
    for (const std::string& kv : flags_.overrides) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos || eq == 0) {
        throw InvalidConfig("--set expects key=value, got '" + kv + "'");
      }
      settings_[kv.substr(0, eq)] = kv.substr(eq + 1);
    }
    ExperimentConfig c;
    ApplySettings(c, settings_);
    c.Validate();
    config_ = ToJson(c);
    return c;
  }

  bool HasSetting(const std::string& key) const { return settings_.count(key) > 0; }

  // Reads the whole file and records its digest.
  std::string ReadInput(const std::string& path) {
    std::string bytes = ReadFile(path);
    inputs_.push_back({path, Sha256Hex(bytes)});
    return bytes;
  }

  // For inputs parsed by library readers.
  void NoteInput(const std::string& path) { inputs_.push_back({path, Sha256File(path)}); }

  void NoteOutput(const std::string& path) { outputs_.push_back(path); }

  void SetConfig(json extra) { config_.update(extra); }

  void WriteManifest() const {
    if (flags_.out.empty()) return;
    json inputs = json::array();
    for (const auto& [path, digest] : inputs_) {
      inputs.push_back({{"path", path}, {"sha256", digest}});
    }
    json outputs = json::array();
    for (const std::string& p : outputs_) {
      outputs.push_back({{"path", p}, {"sha256", Sha256File(p)}});
    }
    const json m = {{"tool", kToolName},
                    {"version", kToolVersion},
                    {"command", command_},
                    {"master_seed", flags_.seed},
                    {"config", config_},
                    {"config_digest", Sha256Hex(config_.dump())},
                    {"inputs", inputs},
                    {"outputs", outputs},
                    {"started_at", started_},
                    {"finished_at", UtcNow()}};
    WriteFile(ManifestPath(flags_.out), m.dump(2) + "\n");
  }

 private:
  std::string command_;
  const CommonFlags& flags_;
  std::string started_;
  std::map<std::string, std::string> settings_;
  json config_ = json::object();
  std::vector<std::pair<std::string, std::string>> inputs_;
  std::vector<std::string> outputs_;
};

std::vector<TaskInstance> ReadDatasetInput(Run& run, const std::string& path) {
  run.NoteInput(path);
  return ReadDataset(path);
}

// --- subcommands ---------------------------------------------------------

struct GenDataFlags {
  CommonFlags common;
  std::optional<std::size_t> n;
  bool balanced = false;
};

int GenData(const GenDataFlags& f, std::ostream& out) {
  Run run("gen-data", f.common);
  const ExperimentConfig c = run.LoadConfig();
  const std::size_t n = f.n.value_or(c.n_train);
  const auto data = f.balanced ? GenerateBalancedDataset(c.gen, n, f.common.seed)
                               : GenerateDataset(c.gen, n, f.common.seed);
  WriteDataset(f.common.out, data);
  run.SetConfig({{"n", n}, {"balanced", f.balanced}});
  run.NoteOutput(f.common.out);
  run.WriteManifest();
  std::size_t entailed = 0;
  for (const auto& inst : data) entailed += inst.gold == VerdictValue::kEntailed;
  out << "wrote " << data.size() << " instances (" << entailed << " entailed) to "
      << f.common.out << "\n";
  return kExitOk;
}

struct GenPairsFlags {
  CommonFlags common;
  std::string data;
  std::string policy;
  std::optional<std::size_t> n;
  std::string label = "none";
  std::string records;
};

int GenPairs(const GenPairsFlags& f, std::ostream& out) {
  Run run("gen-pairs", f.common);
  const ExperimentConfig c = run.LoadConfig();
  if (f.label != "none" && f.records.empty()) {
    throw UsageError("--records is required with --label " + f.label);
  }
  const auto data = ReadDatasetInput(run, f.data);
  const InstanceIndex index = IndexInstances(data);
  PolicyParams policy;
  if (!f.policy.empty()) policy = PolicyFromJson(json::parse(run.ReadInput(f.policy)));

  const int k = c.train.responses_per_instance;
  const std::uint64_t rollout_seed = SubSeed(f.common.seed, 0);
  std::vector<std::vector<Response>> groups;
  for (std::size_t i = 0; i < data.size(); ++i) {
    std::vector<Response> g;
    for (int r = 0; r < k; ++r) {
      g.push_back(SampleResponse(policy, data[i], SubSeed(rollout_seed, i * k + r),
                                 c.train.max_steps));
    }
    groups.push_back(std::move(g));
  }
  const std::size_t n = f.n.value_or(c.n_pairs);
  const auto pairs = SamplePairs(groups, n, SubSeed(f.common.seed, 1));
  WritePairs(f.common.out, pairs, index);
  run.NoteOutput(f.common.out);

  if (f.label != "none") {
    std::vector<PreferenceRecord> records;
    if (f.label == "logic") {
      records = GenerateLogicPreferenceDataset(pairs, index, c.train.logic);
    } else {
      AnnotatorConfig a = c.annotator;
      a.seed = f.common.seed;
      for (const SegmentPair& p : pairs) {
        records.push_back(SimulateAnnotation(
            p, a, LookupInstance(index, p.instance_ref, p.pair_id), c.train.logic));
      }
    }
    std::filesystem::remove(f.records);  // a fresh file, not an append
    AppendRecords(f.records, records);
    run.NoteOutput(f.records);
  }
  run.SetConfig({{"n", n}, {"label", f.label}});
  run.WriteManifest();
  out << "wrote " << pairs.size() << " pairs to " << f.common.out << "\n";
  return kExitOk;
}

struct TrainRewardFlags {
  CommonFlags common;
  std::string data;
  std::string pairs;
  std::string records;
};

int TrainReward(const TrainRewardFlags& f, std::ostream& out) {
  Run run("train-reward", f.common);
  const ExperimentConfig c = run.LoadConfig();
  const auto data = ReadDatasetInput(run, f.data);
  const InstanceIndex index = IndexInstances(data);
  run.NoteInput(f.pairs);
  const auto pairs = ReadPairs(f.pairs, index, c.train.max_steps);
  run.NoteInput(f.records);
  const auto records = LoadRecords(f.records);
  const auto examples = MakeExamples(pairs, records, index);
  TrainHyper h = c.train.reward_hyper;
  h.seed = f.common.seed;
  const RewardTrainResult r = TrainRewardModel(examples, h);
  WriteFile(f.common.out, CheckpointToJson(r.params, h, r.loss_trace).dump(2) + "\n");
  run.NoteOutput(f.common.out);
  run.WriteManifest();
  out << "trained on " << examples.size() << " records; final loss "
      << FormatDouble(r.loss_trace.back());
  try {
    out << "; pairwise accuracy " << FormatDouble(PairwiseAccuracy(r.params, examples));
  } catch (const EmptyDataset&) {
    // only ties
  }
  out << "\n";
  return kExitOk;
}

struct TrainPolicyFlags {
  CommonFlags common;
  std::string mode;
  std::optional<double> lambda;
  std::string blend_mode;
  std::string data;
  std::string eval;
  std::string series;
};

int TrainPolicyCmd(const TrainPolicyFlags& f, std::ostream& out) {
  Run run("train-policy", f.common);
  ExperimentConfig c = run.LoadConfig();
  std::optional<BlendConfig> blend;
  if (f.mode == "rllf") {
    if (!f.lambda && !run.HasSetting("lambda")) {
      throw UsageError("--lambda is required with --mode rllf");
    }
    blend = c.blend;
    if (f.lambda) blend->lambda = *f.lambda;
    if (!f.blend_mode.empty()) blend->mode = *ParseBlendMode(f.blend_mode);
    blend->Validate();
  } else if (f.lambda || !f.blend_mode.empty()) {
    throw UsageError("--lambda and --blend-mode apply only to --mode rllf");
  }
  const auto train = ReadDatasetInput(run, f.data);
  const auto eval = ReadDatasetInput(run, f.eval);
  TrainConfig t = c.train;
  t.seed = f.common.seed;
  AnnotatorConfig a = c.annotator;
  a.seed = f.common.seed;
  const TrainReport report = TrainPolicy(train, eval, t, blend, a);
  WriteFile(f.common.out, ToJson(report).dump(2) + "\n");
  run.NoteOutput(f.common.out);
  if (!f.series.empty()) {
    WriteFile(f.series, SeriesCsv(report));
    run.NoteOutput(f.series);
  }
  json extra = {{"mode", f.mode}};
  if (blend) extra["blend"] = {{"lambda", blend->lambda}, {"mode", ToString(blend->mode)}};
  run.SetConfig(extra);
  run.WriteManifest();
  out << f.mode << " logical_accuracy " << FormatDouble(report.final_eval.logical_accuracy)
      << " mean_logic_reward " << FormatDouble(report.final_eval.mean_logic_reward) << "\n";
  return kExitOk;
}

struct EvaluateFlags {
  CommonFlags common;
  std::string policy;
  std::string data;
};

int Evaluate(const EvaluateFlags& f, std::ostream& out) {
  Run run("evaluate", f.common);
  const ExperimentConfig c = run.LoadConfig();
  const PolicyParams p = PolicyFromJson(json::parse(run.ReadInput(f.policy)));
  const auto eval = ReadDatasetInput(run, f.data);
  AnnotatorConfig a = c.annotator;
  a.seed = f.common.seed;
  const Metrics m = EvaluatePolicy(p, eval, a, c.train.logic, c.train.max_steps);
  const std::string csv = "metric,value\nlogical_accuracy," + FormatDouble(m.logical_accuracy) +
                          "\nmean_logic_reward," + FormatDouble(m.mean_logic_reward) +
                          "\nsimulated_satisfaction," +
                          FormatDouble(m.simulated_satisfaction) + "\n";
  WriteFile(f.common.out, csv);
  run.NoteOutput(f.common.out);
  run.WriteManifest();
  out << csv;
  return kExitOk;
}

int Compare(const CommonFlags& f, std::ostream& out) {
  Run run("compare", f);
  const ExperimentConfig c = run.LoadConfig();
  const std::string csv = ComparisonCsv(RunComparison(c, f.seed));
  WriteFile(f.out, csv);
  run.NoteOutput(f.out);
  run.WriteManifest();
  out << csv;
  return kExitOk;
}

struct VerifyFlags {
  CommonFlags common;
  std::string program;
  std::string transcripts;
  std::string query;
};

json ReportJson(const ChainReport& r) {
  json j = {{"valid_steps", r.valid_steps},
            {"total_steps", r.total_steps},
            {"answer_consistent", r.answer_consistent},
            {"floundering_warning", r.floundering_warning},
            {"first_invalid_index", nullptr}};
  if (r.first_invalid_index) j["first_invalid_index"] = *r.first_invalid_index;
  return j;
}

int Verify(const VerifyFlags& f, std::ostream& out, std::ostream& err) {
  Run run("verify", f.common);
  const ExperimentConfig c = run.LoadConfig();
  const Program program = ParseProgram(run.ReadInput(f.program));
  std::optional<Term> fixed_query;
  if (!f.query.empty()) fixed_query = ParseQuery(f.query);
  const std::string text = run.ReadInput(f.transcripts);

  std::string lines_out;
  std::size_t n = 0, failed = 0, all_valid = 0;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    ++n;
    json result = {{"line", line_no}};
    try {
      json j;
      try {
        j = json::parse(line);
      } catch (const json::parse_error& e) {
        throw SyntaxError(1, static_cast<int>(e.byte), "malformed transcript line");
      }
      const TranscriptChain tc = ChainFromTranscript(j, program);
      const std::optional<Term> query = fixed_query ? fixed_query : tc.query;
      if (!query) throw Error("no query: pass --query or include one in the transcript");
      const ChainReport report = VerifyChain(program, *query, tc.chain);
      result["instance_id"] = tc.instance_id;
      result["parse_ok"] = true;
      result["report"] = ReportJson(report);
      result["logic_reward"] = LogicReward(report, true, c.train.logic);
      all_valid += report.fully_valid() && report.answer_consistent;
    } catch (const SyntaxError& e) {
      ++failed;
      result["parse_ok"] = false;
      result["logic_reward"] = c.train.logic.parse_failure_reward;
      result["error"] = {{"type", "SyntaxError"},
                         {"line", e.line()},
                         {"column", e.column()},
                         {"detail", e.detail()}};
      err << f.transcripts << ":" << line_no << ": SyntaxError at line " << e.line()
          << ", column " << e.column() << ": " << e.detail() << "\n";
    } catch (const Error& e) {
      ++failed;
      result["parse_ok"] = false;
      result["logic_reward"] = c.train.logic.parse_failure_reward;
      result["error"] = {{"type", "Error"}, {"detail", e.what()}};
      err << f.transcripts << ":" << line_no << ": " << e.what() << "\n";
    }
    lines_out += result.dump() + "\n";
  }
  if (f.common.out.empty()) {
    out << lines_out;
  } else {
    WriteFile(f.common.out, lines_out);
    run.NoteOutput(f.common.out);
    run.WriteManifest();
  }
  out << n << " transcripts, " << all_valid << " fully valid, " << failed
      << " unreadable\n";
  return kExitOk;
}

struct ServeFlags {
  CommonFlags common;
  std::string pairs;
  std::string store;
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string static_dir;
};

int Serve(const ServeFlags& f, std::ostream& out) {
  AnnotationService service =
      AnnotationService::FromFiles(f.pairs, f.store, f.common.seed);
  const LabelProgress p = service.Progress();
  out << "serving " << p.labeled + p.pending << " pairs (" << p.pending
      << " pending) on http://" << f.host << ":" << f.port << "\n";
  out.flush();
  if (!ServeAnnotations(service, f.host, f.port, f.static_dir)) {
    throw IoError("cannot listen on " + f.host + ":" + std::to_string(f.port));
  }
  return kExitOk;
}

}  // namespace

std::string Sha256Hex(std::string_view bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    throw Error("sha256 failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out += kHex[md[i] >> 4];
    out += kHex[md[i] & 0xf];
  }
  return out;
}

std::string Sha256File(const std::string& path) { return Sha256Hex(ReadFile(path)); }

std::string ManifestPath(const std::string& output_path) {
  return output_path + ".manifest.json";
}

int RunCli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Reasoning-policy experiments with logic-checked feedback", kToolName};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  GenDataFlags gen_data;
  auto* cmd_gen = app.add_subcommand("gen-data", "Generate a task dataset (JSONL)");
  AddCommon(cmd_gen, gen_data.common, true);
  cmd_gen->add_option("--n", gen_data.n, "Number of instances (default: n_train)");
  cmd_gen->add_flag("--balanced", gen_data.balanced, "Exactly half entailed");

  GenPairsFlags gen_pairs;
  auto* cmd_pairs =
      app.add_subcommand("gen-pairs", "Sample responses and write a pair queue");
  AddCommon(cmd_pairs, gen_pairs.common, true);
  cmd_pairs->add_option("--data", gen_pairs.data, "Dataset JSONL")->required();
  cmd_pairs->add_option("--policy", gen_pairs.policy, "Policy or train report JSON");
  cmd_pairs->add_option("--n", gen_pairs.n, "Number of pairs (default: n_pairs)");
  cmd_pairs->add_option("--label", gen_pairs.label, "Also label the pairs")
      ->check(CLI::IsMember({"none", "simulated", "logic"}));
  cmd_pairs->add_option("--records", gen_pairs.records, "Preference records output");

  TrainRewardFlags train_reward;
  auto* cmd_reward = app.add_subcommand("train-reward", "Fit the reward predictor");
  AddCommon(cmd_reward, train_reward.common, true);
  cmd_reward->add_option("--data", train_reward.data, "Dataset JSONL")->required();
  cmd_reward->add_option("--pairs", train_reward.pairs, "Pair queue JSONL")->required();
  cmd_reward->add_option("--records", train_reward.records, "Preference store JSONL")
      ->required();

  TrainPolicyFlags train_policy;
  auto* cmd_policy = app.add_subcommand("train-policy", "Run RLHF or RLLF training");
  AddCommon(cmd_policy, train_policy.common, true);
  cmd_policy->add_option("--mode", train_policy.mode, "rlhf or rllf")
      ->required()
      ->check(CLI::IsMember({"rlhf", "rllf"}));
  cmd_policy->add_option("--lambda", train_policy.lambda, "Logic share in [0, 1]");
  cmd_policy->add_option("--blend-mode", train_policy.blend_mode, "How lambda is applied")
      ->check(CLI::IsMember({"dataset_mix", "reward_blend"}));
  cmd_policy->add_option("--data", train_policy.data, "Training set JSONL")->required();
  cmd_policy->add_option("--eval", train_policy.eval, "Eval set JSONL")->required();
  cmd_policy->add_option("--series", train_policy.series, "Metric series CSV output");

  EvaluateFlags evaluate;
  auto* cmd_eval = app.add_subcommand("evaluate", "Greedy evaluation of a policy");
  AddCommon(cmd_eval, evaluate.common, true);
  cmd_eval->add_option("--policy", evaluate.policy, "Policy or train report JSON")
      ->required();
  cmd_eval->add_option("--data", evaluate.data, "Eval set JSONL")->required();

  CommonFlags compare;
  auto* cmd_compare =
      app.add_subcommand("compare", "RLHF against an RLLF lambda sweep over shared seeds");
  AddCommon(cmd_compare, compare, true);

  VerifyFlags verify;
  auto* cmd_verify = app.add_subcommand("verify", "Check transcripts against a program");
  AddCommon(cmd_verify, verify.common, false);
  cmd_verify->add_option("--program", verify.program, "Program text")->required();
  cmd_verify->add_option("--transcripts", verify.transcripts, "Transcript JSONL")
      ->required();
  cmd_verify->add_option("--query", verify.query, "Query, overriding the transcripts'");

  ServeFlags serve;
  auto* cmd_serve = app.add_subcommand("serve", "Serve the annotation API");
  AddCommon(cmd_serve, serve.common, false);
  cmd_serve->add_option("--pairs", serve.pairs, "Pair queue JSONL")
      ->required()
      ->check(CLI::ExistingFile);
  cmd_serve->add_option("--store", serve.store, "Preference store JSONL")->required();
  cmd_serve->add_option("--host", serve.host, "Bind address");
  cmd_serve->add_option("--port", serve.port, "Port");
  cmd_serve->add_option("--static", serve.static_dir, "UI bundle directory");

  std::vector<const char*> argv = {kToolName};
  for (const std::string& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (cmd_gen->parsed()) return GenData(gen_data, out);
    if (cmd_pairs->parsed()) return GenPairs(gen_pairs, out);
    if (cmd_reward->parsed()) return TrainReward(train_reward, out);
    if (cmd_policy->parsed()) return TrainPolicyCmd(train_policy, out);
    if (cmd_eval->parsed()) return Evaluate(evaluate, out);
    if (cmd_compare->parsed()) return Compare(compare, out);
    if (cmd_verify->parsed()) return Verify(verify, out, err);
    if (cmd_serve->parsed()) return Serve(serve, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const InvalidConfig& e) {
    err << "config error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const SyntaxError& e) {
    err << "error: line " << e.line() << ", column " << e.column() << ": " << e.detail()
        << "\n";
    return kExitRuntime;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}

}  // namespace rllf
