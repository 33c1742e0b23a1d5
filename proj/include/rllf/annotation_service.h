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

#ifndef RLLF_ANNOTATION_SERVICE_H_
#define RLLF_ANNOTATION_SERVICE_H_

#include <cstdint>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "json.hpp"
#include "rllf/preference.h"

namespace httplib {
class Server;
}

namespace rllf {

// What the annotator sees. Transcripts are shown by position only.
struct PendingPairView {
  std::string pair_id;
  std::string rendered_program;
  std::string rendered_query;
  std::string rendered_left;
  std::string rendered_right;
};

nlohmann::json ToJson(const PendingPairView& view);

enum class DisplayChoice { kLeft, kRight, kTie };
std::optional<DisplayChoice> ParseDisplayChoice(std::string_view text);

// Undoes the display randomization.
Choice ToSigmaChoice(DisplayChoice choice, bool sigma1_left);

// Seeded per pair id, so reloads show the same order.
bool Sigma1ShownLeft(const std::string& pair_id, std::uint64_t seed);

struct LabelProgress {
  std::size_t labeled = 0;
  std::size_t pending = 0;
};

enum class SubmitStatus { kAccepted, kUnknownPair, kDuplicate };

struct SubmitResult {
  SubmitStatus status = SubmitStatus::kAccepted;
  std::optional<PreferenceRecord> record;  // set when accepted
};

// Serves a pair queue (lines written by WritePairs) and appends human labels
// to a preference store. Human records already in the store mark their pairs
// labeled, so a restarted service resumes where it stopped. Thread-safe.
class AnnotationService {
 public:
  AnnotationService(const std::vector<nlohmann::json>& queue, std::string store_path,
                    std::uint64_t seed);
  static AnnotationService FromFiles(const std::string& queue_path,
                                     const std::string& store_path,
                                     std::uint64_t seed);

  // Oldest pending pair.
  std::optional<PendingPairView> NextPair() const;

  // Appends to the store first and marks the pair labeled after the append
  // succeeds. IoError from the store leaves the pair pending.
  SubmitResult SubmitLabel(const std::string& pair_id, DisplayChoice choice);

  LabelProgress Progress() const;

  // Display mapping for a queued pair. Throws UnknownPair.
  bool Sigma1Left(const std::string& pair_id) const;

 private:
  struct Entry {
    std::string program;
    std::string query;
    std::string sigma1;
    std::string sigma2;
    bool sigma1_left = true;
  };

  PendingPairView Render(const std::string& pair_id) const;

  mutable std::mutex mu_;
  LabelBook book_;
  std::unordered_map<std::string, Entry> entries_;
  std::string store_path_;
};

// Routes:
//   GET  /api/pairs/next        200 pair, 204 when none remain
//   POST /api/pairs/{id}/label  {"choice": "left"|"right"|"tie"}
//                               200, 400 bad body, 404 unknown, 409 duplicate
//   GET  /api/progress          {"labeled": n, "pending": m}
//   GET  /                      files from static_dir, or a stub page
void MountAnnotationRoutes(httplib::Server& server, AnnotationService& service,
                           const std::string& static_dir);

// Blocks until the server stops. Returns false when the port cannot be bound.
bool ServeAnnotations(AnnotationService& service, const std::string& host, int port,
                      const std::string& static_dir);

}  // namespace rllf

#endif  // RLLF_ANNOTATION_SERVICE_H_
