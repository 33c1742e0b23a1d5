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

#include "rllf/annotation_service.h"

#include <chrono>
#include <ctime>
#include <filesystem>
#include <utility>

#include "httplib.h"
#include "rllf/errors.h"
#include "rllf/random.h"

namespace rllf {
namespace {

std::string UtcNow() {
  const std::time_t t =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string TranscriptText(const nlohmann::json& t) {
  return t.value("raw_text", std::string());
}

void SendJson(httplib::Response& res, int status, const nlohmann::json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

constexpr const char* kStubPage =
    "<!doctype html><html><head><meta charset=\"utf-8\"><title>annotation</title>"
    "</head><body><p>No UI bundle configured. The API is under /api/.</p>"
    "</body></html>";

}  // namespace

nlohmann::json ToJson(const PendingPairView& v) {
  return nlohmann::json{{"pair_id", v.pair_id},
                        {"rendered_program", v.rendered_program},
                        {"rendered_query", v.rendered_query},
                        {"rendered_left", v.rendered_left},
                        {"rendered_right", v.rendered_right},
                        {"status", "pending"}};
}

std::optional<DisplayChoice> ParseDisplayChoice(std::string_view text) {
  if (text == "left") return DisplayChoice::kLeft;
  if (text == "right") return DisplayChoice::kRight;
  if (text == "tie") return DisplayChoice::kTie;
  return std::nullopt;
}

Choice ToSigmaChoice(DisplayChoice choice, bool sigma1_left) {
  switch (choice) {
    case DisplayChoice::kLeft:
      return sigma1_left ? Choice::kSigma1 : Choice::kSigma2;
    case DisplayChoice::kRight:
      return sigma1_left ? Choice::kSigma2 : Choice::kSigma1;
    case DisplayChoice::kTie:
      break;
  }
  return Choice::kTie;
}

bool Sigma1ShownLeft(const std::string& pair_id, std::uint64_t seed) {
  return (Mix64(seed ^ HashString(pair_id)) >> 63) == 0;
}

AnnotationService::AnnotationService(const std::vector<nlohmann::json>& queue,
                                     std::string store_path, std::uint64_t seed)
    : store_path_(std::move(store_path)) {
  for (const nlohmann::json& j : queue) {
    const std::string id = j.at("pair_id").get<std::string>();
    if (!book_.AddPair(id)) throw Error("duplicate pair_id in queue: " + id);
    entries_.emplace(id, Entry{j.value("program_text", std::string()),
                               j.value("query_text", std::string()),
                               TranscriptText(j.at("sigma1")),
                               TranscriptText(j.at("sigma2")),
                               Sigma1ShownLeft(id, seed)});
  }
  if (std::filesystem::exists(store_path_)) {
    for (const PreferenceRecord& r : LoadRecords(store_path_)) {
      if (r.source == RecordSource::kHuman && book_.Contains(r.pair_id) &&
          !book_.IsLabeled(r.pair_id)) {
        book_.MarkLabeled(r.pair_id);
      }
    }
  }
}

AnnotationService AnnotationService::FromFiles(const std::string& queue_path,
                                               const std::string& store_path,
                                               std::uint64_t seed) {
  return AnnotationService(ReadJsonLines(queue_path), store_path, seed);
}

PendingPairView AnnotationService::Render(const std::string& pair_id) const {
  const Entry& e = entries_.at(pair_id);
  return PendingPairView{pair_id, e.program, e.query,
                         e.sigma1_left ? e.sigma1 : e.sigma2,
                         e.sigma1_left ? e.sigma2 : e.sigma1};
}

std::optional<PendingPairView> AnnotationService::NextPair() const {
  std::lock_guard lock(mu_);
  const auto id = book_.NextPending();
  if (!id) return std::nullopt;
  return Render(*id);
}

SubmitResult AnnotationService::SubmitLabel(const std::string& pair_id,
                                            DisplayChoice choice) {
  std::lock_guard lock(mu_);
  const auto it = entries_.find(pair_id);
  if (it == entries_.end()) return {SubmitStatus::kUnknownPair, std::nullopt};
  if (book_.IsLabeled(pair_id)) return {SubmitStatus::kDuplicate, std::nullopt};
  PreferenceRecord r =
      book_.PrepareLabel(pair_id, ToSigmaChoice(choice, it->second.sigma1_left), UtcNow());
  AppendRecords(store_path_, {r});
  book_.MarkLabeled(pair_id);
  return {SubmitStatus::kAccepted, std::move(r)};
}

LabelProgress AnnotationService::Progress() const {
  std::lock_guard lock(mu_);
  return {book_.labeled(), book_.total() - book_.labeled()};
}

bool AnnotationService::Sigma1Left(const std::string& pair_id) const {
  std::lock_guard lock(mu_);
  const auto it = entries_.find(pair_id);
  if (it == entries_.end()) throw UnknownPair(pair_id);
  return it->second.sigma1_left;
}

void MountAnnotationRoutes(httplib::Server& server, AnnotationService& service,
                           const std::string& static_dir) {
  server.Get("/api/pairs/next", [&service](const httplib::Request&, httplib::Response& res) {
    const auto view = service.NextPair();
    if (!view) {
      res.status = 204;
      return;
    }
    SendJson(res, 200, ToJson(*view));
  });

  server.Post(R"(/api/pairs/([^/]+)/label)",
              [&service](const httplib::Request& req, httplib::Response& res) {
    const std::string pair_id = req.matches[1];
    const nlohmann::json body = nlohmann::json::parse(req.body, nullptr, false);
    std::optional<DisplayChoice> choice;
    if (body.is_object() && body.contains("choice") && body["choice"].is_string()) {
      choice = ParseDisplayChoice(body["choice"].get<std::string>());
    }
    if (!choice) {
      SendJson(res, 400, {{"error", "choice must be one of left, right, tie"}});
      return;
    }
    SubmitResult r;
    try {
      r = service.SubmitLabel(pair_id, *choice);
    } catch (const IoError& e) {
      SendJson(res, 500, {{"error", e.what()}});
      return;
    }
    switch (r.status) {
      case SubmitStatus::kUnknownPair:
        SendJson(res, 404, {{"error", "unknown pair: " + pair_id}});
        return;
      case SubmitStatus::kDuplicate:
        SendJson(res, 409, {{"error", "already labeled: " + pair_id}});
        return;
      case SubmitStatus::kAccepted:
        break;
    }
    SendJson(res, 200, {{"pair_id", pair_id}, {"mu", {r.record->mu.first, r.record->mu.second}}});
  });

  server.Get("/api/progress", [&service](const httplib::Request&, httplib::Response& res) {
    const LabelProgress p = service.Progress();
    SendJson(res, 200, {{"labeled", p.labeled}, {"pending", p.pending}});
  });

  if (!static_dir.empty() && server.set_mount_point("/", static_dir)) return;
  server.Get("/", [](const httplib::Request&, httplib::Response& res) {
    res.set_content(kStubPage, "text/html");
  });
}

bool ServeAnnotations(AnnotationService& service, const std::string& host, int port,
                      const std::string& static_dir) {
  httplib::Server server;
  MountAnnotationRoutes(server, service, static_dir);
  return server.listen(host, port);
}

}  // namespace rllf
