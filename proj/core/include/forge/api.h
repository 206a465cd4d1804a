// Copyright 2026 The Forge Authors
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

// JSON-over-HTTP surface for the annotation console.
//
//   GET  /rounds/{id}/next          next unanswered item of the worker's HIT
//   POST /labels                    submit or revise one answer
//   GET  /adjudication/next         next disputed item for the calling expert
//   POST /adjudication              record an expert label
//   GET  /stats/agreement/{round}   Fleiss kappa and Krippendorff alpha
//   GET  /stats/corpus              label counts over the release records
//   GET  /stats/models              evaluation section of the run report
//
// Callers authenticate with `Authorization: Bearer <token>`; each token maps
// to one worker or expert id. Items are addressed by item_id only; tweet ids
// and raw text never leave the server. Routing lives in ApiService::handle so
// it can be exercised without sockets; ApiServer puts it behind cpp-httplib.

#ifndef FORGE_API_H_
#define FORGE_API_H_

#include <filesystem>
#include <istream>
#include <map>
#include <memory>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "forge/store.h"

namespace forge {

struct ApiRequest {
  std::string method;  // "GET" / "POST"
  std::string path;
  std::optional<std::string> authorization;  // raw header value
  std::string body;
};

struct ApiResponse {
  int status = 200;
  nlohmann::json body;
};

// `token<TAB>principal` lines; `#` lines are comments. Throws ParseError.
std::map<std::string, std::string> parse_tokens(std::istream& in);
std::map<std::string, std::string> load_tokens(const std::string& path);

class ApiService {
 public:
  // `report_path` is the run report served by /stats/models; it may not
  // exist yet.
  ApiService(Store& store, std::map<std::string, std::string> tokens,
             std::filesystem::path report_path = {});

  // Never throws: errors become 4xx/5xx responses with {"error": ...}.
  ApiResponse handle(const ApiRequest& req);

 private:
  std::string principal(const ApiRequest& req) const;
  ApiResponse next_task(const std::string& worker, const std::string& round_id);
  ApiResponse post_label(const std::string& worker, const nlohmann::json& body);
  ApiResponse next_adjudication(const std::string& expert);
  ApiResponse post_adjudication(const std::string& expert, const nlohmann::json& body);
  ApiResponse agreement(const std::string& round_id) const;
  ApiResponse corpus() const;
  ApiResponse models() const;

  Store& store_;
  std::map<std::string, std::string> tokens_;
  std::filesystem::path report_path_;
};

class ApiServer {
 public:
  ApiServer(Store& store, std::map<std::string, std::string> tokens,
            std::filesystem::path report_path = {});
  ~ApiServer();

  // Port 0 picks a free port. Returns the bound port or throws Error.
  int bind(const std::string& host, int port);
  // Blocks until stop().
  void listen();
  void stop();
  bool running() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace forge

#endif  // FORGE_API_H_
