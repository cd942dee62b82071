// Copyright 2026 The KGQA Authors.
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

#include "kgqa/backend.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <semaphore>
#include <thread>

#include "httplib.h"
#include "kgqa/error.h"
#include "kgqa/prompts.h"
#include "kgqa/text_util.h"

namespace kgqa {

void GenerateRequest::Validate() const {
  if (max_new_tokens < 1) {
    Fail(ErrorCode::kUsage, "max_new_tokens must be >= 1");
  }
  if (!(temperature >= 0.0)) {
    Fail(ErrorCode::kUsage, "temperature must be >= 0");
  }
}

nlohmann::json GenerateRequest::ToJson() const {
  return nlohmann::json{{"prompt", prompt},
                        {"max_new_tokens", max_new_tokens},
                        {"temperature", temperature},
                        {"seed", seed}};
}

GenerateRequest GenerateRequest::FromJson(const nlohmann::json& j) {
  GenerateRequest r;
  r.prompt = j.at("prompt").get<std::string>();
  r.max_new_tokens = j.at("max_new_tokens").get<int>();
  r.temperature = j.at("temperature").get<double>();
  r.seed = j.at("seed").get<int64_t>();
  return r;
}

nlohmann::json ClassifyRequest::ToJson() const {
  return nlohmann::json{{"input", input}, {"label_space_id", label_space_id}};
}

ClassifyRequest ClassifyRequest::FromJson(const nlohmann::json& j) {
  return ClassifyRequest{j.at("input").get<std::string>(),
                         j.at("label_space_id").get<std::string>()};
}

std::vector<double> RenormalizeRemoteProbs(std::vector<double> probs,
                                           size_t expected_labels) {
  if (probs.size() != expected_labels) {
    Fail(ErrorCode::kProtocol,
         "classify: expected " + std::to_string(expected_labels) +
             " probabilities, got " + std::to_string(probs.size()));
  }
  double total = 0.0;
  for (double p : probs) {
    if (!std::isfinite(p) || p < 0.0) {
      Fail(ErrorCode::kProtocol, "classify: probabilities must be finite and "
                                 "non-negative");
    }
    total += p;
  }
  if (std::abs(total - 1.0) > kRemoteSumTolerance) {
    Fail(ErrorCode::kProtocol,
         "classify: probabilities sum to " + std::to_string(total));
  }
  for (double& p : probs) p /= total;
  return probs;
}

namespace {

struct TripleGroup {
  std::string subject;
  std::string relation;
  std::string object;
};

// Splits "(s, r, o), (s, r, o)" into groups. Returns empty on anything that
// does not look like triple-form text.
std::vector<TripleGroup> ParseTripleForm(std::string_view text) {
  std::vector<TripleGroup> groups;
  text = Trim(text);
  if (text.size() < 2 || text.front() != '(' || text.back() != ')') {
    return groups;
  }
  text = text.substr(1, text.size() - 2);
  size_t start = 0;
  while (start <= text.size()) {
    size_t end = text.find("), (", start);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view body = text.substr(start, end - start);
    const size_t c1 = body.find(", ");
    const size_t c2 = c1 == std::string_view::npos ? c1 : body.find(", ", c1 + 2);
    if (c2 == std::string_view::npos) return {};
    groups.push_back(TripleGroup{std::string(body.substr(0, c1)),
                                 std::string(body.substr(c1 + 2, c2 - c1 - 2)),
                                 std::string(body.substr(c2 + 2))});
    start = end + 4;
  }
  return groups;
}

std::string_view GraphSection(std::string_view prompt) {
  if (prompt.substr(0, prompts::kGraphToTextPrefix.size()) !=
      prompts::kGraphToTextPrefix) {
    return prompt;
  }
  std::string_view rest = prompt.substr(prompts::kGraphToTextPrefix.size());
  const size_t suffix = rest.rfind(prompts::kGraphToTextSuffix);
  if (suffix != std::string_view::npos) rest = rest.substr(0, suffix);
  return rest;
}

bool IsWordByte(unsigned char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
         (c >= '0' && c <= '9') || c >= 0x80;
}

}  // namespace

GenerateResponse MockRewriter::Generate(const GenerateRequest& request) const {
  request.Validate();
  std::vector<TripleGroup> groups = ParseTripleForm(GraphSection(request.prompt));
  if (drop_terminal_facts_) {
    std::unordered_set<std::string> subjects;
    for (const TripleGroup& g : groups) subjects.insert(g.subject);
    std::erase_if(groups, [&](const TripleGroup& g) {
      return !subjects.contains(g.object);
    });
  }
  std::vector<std::string> sentences;
  for (const TripleGroup& g : groups) {
    std::string relation = g.relation;
    std::replace(relation.begin(), relation.end(), '_', ' ');
    sentences.push_back(g.subject + " " + relation + " " + g.object + ".");
  }
  return GenerateResponse{Join(sentences, " "), backend_id(), 0.0};
}

MockQA::MockQA(const std::vector<std::string>& entity_lexicon) {
  for (const std::string& e : entity_lexicon) {
    if (e.empty()) continue;
    lexicon_.insert(e);
    lengths_.push_back(e.size());
  }
  std::sort(lengths_.begin(), lengths_.end(), std::greater<>());
  lengths_.erase(std::unique(lengths_.begin(), lengths_.end()), lengths_.end());
}

std::string MockQA::Answer(std::string_view prompt) const {
  static constexpr std::string_view kUnknown = "unknown";
  if (prompt.substr(0, prompts::kFactsPrefix.size()) != prompts::kFactsPrefix) {
    return std::string(kUnknown);
  }
  std::string_view facts = prompt.substr(prompts::kFactsPrefix.size());
  const size_t q = facts.rfind(prompts::kQuestionInfix);
  if (q != std::string_view::npos) facts = facts.substr(0, q);
  facts = Trim(facts);
  if (facts.empty()) return std::string(kUnknown);

  if (!lexicon_.empty()) {
    // Scan end positions right to left; the first boundary-delimited
    // lexicon hit is the mention that ends last.
    for (size_t end = facts.size(); end > 0; --end) {
      if (end < facts.size() && IsWordByte(facts[end])) continue;
      for (size_t len : lengths_) {
        if (len > end) continue;
        const size_t start = end - len;
        if (start > 0 && IsWordByte(facts[start - 1])) continue;
        if (lexicon_.contains(std::string(facts.substr(start, len)))) {
          return std::string(facts.substr(start, len));
        }
      }
    }
    return std::string(kUnknown);
  }

  std::string_view last = facts;
  while (!last.empty() && last.back() == '.') last.remove_suffix(1);
  const size_t sentence = last.rfind(". ");
  if (sentence != std::string_view::npos) last = last.substr(sentence + 2);
  const size_t space = last.rfind(' ');
  if (space != std::string_view::npos) last = last.substr(space + 1);
  return last.empty() ? std::string(kUnknown) : std::string(last);
}

GenerateResponse MockQA::Generate(const GenerateRequest& request) const {
  request.Validate();
  return GenerateResponse{Answer(request.prompt), backend_id(), 0.0};
}

void OracleClassifier::Set(std::string input, std::vector<double> probs) {
  if (probs.size() != labels_.size()) {
    Fail(ErrorCode::kUsage, "oracle distribution has " +
                                std::to_string(probs.size()) +
                                " entries, label space has " +
                                std::to_string(labels_.size()));
  }
  const double total = std::accumulate(probs.begin(), probs.end(), 0.0);
  if (!(total > 0.0)) Fail(ErrorCode::kUsage, "oracle distribution sums to 0");
  for (double& p : probs) p /= total;
  table_[std::move(input)] = std::move(probs);
}

void OracleClassifier::SetGold(std::string input, size_t label) {
  if (label >= labels_.size()) Fail(ErrorCode::kUsage, "oracle label out of range");
  std::vector<double> probs(labels_.size(), 0.0);
  probs[label] = 1.0;
  table_[std::move(input)] = std::move(probs);
}

LabelDistribution OracleClassifier::Classify(std::string_view input) const {
  auto it = table_.find(std::string(input));
  if (it != table_.end()) return LabelDistribution{it->second, label_space_};
  return LabelDistribution{
      std::vector<double>(labels_.size(),
                          1.0 / static_cast<double>(labels_.size())),
      label_space_};
}

void RemoteConfig::Validate() const {
  if (endpoint.rfind("http://", 0) != 0) {
    Fail(ErrorCode::kConfig,
         "backend endpoint must start with http:// (got '" + endpoint + "')");
  }
  if (timeout_ms < 1) Fail(ErrorCode::kConfig, "timeout_ms must be >= 1");
  if (max_retries < 0) Fail(ErrorCode::kConfig, "max_retries must be >= 0");
  if (initial_backoff_ms < 0 || max_backoff_ms < 0 || backoff_multiplier < 1.0) {
    Fail(ErrorCode::kConfig, "invalid backoff settings");
  }
  if (max_in_flight < 1) Fail(ErrorCode::kConfig, "max_in_flight must be >= 1");
}

RemoteConfig RemoteConfig::FromJson(const nlohmann::json& j) {
  RemoteConfig c;
  c.endpoint = j.value("endpoint", c.endpoint);
  c.timeout_ms = j.value("timeout_ms", c.timeout_ms);
  c.max_retries = j.value("max_retries", c.max_retries);
  c.initial_backoff_ms = j.value("initial_backoff_ms", c.initial_backoff_ms);
  c.backoff_multiplier = j.value("backoff_multiplier", c.backoff_multiplier);
  c.max_backoff_ms = j.value("max_backoff_ms", c.max_backoff_ms);
  c.max_in_flight = j.value("max_in_flight", c.max_in_flight);
  c.bearer_token = j.value("bearer_token", c.bearer_token);
  return c;
}

RemoteConfig RemoteConfig::FromFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) Fail(ErrorCode::kIo, "cannot open backend config '" + path + "'");
  try {
    return FromJson(nlohmann::json::parse(in));
  } catch (const nlohmann::json::exception& e) {
    Fail(ErrorCode::kConfig, "backend config '" + path + "': " + e.what());
  }
}

namespace {

int EnvInt(const char* name, int fallback) {
  const char* v = std::getenv(name);
  if (v == nullptr || *v == '\0') return fallback;
  try {
    return std::stoi(v);
  } catch (const std::exception&) {
    Fail(ErrorCode::kConfig, std::string(name) + " is not an integer");
  }
}

}  // namespace

void RemoteConfig::ApplyEnvironment() {
  if (const char* url = std::getenv("KGQA_BACKEND_URL"); url && *url) {
    endpoint = url;
  }
  timeout_ms = EnvInt("KGQA_BACKEND_TIMEOUT_MS", timeout_ms);
  max_retries = EnvInt("KGQA_BACKEND_MAX_RETRIES", max_retries);
  max_in_flight = static_cast<size_t>(
      EnvInt("KGQA_BACKEND_MAX_IN_FLIGHT", static_cast<int>(max_in_flight)));
  if (const char* token = std::getenv("KGQA_BACKEND_TOKEN"); token && *token) {
    bearer_token = token;
  }
}

struct HttpBackend::Impl {
  explicit Impl(size_t slots)
      : in_flight(static_cast<std::ptrdiff_t>(slots)) {}

  std::string scheme_host_port;
  std::string path_prefix;
  mutable std::counting_semaphore<1024> in_flight;
};

HttpBackend::HttpBackend(RemoteConfig config) : config_(std::move(config)) {
  config_.Validate();
  if (config_.max_in_flight > 1024) {
    Fail(ErrorCode::kConfig, "max_in_flight must be <= 1024");
  }
  impl_ = std::make_unique<Impl>(config_.max_in_flight);
  std::string_view rest = config_.endpoint;
  rest.remove_prefix(std::string_view("http://").size());
  const size_t slash = rest.find('/');
  impl_->scheme_host_port =
      "http://" + std::string(rest.substr(0, slash));
  if (slash != std::string_view::npos) {
    std::string_view prefix = rest.substr(slash);
    while (!prefix.empty() && prefix.back() == '/') prefix.remove_suffix(1);
    impl_->path_prefix = std::string(prefix);
  }
}

HttpBackend::~HttpBackend() = default;

nlohmann::json HttpBackend::Post(const std::string& path,
                                 const nlohmann::json& body) const {
  impl_->in_flight.acquire();
  struct Release {
    std::counting_semaphore<1024>& s;
    ~Release() { s.release(); }
  } release{impl_->in_flight};

  const std::string payload = body.dump();
  const std::string target = impl_->path_prefix + path;
  std::string last_error;
  double backoff_ms = config_.initial_backoff_ms;
  for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(
          std::chrono::duration<double, std::milli>(backoff_ms));
      backoff_ms = std::min<double>(backoff_ms * config_.backoff_multiplier,
                                    config_.max_backoff_ms);
    }
    // One client per attempt: responses can never cross between callers.
    httplib::Client client(impl_->scheme_host_port);
    const auto timeout = std::chrono::milliseconds(config_.timeout_ms);
    client.set_connection_timeout(timeout);
    client.set_read_timeout(timeout);
    client.set_write_timeout(timeout);
    httplib::Headers headers;
    if (!config_.bearer_token.empty()) {
      headers.emplace("Authorization", "Bearer " + config_.bearer_token);
    }
    auto result = client.Post(target, headers, payload, "application/json");
    if (!result) {
      last_error = "transport error: " + httplib::to_string(result.error());
      continue;
    }
    const int status = result->status;
    if (status == 200) {
      try {
        return nlohmann::json::parse(result->body);
      } catch (const nlohmann::json::exception& e) {
        Fail(ErrorCode::kProtocol,
             "POST " + target + ": response is not JSON: " + e.what());
      }
    }
    last_error = "HTTP status " + std::to_string(status);
    if (status != 429 && status < 500) {
      Fail(ErrorCode::kBackend, "POST " + target + " failed: " + last_error +
                                    " (" + std::to_string(attempt) +
                                    " retries)");
    }
  }
  Fail(ErrorCode::kBackend, "POST " + target + " failed after " +
                                std::to_string(config_.max_retries) +
                                " retries: " + last_error);
}

GenerateResponse HttpBackend::Generate(const GenerateRequest& request) const {
  request.Validate();
  const auto start = std::chrono::steady_clock::now();
  const nlohmann::json reply = Post("/v1/generate", request.ToJson());
  const auto text = reply.find("text");
  if (text == reply.end() || !text->is_string()) {
    Fail(ErrorCode::kProtocol, "generate: response lacks string field 'text'");
  }
  const double latency =
      std::chrono::duration<double, std::milli>(
          std::chrono::steady_clock::now() - start)
          .count();
  return GenerateResponse{text->get<std::string>(), backend_id(), latency};
}

ClassifyResponse HttpBackend::Classify(const ClassifyRequest& request) const {
  const nlohmann::json reply = Post("/v1/classify", request.ToJson());
  const auto probs = reply.find("probs");
  if (probs == reply.end() || !probs->is_array()) {
    Fail(ErrorCode::kProtocol, "classify: response lacks array field 'probs'");
  }
  ClassifyResponse out;
  for (const auto& p : *probs) {
    if (!p.is_number()) {
      Fail(ErrorCode::kProtocol, "classify: non-numeric probability");
    }
    out.probs.push_back(p.get<double>());
  }
  return out;
}

LabelDistribution RemoteClassifier::Classify(std::string_view input) const {
  ClassifyResponse response =
      backend_->Classify(ClassifyRequest{std::string(input), label_space_});
  return LabelDistribution{
      RenormalizeRemoteProbs(std::move(response.probs), labels_.size()),
      label_space_};
}

}  // namespace kgqa
