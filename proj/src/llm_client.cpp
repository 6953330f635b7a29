#include <algorithm>
#include <chrono>
#include <condition_variable>
#include <cstdlib>
#include <map>
#include <memory>
#include <mutex>
#include <thread>

#include <fmt/format.h>
#include <httplib.h>

#include "soccerforge/qa_factory.hpp"

namespace soccerforge {
namespace {

struct Endpoint {
  std::string origin;  // scheme://host[:port]
  std::string path;
};

Endpoint split_url(const std::string& url) {
  auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw std::invalid_argument("endpoint_url lacks a scheme: " + url);
  auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

// Process-wide in-flight cap per endpoint.
class InflightLimiter {
 public:
  void acquire(int cap) {
    std::unique_lock lock(mu_);
    cv_.wait(lock, [&] { return active_ < cap; });
    ++active_;
  }
  void release() {
    {
      std::lock_guard lock(mu_);
      --active_;
    }
    cv_.notify_all();
  }

 private:
  std::mutex mu_;
  std::condition_variable cv_;
  int active_ = 0;
};

InflightLimiter& limiter_for(const std::string& url) {
  static std::mutex mu;
  static std::map<std::string, std::unique_ptr<InflightLimiter>> limiters;
  std::lock_guard lock(mu);
  auto& slot = limiters[url];
  if (!slot) slot = std::make_unique<InflightLimiter>();
  return *slot;
}

class InflightGuard {
 public:
  InflightGuard(InflightLimiter& l, int cap) : l_(l) { l_.acquire(cap); }
  ~InflightGuard() { l_.release(); }
  InflightGuard(const InflightGuard&) = delete;
  InflightGuard& operator=(const InflightGuard&) = delete;

 private:
  InflightLimiter& l_;
};

enum class Failure { None, RateLimit, Server, Timeout, Connection };

}  // namespace

void LlmConfig::check() const {
  if (endpoint_url.empty()) throw std::invalid_argument("endpoint_url is empty");
  if (max_retries < 0) throw std::invalid_argument("max_retries must be >= 0");
  if (max_inflight < 1) throw std::invalid_argument("max_inflight must be >= 1");
  if (request_timeout_s <= 0) throw std::invalid_argument("request_timeout_s must be > 0");
  if (backoff_initial_ms < 0) throw std::invalid_argument("backoff_initial_ms must be >= 0");
}

void to_json(json& j, const LlmConfig& c) {
  j = json{{"endpoint_url", c.endpoint_url},     {"model_name", c.model_name},
           {"temperature", c.temperature},       {"max_retries", c.max_retries},
           {"request_timeout_s", c.request_timeout_s}, {"max_inflight", c.max_inflight},
           {"api_key_env", c.api_key_env},       {"backoff_initial_ms", c.backoff_initial_ms}};
}

void from_json(const json& j, LlmConfig& c) {
  LlmConfig d;
  c.endpoint_url = j.value("endpoint_url", d.endpoint_url);
  c.model_name = j.value("model_name", d.model_name);
  c.temperature = j.value("temperature", d.temperature);
  c.max_retries = j.value("max_retries", d.max_retries);
  c.request_timeout_s = j.value("request_timeout_s", d.request_timeout_s);
  c.max_inflight = j.value("max_inflight", d.max_inflight);
  c.api_key_env = j.value("api_key_env", d.api_key_env);
  c.backoff_initial_ms = j.value("backoff_initial_ms", d.backoff_initial_ms);
  c.check();
}

std::string request_completion(const PromptMessages& prompt, const LlmConfig& cfg) {
  cfg.check();
  httplib::Headers headers;
  if (!cfg.api_key_env.empty()) {
    const char* key = std::getenv(cfg.api_key_env.c_str());
    if (key == nullptr || *key == '\0') throw AuthError("credential variable " + cfg.api_key_env + " is not set");
    headers.emplace("Authorization", std::string("Bearer ") + key);
  }

  const auto ep = split_url(cfg.endpoint_url);
  const std::string body =
      json{{"model", cfg.model_name}, {"messages", prompt.to_json()}, {"temperature", cfg.temperature}}.dump();
  const auto timeout = std::chrono::milliseconds(static_cast<std::int64_t>(cfg.request_timeout_s * 1000.0));

  auto& limiter = limiter_for(cfg.endpoint_url);
  Failure last = Failure::None;
  std::string last_detail;
  for (int attempt = 0; attempt <= cfg.max_retries; ++attempt) {
    if (attempt > 0) {
      const std::int64_t delay = std::min<std::int64_t>(
          static_cast<std::int64_t>(cfg.backoff_initial_ms) << std::min(attempt - 1, 16), 30000);
      std::this_thread::sleep_for(std::chrono::milliseconds(delay));
    }

    httplib::Result res;
    {
      InflightGuard guard(limiter, cfg.max_inflight);
      httplib::Client cli(ep.origin);
      cli.set_connection_timeout(timeout);
      cli.set_read_timeout(timeout);
      cli.set_write_timeout(timeout);
      res = cli.Post(ep.path, headers, body, "application/json");
    }

    if (!res) {
      const auto err = res.error();
      last = (err == httplib::Error::ConnectionTimeout || err == httplib::Error::Read) ? Failure::Timeout
                                                                                         : Failure::Connection;
      last_detail = httplib::to_string(err);
      continue;
    }
    const int status = res->status;
    if (status == 401 || status == 403) throw AuthError(fmt::format("endpoint rejected credential ({})", status));
    if (status == 429) {
      last = Failure::RateLimit;
      last_detail = "429";
      continue;
    }
    if (status >= 500) {
      last = Failure::Server;
      last_detail = std::to_string(status);
      continue;
    }
    if (status < 200 || status >= 300) {
      throw TransportError(fmt::format("endpoint returned status {}: {}", status, res->body));
    }

    try {
      auto reply = json::parse(res->body);
      const auto& content = reply.at("choices").at(0).at("message").at("content");
      if (!content.is_string()) throw MalformedResponse("message content is not a string");
      return content.get<std::string>();
    } catch (const json::exception& e) {
      throw MalformedResponse(std::string("unexpected completion body: ") + e.what());
    }
  }

  const int attempts = cfg.max_retries + 1;
  switch (last) {
    case Failure::RateLimit:
      throw RateLimited(fmt::format("rate limited after {} attempts", attempts));
    case Failure::Timeout:
      throw Timeout(fmt::format("timed out after {} attempts ({})", attempts, last_detail));
    case Failure::Server:
      throw TransportError(fmt::format("server error {} after {} attempts", last_detail, attempts));
    default:
      throw TransportError(fmt::format("connection failed after {} attempts ({})", attempts, last_detail));
  }
}

}  // namespace soccerforge
