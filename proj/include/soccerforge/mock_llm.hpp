#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

namespace soccerforge {

using json = nlohmann::json;

enum class MockFallback {
  ValidShape,  // a well-formed reply of the shape the prompt asks for
  Garbage,     // text with no object in it
};

struct MockLlmOptions {
  /// prompt_hash -> completion text.
  std::map<std::string, std::string> script;
  MockFallback fallback = MockFallback::ValidShape;
  /// HTTP statuses returned for the first requests, in order; 200 afterwards.
  std::vector<int> status_sequence;
  int delay_ms = 0;
};

/// Fallback completion for a chat message list. Detects the single-QA,
/// three-QA and judge prompts by their wording.
std::string mock_reply(const json& messages, MockFallback fallback);

/// Loopback chat-completion endpoint on a free port, stopped on destruction.
class MockLlmServer {
 public:
  explicit MockLlmServer(MockLlmOptions options = {});
  ~MockLlmServer();
  MockLlmServer(const MockLlmServer&) = delete;
  MockLlmServer& operator=(const MockLlmServer&) = delete;

  int port() const;
  /// Full completion URL, e.g. http://127.0.0.1:PORT/v1/chat/completions.
  std::string url() const;
  std::size_t request_count() const;
  int max_concurrent() const;
  std::vector<json> requests() const;
  /// Authorization header of each request, empty when absent.
  std::vector<std::string> authorizations() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace soccerforge
