#include "soccerforge/mock_llm.hpp"

#include <atomic>
#include <chrono>
#include <mutex>
#include <thread>

#include <fmt/format.h>
#include <httplib.h>

#include "soccerforge/hashing.hpp"

namespace soccerforge {
namespace {

std::string all_content(const json& messages) {
  std::string text;
  for (const auto& m : messages) {
    if (m.contains("content") && m["content"].is_string()) text += m["content"].get<std::string>() + "\n";
  }
  return text;
}

std::string between(const std::string& text, const std::string& open, const std::string& close) {
  auto b = text.find(open);
  if (b == std::string::npos) return {};
  b += open.size();
  auto e = text.find(close, b);
  return text.substr(b, e == std::string::npos ? std::string::npos : e - b);
}

// 'A', 'B', or 'C' -> [A, B, C]
std::vector<std::string> quoted_items(const std::string& list) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while ((i = list.find('\'', i)) != std::string::npos) {
    auto e = list.find('\'', i + 1);
    if (e == std::string::npos) break;
    out.push_back(list.substr(i + 1, e - i - 1));
    i = e + 1;
  }
  return out;
}

std::string judge_reply(const std::string& prompt) {
  const auto label = between(prompt, "Actual Label: \"", "\"\n");
  const auto sentinel = between(prompt, "predicted_class could be '", "'");
  const auto classes = quoted_items(between(prompt, "possible classes:  ", ". Output"));
  json answers = json::object();
  try {
    answers = json::parse(between(prompt, "LLM-Answers: ", "\n"));
  } catch (const json::exception&) {
  }
  json scores = json::object(), reasons = json::object(), predicted = json::object();
  for (const auto& [model, answer_json] : answers.items()) {
    const auto answer = answer_json.is_string() ? answer_json.get<std::string>() : std::string();
    std::string cls = sentinel.empty() ? "Wrong Prediction" : sentinel;
    std::size_t best = std::string::npos;
    for (const auto& c : classes) {
      auto pos = answer.find(c);
      if (pos != std::string::npos && (best == std::string::npos || pos < best)) {
        best = pos;
        cls = c;
      }
    }
    const bool correct = cls == label;
    scores[model] = correct ? 10 : 2;
    reasons[model] = correct ? "The answer names the actual label." : "The answer names a different class.";
    predicted[model] = cls;
  }
  json verdict{{"scores", scores}, {"reason", reasons}, {"predicted_class", predicted}};
  return "```\n" + verdict.dump(2) + "\n```";
}

}  // namespace

std::string mock_reply(const json& messages, MockFallback fallback) {
  const auto text = all_content(messages);
  const auto tag = short_hash(messages.dump(), 6);
  if (fallback == MockFallback::Garbage) return "I am unable to produce that format today (" + tag + ").";
  if (text.find("classify the outputs of different models") != std::string::npos) return judge_reply(text);
  if (text.find("Generate THREE") != std::string::npos) {
    return fmt::format(
        "{{'Q1': 'What did the attacking side do first in clip {0}?', 'A1': 'They built the move down the left.', "
        "'Q2': 'How did the defenders respond?', 'A2': 'They dropped deep and blocked the shooting lane.', "
        "'Q3': 'What was the keeper\\'s reaction?', 'A3': 'The keeper stayed big and covered the near post.'}}",
        tag);
  }
  return fmt::format(
      "{{'Q': 'Can you describe what happens in this clip ({0})?', 'A': 'The ball moves quickly between the lines "
      "and the crowd rises as the play develops.'}}",
      tag);
}

struct MockLlmServer::Impl {
  MockLlmOptions options;
  httplib::Server server;
  std::thread thread;
  int port = 0;
  mutable std::mutex mu;
  std::vector<json> requests;
  std::vector<std::string> authorizations;
  std::atomic<int> active{0};
  std::atomic<int> peak{0};
};

MockLlmServer::MockLlmServer(MockLlmOptions options) : impl_(std::make_unique<Impl>()) {
  impl_->options = std::move(options);
  auto* impl = impl_.get();
  impl->server.Post("/v1/chat/completions", [impl](const httplib::Request& req, httplib::Response& res) {
    const int now = ++impl->active;
    int peak = impl->peak.load();
    while (now > peak && !impl->peak.compare_exchange_weak(peak, now)) {
    }
    if (impl->options.delay_ms > 0) std::this_thread::sleep_for(std::chrono::milliseconds(impl->options.delay_ms));

    std::size_t index;
    json body;
    try {
      body = json::parse(req.body);
    } catch (const json::exception&) {
      body = json(nullptr);
    }
    {
      std::lock_guard lock(impl->mu);
      index = impl->requests.size();
      impl->requests.push_back(body);
      impl->authorizations.push_back(req.get_header_value("Authorization"));
    }
    if (index < impl->options.status_sequence.size() && impl->options.status_sequence[index] != 200) {
      res.status = impl->options.status_sequence[index];
      res.set_content(R"({"error":{"message":"scripted failure"}})", "application/json");
      --impl->active;
      return;
    }
    if (!body.is_object() || !body.contains("messages")) {
      res.status = 400;
      res.set_content(R"({"error":{"message":"missing messages"}})", "application/json");
      --impl->active;
      return;
    }
    const auto& messages = body["messages"];
    const auto hash = sha256_hex(messages.dump());
    auto it = impl->options.script.find(hash);
    const auto content = it != impl->options.script.end() ? it->second : mock_reply(messages, impl->options.fallback);
    json reply{{"id", "mock-" + hash.substr(0, 12)},
               {"object", "chat.completion"},
               {"model", body.value("model", std::string("mock"))},
               {"choices", json::array({{{"index", 0},
                                         {"message", {{"role", "assistant"}, {"content", content}}},
                                         {"finish_reason", "stop"}}})}};
    res.set_content(reply.dump(), "application/json");
    --impl->active;
  });
  impl->port = impl->server.bind_to_any_port("127.0.0.1");
  if (impl->port <= 0) throw std::runtime_error("mock LLM server could not bind a port");
  impl->thread = std::thread([impl] { impl->server.listen_after_bind(); });
  impl->server.wait_until_ready();
}

MockLlmServer::~MockLlmServer() {
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

int MockLlmServer::port() const { return impl_->port; }

std::string MockLlmServer::url() const {
  return fmt::format("http://127.0.0.1:{}/v1/chat/completions", impl_->port);
}

std::size_t MockLlmServer::request_count() const {
  std::lock_guard lock(impl_->mu);
  return impl_->requests.size();
}

int MockLlmServer::max_concurrent() const { return impl_->peak.load(); }

std::vector<std::string> MockLlmServer::authorizations() const {
  std::lock_guard lock(impl_->mu);
  return impl_->authorizations;
}

std::vector<json> MockLlmServer::requests() const {
  std::lock_guard lock(impl_->mu);
  return impl_->requests;
}

}  // namespace soccerforge
