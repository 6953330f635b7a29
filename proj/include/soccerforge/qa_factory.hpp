#pragma once

#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "soccerforge/text_fusion.hpp"

namespace soccerforge {

using json = nlohmann::json;

// --- prompts ------------------------------------------------------------------

enum class Role { System, User };
std::string_view to_string(Role r);

struct Message {
  Role role = Role::User;
  std::string content;

  bool operator==(const Message&) const = default;
};

/// Ordered chat messages; never empty and always opened by a System message.
class PromptMessages {
 public:
  explicit PromptMessages(std::vector<Message> messages);

  const std::vector<Message>& messages() const { return messages_; }
  const Message& system() const { return messages_.front(); }
  PromptMessages with_appended(Message m) const;
  json to_json() const;

  bool operator==(const PromptMessages&) const = default;

 private:
  std::vector<Message> messages_;
};

/// SHA-256 over the canonical JSON rendering of the messages.
std::string prompt_hash(const PromptMessages& prompt);

/// The event slot of the generation input ("shows only Goal event by
/// red-jerseyed team in the match between teams in red vs blue jerseys.").
std::string render_event_slot(const FusedClip& fused);

/// Full generation input block: event slot, captions, commentary.
std::string render_game_details(const FusedClip& fused);

PromptMessages build_long_description_prompt(const FusedClip& fused);
PromptMessages build_detail_qa_prompt(std::string_view long_description, std::string_view event_info);

/// Overview prompt. The wording is reconstructed from the method description;
/// no original text exists for it.
PromptMessages build_overview_qa_prompt(std::string_view long_description);

/// One-sentence event summary used to fill the detail prompt's event slot.
std::string describe_event_info(const FusedClip& fused);

/// Appended user turn for the single retry after an unparseable reply.
inline constexpr std::string_view kCorrectiveInstruction =
    "Your previous response could not be parsed. Reply with only the dictionary in the exact format "
    "requested above, using the same keys, and no other text.";

// --- response parsing ---------------------------------------------------------

enum class ExpectedShape { One, Three };

struct QaPart {
  std::string question;
  std::string answer;

  bool operator==(const QaPart&) const = default;
};

class ResponseError : public std::runtime_error {
 public:
  ResponseError(const std::string& what, std::string raw) : std::runtime_error(what), raw_(std::move(raw)) {}
  const std::string& raw() const { return raw_; }

 private:
  std::string raw_;
};

class UnparseableResponse : public ResponseError {
 public:
  using ResponseError::ResponseError;
};

class WrongShape : public ResponseError {
 public:
  using ResponseError::ResponseError;
};

/// Extracts {'Q','A'} or {'Q1'..'A3'} from a raw completion. Parts are
/// returned in index order.
std::vector<QaPart> parse_qa_response(std::string_view raw, ExpectedShape expected);

// --- chat-completion client ---------------------------------------------------

struct LlmConfig {
  std::string endpoint_url = "http://127.0.0.1:8080/v1/chat/completions";
  std::string model_name = "gpt-3.5-turbo";
  double temperature = 0.7;
  int max_retries = 3;
  double request_timeout_s = 60.0;
  int max_inflight = 4;
  /// Environment variable holding the bearer token; empty means no credential.
  std::string api_key_env = "SOCCERFORGE_API_KEY";
  int backoff_initial_ms = 500;

  void check() const;
};

void to_json(json& j, const LlmConfig& c);
void from_json(const json& j, LlmConfig& c);

class LlmError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class AuthError : public LlmError {
 public:
  using LlmError::LlmError;
};
class RateLimited : public LlmError {
 public:
  using LlmError::LlmError;
};
class Timeout : public LlmError {
 public:
  using LlmError::LlmError;
};
class MalformedResponse : public LlmError {
 public:
  using LlmError::LlmError;
};
/// Server errors or connection failures that outlived the retry budget.
class TransportError : public LlmError {
 public:
  using LlmError::LlmError;
};

/// POSTs {model, messages, temperature} and returns choices[0].message.content.
/// 429, 5xx and connection failures are retried with exponential backoff;
/// requests to one endpoint share a process-wide cap of cfg.max_inflight.
std::string request_completion(const PromptMessages& prompt, const LlmConfig& cfg);

// --- dataset assembly ---------------------------------------------------------

enum class QaKind { LongDescription, OverviewQA, DetailQA };
std::string_view to_string(QaKind k);

struct QARecord {
  std::string clip_id;
  std::string match_id;
  std::string media_path;
  QaKind kind = QaKind::LongDescription;
  std::string question;
  std::string answer;
  int index = 0;  // 1..3 for DetailQA, 0 otherwise

  bool operator==(const QARecord&) const = default;
};

json qa_record_json(const QARecord& r);
QARecord qa_record_from_json(const json& j);

struct QuarantineEntry {
  std::string clip_id;
  std::string step;  // "long_description" | "overview_qa" | "detail_qa"
  std::string error;
  std::vector<std::string> raw_responses;
};

json quarantine_json(const QuarantineEntry& q);

using CompletionFn = std::function<std::string(const PromptMessages&)>;

/// Records for one clip, or a quarantine entry. Records come in complete
/// groups: LongDescription + OverviewQA for single-event clips, LongDescription
/// + three DetailQA for paired-event clips.
struct ClipGeneration {
  std::vector<QARecord> records;
  std::optional<QuarantineEntry> quarantine;
};

ClipGeneration generate_for_clip(const FusedClip& fused, const CompletionFn& complete);

/// Runs generate_for_clip over all clips with `workers` threads; results keep
/// input order.
std::vector<ClipGeneration> generate_dataset(std::span<const FusedClip> clips, const CompletionFn& complete,
                                             int workers);

}  // namespace soccerforge
