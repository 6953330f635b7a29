#include <stdexcept>

#include <fmt/format.h>

#include "soccerforge/hashing.hpp"
#include "soccerforge/qa_factory.hpp"

namespace soccerforge {
namespace {

// Long-description instructions, single-event clips.
constexpr std::string_view kLongDescriptionSystem =
    "You will play two roles: a human asking questions related to describing a short soccer video clip and an "
    "intelligent chatbot designed for video description, storytelling and captioning. Your task is to generate a "
    "detailed and descriptive paragraph based on the provided fragmented information about a short video clip. "
    "##TASK:"
    "Users will provide event description, supporting caption and commentary of a clip, and you will generate ONE "
    "conversation-like question and answer related to describing the video and the game event in detail. The "
    "question should ask to describe the video content in detail. The answer should be a paraphrased and "
    "well-structured paragraph based on the provided description, with a minimum of 250 words and a maximum of "
    "300 words. "
    "##INSTRUCTIONS:"
    "- The question must be like a human conversation and focused on describing the video and event in detail. "
    "- Reject the information in supporting commentary and caption if not relevant and logical to the event "
    "visible in the clip. "
    "- The answer must be a paraphrased version of the provided information, very detailed and descriptive, and "
    "within the specified word count. "
    "- Act as if you are really seeing the visual content live and have no access to the commentary and caption. "
    "Don't mention about 'commentary' and 'caption' in the answer. "
    "- Only use the supporting commentary and caption to be smart enough to interpret the visual content, faking "
    "as though you got the information from the video itself."
    "- Avoid mentioning actual player names and team names from the commentary as it is not visible in video; "
    "instead, refer to them by jersey-color if possible, else ignore the information."
    "- Begin answers with creative opening.";

constexpr std::string_view kLongDescriptionUserPrefix = "The fragmented information: ";
constexpr std::string_view kLongDescriptionUserSuffix =
    ". Please generate the response in the form of a Python JSON dictionary string with keys 'Q' for question and "
    "'A' for answer. Each corresponding value should be the question and answer text respectively. "
    "For example, your response should look like this: {'Q': 'Your question here...', 'A': 'Your answer "
    "here...'}. Emphasize that the answer should focus on describing the video content as detailed as possible.";

// Detail-QA instructions; the event slot sits between the two halves.
constexpr std::string_view kDetailSystemHead =
    "You play two roles: a human asking questions related to a short soccer video clip and an intelligent chatbot "
    "designed to help people understand specific events within the clip. "
    "Your task is to focus on soccer video summarization, which will be utilized by users to comprehend key "
    "moments in soccer matches through various questions based on the video content. "
    "This summarization will assist in applications like analyzing game highlights, generating summaries for "
    "sports content platforms, creating brief overviews for coaching analysis, or providing quick updates for "
    "fans. "
    "You will first act as a human inquiring about specific events in a soccer match and then switch roles to an "
    "AI assistant providing detailed information based on the video's content."
    "------"
    "##TASK:"
    "You will be given a caption of a specific event from a short soccer video clip. Based on this caption, you "
    "will generate a set of conversational-style questions and answers related to the visible events. ";

constexpr std::string_view kDetailSystemTail =
    "The questions should be crafted to extract information DIRECTLY from the provided caption, so that it or "
    "parts of it can serve as the answers. "
    "Generate THREE different descriptive and conversational style questions and detailed answers based on the "
    "given information."
    "------"
    "##INSTRUCTIONS:"
    "- The questions must be conversational and directly related to the events in the soccer video clip. "
    "- The questions should be designed to extract information DIRECTLY from the given caption, so that it or "
    "parts of it can serve as the answers. "
    "- The answers must be detailed, descriptive, and should directly reference the information provided. "
    "- The questions can focus on player actions, game strategies, scoring opportunities, defensive tactics, or "
    "any key moments in the clip. "
    "------"
    "##SAMPLE QUESTIONS (based on given caption and event type):"
    "- How did the player score the goal in the clip?"
    "- What defensive strategy did the team use to prevent the goal?"
    "- Describe the sequence of passes that led to the goal."
    "- Was there an offside violation in the buildup to the goal?"
    "- How did the goalkeeper react to the shot?";

constexpr std::string_view kCaptionUserPrefix = "The video caption is: ";
constexpr std::string_view kDetailUserSuffix =
    ". "
    "Please generate the response in the form of a Python JSON, where JSON strings start with keys 'Q' for "
    "question and 'A' for answer. Each corresponding value should be the question and answer text respectively. "
    "The response should look EXACTLY like this : {'Q1': 'Your first question here...', 'A1': 'Your first "
    "answer here...', 'Q2': 'Your second question here...', 'A2': 'Your second answer here...', 'Q3': 'Your "
    "third question here...', 'A3': 'Your third answer here...'}. "
    "Emphasize that ALL THREE questions must be designed to extract information DIRECTLY from the given caption, "
    "so that it or parts of it can serve as the answers, and provide detailed and descriptive answers.";

// Overview instructions (reconstructed; no published original).
constexpr std::string_view kOverviewSystem =
    "You play two roles: a human asking questions related to a short soccer video clip and an intelligent chatbot "
    "that gives a high-level synthesis of the visible events. "
    "------"
    "##TASK:"
    "You will be given a caption of a short soccer video clip. Based on this caption, you will generate ONE "
    "conversational-style question and answer that asks for an overview of the clip, covering the overall flow, "
    "strategic developments, or key moments. "
    "------"
    "##INSTRUCTIONS:"
    "- The question must ask about the clip as a whole, not about a single detail. "
    "- The question must not ask about specific timestamps, seconds or minutes of the clip. "
    "- The answer must be short, well-formed sentences based only on the given caption. "
    "- Refer to teams and players by jersey color only.";

constexpr std::string_view kOverviewUserSuffix =
    ". Please generate the response in the form of a Python JSON dictionary string with keys 'Q' for question and "
    "'A' for answer. Each corresponding value should be the question and answer text respectively. "
    "For example, your response should look like this: {'Q': 'Your question here...', 'A': 'Your answer "
    "here...'}.";

std::string team_phrase(const EventLabel& e, const JerseyColors& j) {
  if (e.team == Team::None) return {};
  return fmt::format(" by {}-jerseyed team", j.color_of(e.team));
}

std::string seconds_text(std::int64_t ms) { return fmt::format("{:g}", static_cast<double>(ms) / 1000.0); }

}  // namespace

std::string_view to_string(Role r) { return r == Role::System ? "system" : "user"; }

PromptMessages::PromptMessages(std::vector<Message> messages) : messages_(std::move(messages)) {
  if (messages_.empty()) throw std::invalid_argument("prompt has no messages");
  if (messages_.front().role != Role::System) throw std::invalid_argument("prompt must open with a system message");
}

PromptMessages PromptMessages::with_appended(Message m) const {
  auto copy = messages_;
  copy.push_back(std::move(m));
  return PromptMessages(std::move(copy));
}

json PromptMessages::to_json() const {
  json arr = json::array();
  for (const auto& m : messages_) arr.push_back({{"role", to_string(m.role)}, {"content", m.content}});
  return arr;
}

std::string prompt_hash(const PromptMessages& prompt) { return sha256_hex(prompt.to_json().dump()); }

std::string render_event_slot(const FusedClip& fused) {
  const auto& j = fused.jerseys;
  std::string slot;
  if (const auto* pair = std::get_if<EventPair>(&fused.clip)) {
    slot = fmt::format("shows {} event{} followed by {} event{} {} seconds later", pair->first.label,
                       team_phrase(pair->first, j), pair->second.label, team_phrase(pair->second, j),
                       seconds_text(pair->gap_ms));
  } else {
    const auto& clip = std::get<ClipSpec>(fused.clip);
    slot = fmt::format("shows only {}{} event{}", clip.kind == CameraKind::Replay ? "a replay of the " : "",
                       clip.anchor_event.label, team_phrase(clip.anchor_event, j));
  }
  slot += fmt::format(" in the match between teams in {} vs {} jerseys.", j.home_color, j.away_color);
  return slot;
}

std::string render_game_details(const FusedClip& fused) {
  std::string captions;
  for (std::size_t i = 0; i < fused.captions.size(); ++i) {
    if (i) captions += '\n';
    captions += fused.captions[i];
  }
  if (captions.empty()) captions = "(none)";
  const std::string commentary = fused.commentary.empty() ? "(none)" : fused.commentary;
  return fmt::format(
      "Video Clip:\n{}\n-----\nPossible Supporting Caption:\n{}\n-----\nPossible Supporting Commentary:\n{}",
      render_event_slot(fused), captions, commentary);
}

PromptMessages build_long_description_prompt(const FusedClip& fused) {
  std::string user(kLongDescriptionUserPrefix);
  user += render_game_details(fused);
  user += kLongDescriptionUserSuffix;
  return PromptMessages({{Role::System, std::string(kLongDescriptionSystem)}, {Role::User, std::move(user)}});
}

PromptMessages build_detail_qa_prompt(std::string_view long_description, std::string_view event_info) {
  if (long_description.empty()) throw std::invalid_argument("long description is empty");
  std::string system(kDetailSystemHead);
  if (!event_info.empty()) {
    system += event_info;
    system += ' ';
  }
  system += kDetailSystemTail;
  std::string user(kCaptionUserPrefix);
  user += long_description;
  user += kDetailUserSuffix;
  return PromptMessages({{Role::System, std::move(system)}, {Role::User, std::move(user)}});
}

PromptMessages build_overview_qa_prompt(std::string_view long_description) {
  if (long_description.empty()) throw std::invalid_argument("long description is empty");
  std::string user(kCaptionUserPrefix);
  user += long_description;
  user += kOverviewUserSuffix;
  return PromptMessages({{Role::System, std::string(kOverviewSystem)}, {Role::User, std::move(user)}});
}

std::string describe_event_info(const FusedClip& fused) {
  const auto& j = fused.jerseys;
  if (const auto* pair = std::get_if<EventPair>(&fused.clip)) {
    return fmt::format("The clip shows a {} event{}, followed {} seconds later by a {} event{}.", pair->first.label,
                       team_phrase(pair->first, j), seconds_text(pair->gap_ms), pair->second.label,
                       team_phrase(pair->second, j));
  }
  const auto& e = std::get<ClipSpec>(fused.clip).anchor_event;
  return fmt::format("The clip shows a {} event{}.", e.label, team_phrase(e, j));
}

}  // namespace soccerforge
