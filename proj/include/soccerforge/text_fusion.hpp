#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "soccerforge/annotations.hpp"
#include "soccerforge/clip_segmenter.hpp"
#include "soccerforge/event_pairer.hpp"

namespace soccerforge {

struct FusionConfig {
  std::int64_t caption_lead_ms = 3000;
  std::int64_t caption_tail_ms = 10000;
  std::vector<std::string> filler_tokens{"uh", "um", "erm"};
  bool collapse_repeats = true;
};

/// [t + lead, t + tail]. Unlike clip spans, caption membership is closed at
/// both ends; use caption_in_window.
TimeSpan caption_window(const EventLabel& event, const FusionConfig& cfg = {});
bool caption_in_window(const TimeSpan& window, std::int64_t timestamp_ms);

/// Replaces roster surface names (case-insensitive, whole words, longest
/// first) with jersey-color phrases.
std::string anonymize(std::string_view text, const Roster& roster, const JerseyColors& jerseys);

/// Commentary for one clip: ASR text overlapping clip_span and no Replay
/// segment, with fillers stripped and immediate repeats collapsed.
/// Callers pass ASR and camera records of the clip's half only.
std::string filter_asr(std::span<const AsrSegment> asr, std::span<const CameraSegment> camera,
                       const TimeSpan& clip_span, const FusionConfig& cfg = {});

using ClipVariant = std::variant<ClipSpec, EventPair>;

const std::string& clip_id_of(const ClipVariant& clip);
const MatchId& match_of(const ClipVariant& clip);
int half_of(const ClipVariant& clip);
const TimeSpan& span_of(const ClipVariant& clip);
std::vector<EventLabel> anchors_of(const ClipVariant& clip);
bool is_paired_event(const ClipVariant& clip);

struct FusedClip {
  ClipVariant clip;
  std::vector<std::string> captions;
  std::string commentary;
  JerseyColors jerseys;
  std::vector<Issue> issues;
};

/// nullopt when no caption aligns with any anchor event.
std::optional<FusedClip> fuse(const ClipVariant& clip, const MatchAnnotations& annotations,
                              const FusionConfig& cfg = {});

json fused_record(const FusedClip& fused);
FusedClip fused_from_record(const json& record);

}  // namespace soccerforge
