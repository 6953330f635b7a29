#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "soccerforge/annotations.hpp"

namespace soccerforge {

struct SegmenterConfig {
  std::int64_t event_window_ms = 5000;
  std::int64_t max_clip_ms = 10000;
  std::int64_t replay_lookback_ms = 30000;
};

/// A single-event clip. RealTime clips are centered on their anchor event;
/// Replay clips re-show the anchor of the RealTime clip they are paired with.
struct ClipSpec {
  std::string clip_id;
  MatchId match;
  int half = 1;
  TimeSpan span;
  EventLabel anchor_event;
  CameraKind kind = CameraKind::RealTime;
  std::optional<std::string> paired_with;
  bool truncated = false;
  std::string camera_label;

  bool operator==(const ClipSpec&) const = default;
};

/// The segment whose half-open span contains t_ms. If a RealTime and a Replay
/// segment both cover t_ms (only possible in unnormalized input), the Replay wins.
std::optional<CameraSegment> camera_interval_at(const MatchAnnotations& annotations, int half, std::int64_t t_ms);

/// RealTime clip for one event, or nullopt when the +/- window (clamped at the
/// half start) is not inside a single RealTime segment.
std::optional<ClipSpec> match_event_to_realtime(const MatchAnnotations& annotations, const EventLabel& event,
                                                const SegmenterConfig& cfg = {});

/// Emits one Replay clip per Replay segment that directly follows a RealTime
/// segment and has a RealTime clip anchored within the lookback. Sets
/// paired_with on both sides; realtime clips without an id get a provisional one.
std::vector<ClipSpec> pair_replays(const MatchAnnotations& annotations, std::vector<ClipSpec>& realtime_clips,
                                   const SegmenterConfig& cfg = {});

/// All RealTime clips plus paired Replay clips, sorted by (half, start, kind)
/// with final ids "<match tag>-sNNNN".
std::vector<ClipSpec> segment_match(const MatchAnnotations& annotations, const SegmenterConfig& cfg = {});

/// Eight hex chars identifying a match inside clip ids.
std::string match_tag(const MatchId& id);

/// Sidecar record: clip_id, match_id, half, span, label, timestamp_ms, kind,
/// camera_label, paired_with, truncated.
json clip_record(const ClipSpec& clip);
ClipSpec clip_from_record(const json& record);

}  // namespace soccerforge
