#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "soccerforge/annotations.hpp"

namespace soccerforge {

struct PairConfig {
  std::int64_t gap_min_ms = 1000;
  std::int64_t gap_max_ms = 7000;
  std::int64_t lead_ms = 2000;
  std::int64_t tail_ms = 3000;
  std::int64_t max_clip_ms = 10000;
  std::int64_t flag_ms = 8000;
};

enum class SegmentRole { Start, End, Unrelated };
std::string_view to_string(SegmentRole r);

/// Role of one camera segment overlapping a pair's span. A segment holding
/// both events is tagged Start.
struct RoleTag {
  CameraKind kind = CameraKind::RealTime;
  TimeSpan span;
  SegmentRole role = SegmentRole::Unrelated;

  bool operator==(const RoleTag&) const = default;
};

struct EventPair {
  std::string clip_id;
  EventLabel first;
  EventLabel second;
  std::int64_t gap_ms = 0;
  TimeSpan span;
  std::vector<RoleTag> role_tags;
  bool flagged_long = false;
  bool valid = false;

  bool operator==(const EventPair&) const = default;
};

using EventPairCandidate = std::pair<EventLabel, EventLabel>;

class WindowImpossible : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Adjacent same-half events whose gap lies in [gap_min_ms, gap_max_ms].
std::vector<EventPairCandidate> find_consecutive(std::span<const EventLabel> events, const PairConfig& cfg = {});

/// False when either event sits in Replay footage.
bool validate_not_replay(const EventPairCandidate& pair, const MatchAnnotations& annotations);

/// Pads the pair by lead/tail, shrinks symmetrically to max_clip_ms and tags
/// overlapping camera segments. Throws WindowImpossible when the gap alone does
/// not fit.
EventPair fit_pair_window(const EventPairCandidate& pair, const MatchAnnotations& annotations,
                          const PairConfig& cfg = {});

/// Valid pairs of one match, ids "<match tag>-pNNNN" in time order.
std::vector<EventPair> pair_match(const MatchAnnotations& annotations, const PairConfig& cfg = {});

json pair_record(const EventPair& pair);
EventPair pair_from_record(const json& record);

}  // namespace soccerforge
