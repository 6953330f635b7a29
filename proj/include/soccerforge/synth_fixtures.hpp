#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "soccerforge/annotations.hpp"

namespace soccerforge {

/// Scene counts for one synthetic match. Scenes occupy disjoint 60 s slots,
/// so their outcomes do not interact.
struct SynthParams {
  int single_events = 10;       // isolated event, full real-time window
  int replays = 0;              // event followed 5-8 s later by its replay
  int valid_pairs = 0;          // two events, gap cycled through pair_gaps_ms
  std::vector<std::int64_t> pair_gaps_ms{1000, 3500, 7000};
  int excluded_gap_pairs = 0;   // two events 0.9 s or 7.1 s apart
  int replay_duplicates = 0;    // event plus a same-label re-annotation inside the replay
  int uncovered_events = 0;     // a replay starts less than 5 s after the event
  double caption_rate = 1.0;    // chance that an anchor event gets an in-window caption
  std::int64_t half_ms = 2'700'000;
  bool with_roster = true;
  std::optional<MatchId> match_id;
};

class InfeasibleParams : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct PlantedClip {
  int half = 1;
  CameraKind kind = CameraKind::RealTime;
  std::int64_t anchor_ms = 0;
  TimeSpan span;
  bool truncated = false;
  bool fused = false;  // some caption falls in the anchor's caption window
};

struct PlantedPair {
  int half = 1;
  std::int64_t first_ms = 0;
  std::int64_t second_ms = 0;
  TimeSpan span;
  bool fused = false;
};

struct GroundTruthBook {
  int planted_single_events = 0;  // real-time single-event clips
  int planted_valid_pairs = 0;
  int planted_replays = 0;        // paired replay clips
  int planted_caption_hits = 0;   // captions placed inside their event's window
  int planted_rejected_duplicates = 0;
  int planted_excluded_gaps = 0;
  int planted_uncovered_events = 0;
  int expected_fused_singles = 0;  // real-time and replay clips with a caption
  int expected_fused_pairs = 0;

  std::vector<PlantedClip> realtime_clips;
  std::vector<PlantedClip> replay_clips;
  std::vector<PlantedPair> pairs;
  std::vector<std::int64_t> caption_hits;
  std::vector<bool> asr_overlaps_replay;  // parallel to the normalized asr list
};

json book_json(const GroundTruthBook& book);

/// Deterministic for a given (seed, params). The result is normalized and
/// passes validate() without errors.
std::pair<MatchAnnotations, GroundTruthBook> generate_match(std::uint64_t seed, const SynthParams& params = {});

/// Scene mix used for corpus generation: a bit of everything.
SynthParams corpus_params(std::uint64_t seed);

}  // namespace soccerforge
