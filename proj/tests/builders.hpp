#pragma once

#include <string>

#include "soccerforge/annotations.hpp"

namespace testutil {

using namespace soccerforge;

inline MatchId test_match() { return {"test-league", "2020-2021", "home-away"}; }

/// Empty match with jerseys red (home) vs blue (away).
inline MatchAnnotations blank_match() {
  MatchAnnotations a;
  a.match_id = test_match();
  a.jerseys = {a.match_id, "red", "blue"};
  return a;
}

inline EventLabel event(std::int64_t t, std::string label = "Goal", Team team = Team::Home, int half = 1) {
  return {test_match(), half, t, std::move(label), team};
}

inline CameraSegment camera(std::int64_t start, std::int64_t end, CameraKind kind = CameraKind::RealTime,
                            int half = 1) {
  std::string label = kind == CameraKind::Replay ? "Close-up player or field referee" : "Main camera center";
  return {test_match(), half, {start, end}, kind, label};
}

inline Caption caption(std::int64_t t, std::string text, int half = 1) {
  return {test_match(), half, t, std::move(text), false};
}

inline AsrSegment asr(std::int64_t start, std::int64_t end, std::string text, int half = 1) {
  return {test_match(), half, {start, end}, std::move(text)};
}

}  // namespace testutil
