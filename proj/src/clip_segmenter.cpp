#include "soccerforge/clip_segmenter.hpp"

#include <algorithm>
#include <map>
#include <tuple>

#include <fmt/format.h>

#include "soccerforge/hashing.hpp"

namespace soccerforge {

std::string match_tag(const MatchId& id) { return short_hash(id.key(), 8); }

std::optional<CameraSegment> camera_interval_at(const MatchAnnotations& a, int half, std::int64_t t_ms) {
  std::optional<CameraSegment> found;
  for (const auto& seg : a.camera) {
    if (seg.half != half || !seg.span.contains(t_ms)) continue;
    if (!found || seg.kind == CameraKind::Replay) found = seg;
  }
  return found;
}

namespace {

// Shrinks `span` to max_ms around `anchor`, staying inside the original span.
TimeSpan trim_around(const TimeSpan& span, std::int64_t anchor, std::int64_t max_ms) {
  if (span.duration() <= max_ms) return span;
  std::int64_t start = anchor - max_ms / 2;
  start = std::clamp(start, span.start_ms, span.end_ms - max_ms);
  return TimeSpan{start, start + max_ms};
}

}  // namespace

std::optional<ClipSpec> match_event_to_realtime(const MatchAnnotations& a, const EventLabel& event,
                                                const SegmenterConfig& cfg) {
  auto seg = camera_interval_at(a, event.half, event.timestamp_ms);
  if (!seg || seg->kind != CameraKind::RealTime) return std::nullopt;

  TimeSpan window{std::max<std::int64_t>(0, event.timestamp_ms - cfg.event_window_ms),
                  event.timestamp_ms + cfg.event_window_ms};
  if (!seg->span.contains(window)) return std::nullopt;
  for (const auto& other : a.camera) {
    if (other.half == event.half && other.kind == CameraKind::Replay && other.span.intersects(window)) {
      return std::nullopt;
    }
  }

  ClipSpec clip;
  clip.match = event.match;
  clip.half = event.half;
  clip.anchor_event = event;
  clip.kind = CameraKind::RealTime;
  clip.camera_label = seg->camera_label;
  clip.truncated = window.duration() > cfg.max_clip_ms;
  clip.span = trim_around(window, event.timestamp_ms, cfg.max_clip_ms);
  return clip;
}

std::vector<ClipSpec> pair_replays(const MatchAnnotations& a, std::vector<ClipSpec>& realtime_clips,
                                   const SegmenterConfig& cfg) {
  for (std::size_t i = 0; i < realtime_clips.size(); ++i) {
    if (realtime_clips[i].clip_id.empty()) realtime_clips[i].clip_id = fmt::format("rt{}", i);
  }

  std::vector<ClipSpec> replays;
  for (const auto& replay : a.camera) {
    if (replay.kind != CameraKind::Replay) continue;
    bool transition = std::any_of(a.camera.begin(), a.camera.end(), [&](const CameraSegment& s) {
      return s.half == replay.half && s.kind == CameraKind::RealTime && s.span.end_ms == replay.span.start_ms;
    });
    if (!transition) continue;

    ClipSpec* best = nullptr;
    for (auto& rt : realtime_clips) {
      if (rt.kind != CameraKind::RealTime || rt.half != replay.half) continue;
      auto t = rt.anchor_event.timestamp_ms;
      if (t >= replay.span.start_ms || replay.span.start_ms - t > cfg.replay_lookback_ms) continue;
      if (!best || t >= best->anchor_event.timestamp_ms) best = &rt;
    }
    // The most recent action already has its replay; an older action is not a
    // plausible subject, so this replay stays unpaired.
    if (!best || best->paired_with) continue;

    ClipSpec clip;
    clip.clip_id = fmt::format("rp{}", replays.size());
    clip.match = replay.match;
    clip.half = replay.half;
    clip.anchor_event = best->anchor_event;
    clip.kind = CameraKind::Replay;
    clip.camera_label = replay.camera_label;
    clip.truncated = replay.span.duration() > cfg.max_clip_ms;
    clip.span = TimeSpan{replay.span.start_ms, std::min(replay.span.end_ms, replay.span.start_ms + cfg.max_clip_ms)};
    clip.paired_with = best->clip_id;
    best->paired_with = clip.clip_id;
    replays.push_back(std::move(clip));
  }
  return replays;
}

std::vector<ClipSpec> segment_match(const MatchAnnotations& a, const SegmenterConfig& cfg) {
  std::vector<ClipSpec> clips;
  for (const auto& e : a.events) {
    if (auto clip = match_event_to_realtime(a, e, cfg)) clips.push_back(std::move(*clip));
  }
  auto replays = pair_replays(a, clips, cfg);
  clips.insert(clips.end(), std::make_move_iterator(replays.begin()), std::make_move_iterator(replays.end()));

  std::stable_sort(clips.begin(), clips.end(), [](const ClipSpec& x, const ClipSpec& y) {
    return std::tie(x.half, x.span.start_ms, x.kind, x.anchor_event) <
           std::tie(y.half, y.span.start_ms, y.kind, y.anchor_event);
  });

  auto tag = match_tag(a.match_id);
  std::map<std::string, std::string> renamed;
  for (std::size_t i = 0; i < clips.size(); ++i) {
    auto id = fmt::format("{}-s{:04d}", tag, i + 1);
    renamed[clips[i].clip_id] = id;
    clips[i].clip_id = id;
  }
  for (auto& c : clips) {
    if (c.paired_with) c.paired_with = renamed.at(*c.paired_with);
  }
  return clips;
}

json clip_record(const ClipSpec& c) {
  return json{{"clip_id", c.clip_id},
              {"match_id", c.match.key()},
              {"half", c.half},
              {"span", c.span},
              {"label", c.anchor_event.label},
              {"timestamp_ms", c.anchor_event.timestamp_ms},
              {"team", to_string(c.anchor_event.team)},
              {"kind", to_string(c.kind)},
              {"camera_label", c.camera_label},
              {"paired_with", c.paired_with ? json(*c.paired_with) : json(nullptr)},
              {"truncated", c.truncated}};
}

ClipSpec clip_from_record(const json& r) {
  ClipSpec c;
  r.at("clip_id").get_to(c.clip_id);
  c.match = MatchId::from_key(r.at("match_id").get<std::string>());
  r.at("half").get_to(c.half);
  r.at("span").get_to(c.span);
  c.anchor_event.match = c.match;
  c.anchor_event.half = c.half;
  r.at("label").get_to(c.anchor_event.label);
  r.at("timestamp_ms").get_to(c.anchor_event.timestamp_ms);
  c.anchor_event.team = parse_team(r.value("team", std::string("None"))).value_or(Team::None);
  auto kind = parse_camera_kind(r.at("kind").get<std::string>());
  if (!kind) throw std::invalid_argument("bad clip kind");
  c.kind = *kind;
  c.camera_label = r.value("camera_label", std::string());
  if (!r.at("paired_with").is_null()) c.paired_with = r.at("paired_with").get<std::string>();
  r.at("truncated").get_to(c.truncated);
  return c;
}

}  // namespace soccerforge
