#include "soccerforge/event_pairer.hpp"

#include <algorithm>

#include <fmt/format.h>

#include "soccerforge/clip_segmenter.hpp"

namespace soccerforge {

std::string_view to_string(SegmentRole r) {
  switch (r) {
    case SegmentRole::Start: return "Start";
    case SegmentRole::End: return "End";
    case SegmentRole::Unrelated: return "Unrelated";
  }
  return "Unrelated";
}

std::vector<EventPairCandidate> find_consecutive(std::span<const EventLabel> events, const PairConfig& cfg) {
  std::vector<EventPairCandidate> out;
  for (std::size_t i = 1; i < events.size(); ++i) {
    const auto& a = events[i - 1];
    const auto& b = events[i];
    if (a.half != b.half) continue;
    auto gap = b.timestamp_ms - a.timestamp_ms;
    if (gap >= cfg.gap_min_ms && gap <= cfg.gap_max_ms) out.emplace_back(a, b);
  }
  return out;
}

namespace {

bool in_replay(const MatchAnnotations& a, int half, std::int64_t t) {
  return std::any_of(a.camera.begin(), a.camera.end(), [&](const CameraSegment& s) {
    return s.half == half && s.kind == CameraKind::Replay && s.span.contains(t);
  });
}

}  // namespace

bool validate_not_replay(const EventPairCandidate& pair, const MatchAnnotations& a) {
  const auto& [first, second] = pair;
  if (in_replay(a, first.half, first.timestamp_ms) || in_replay(a, second.half, second.timestamp_ms)) return false;
  // Same-label re-annotation of a replayed action; subsumed by the rule above
  // but kept explicit.
  if (first.label == second.label && in_replay(a, second.half, second.timestamp_ms)) return false;
  return true;
}

EventPair fit_pair_window(const EventPairCandidate& pair, const MatchAnnotations& a, const PairConfig& cfg) {
  const auto& [first, second] = pair;
  EventPair out;
  out.first = first;
  out.second = second;
  out.gap_ms = second.timestamp_ms - first.timestamp_ms;
  // Both events must lie in the half-open span, so the span needs gap + 1 ms.
  if (out.gap_ms < 0 || out.gap_ms + 1 > cfg.max_clip_ms) {
    throw WindowImpossible(fmt::format("gap {} ms cannot fit a {} ms clip", out.gap_ms, cfg.max_clip_ms));
  }

  std::int64_t lead = std::min(cfg.lead_ms, first.timestamp_ms);
  std::int64_t tail = std::max<std::int64_t>(cfg.tail_ms, 1);
  std::int64_t excess = lead + out.gap_ms + tail - cfg.max_clip_ms;
  if (excess > 0) {
    std::int64_t cut_lead = excess / 2;
    std::int64_t cut_tail = excess - cut_lead;
    if (cut_tail > tail - 1) {
      cut_lead += cut_tail - (tail - 1);
      cut_tail = tail - 1;
    }
    if (cut_lead > lead) {
      cut_tail += cut_lead - lead;
      cut_lead = lead;
    }
    lead -= cut_lead;
    tail -= cut_tail;
  }
  out.span = TimeSpan{first.timestamp_ms - lead, second.timestamp_ms + tail};
  out.flagged_long = out.span.duration() > cfg.flag_ms;

  for (const auto& seg : a.camera) {
    if (seg.half != first.half || !seg.span.intersects(out.span)) continue;
    SegmentRole role = SegmentRole::Unrelated;
    if (seg.span.contains(first.timestamp_ms)) {
      role = SegmentRole::Start;
    } else if (seg.span.contains(second.timestamp_ms)) {
      role = SegmentRole::End;
    }
    out.role_tags.push_back(RoleTag{seg.kind, seg.span, role});
  }
  out.valid = out.gap_ms >= cfg.gap_min_ms && out.gap_ms <= cfg.gap_max_ms && validate_not_replay(pair, a);
  return out;
}

std::vector<EventPair> pair_match(const MatchAnnotations& a, const PairConfig& cfg) {
  std::vector<EventPair> out;
  auto tag = match_tag(a.match_id);
  for (const auto& candidate : find_consecutive(a.events, cfg)) {
    if (!validate_not_replay(candidate, a)) continue;
    auto pair = fit_pair_window(candidate, a, cfg);
    pair.clip_id = fmt::format("{}-p{:04d}", tag, out.size() + 1);
    out.push_back(std::move(pair));
  }
  return out;
}

json pair_record(const EventPair& p) {
  json tags = json::array();
  for (const auto& t : p.role_tags) {
    tags.push_back({{"kind", to_string(t.kind)}, {"span", t.span}, {"role", to_string(t.role)}});
  }
  return json{{"clip_id", p.clip_id},
              {"match_id", p.first.match.key()},
              {"half", p.first.half},
              {"span", p.span},
              {"first", p.first},
              {"second", p.second},
              {"label", p.first.label + "--" + p.second.label},
              {"kind", "RealTime"},
              {"gap_ms", p.gap_ms},
              {"flagged_long", p.flagged_long},
              {"valid", p.valid},
              {"role_tags", std::move(tags)},
              {"paired_with", nullptr},
              {"truncated", false}};
}

EventPair pair_from_record(const json& r) {
  EventPair p;
  r.at("clip_id").get_to(p.clip_id);
  r.at("first").get_to(p.first);
  r.at("second").get_to(p.second);
  r.at("gap_ms").get_to(p.gap_ms);
  r.at("span").get_to(p.span);
  r.at("flagged_long").get_to(p.flagged_long);
  r.at("valid").get_to(p.valid);
  for (const auto& t : r.at("role_tags")) {
    RoleTag tag;
    tag.kind = parse_camera_kind(t.at("kind").get<std::string>()).value_or(CameraKind::RealTime);
    t.at("span").get_to(tag.span);
    auto role = t.at("role").get<std::string>();
    tag.role = role == "Start" ? SegmentRole::Start : role == "End" ? SegmentRole::End : SegmentRole::Unrelated;
    p.role_tags.push_back(tag);
  }
  return p;
}

}  // namespace soccerforge
