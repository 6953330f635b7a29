#include "soccerforge/text_fusion.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>

namespace soccerforge {
namespace {

char fold_char(char c) { return static_cast<char>(std::tolower(static_cast<unsigned char>(c))); }

bool is_word_char(char c) {
  auto u = static_cast<unsigned char>(c);
  return std::isalnum(u) || u >= 0x80;
}

bool iequal_at(std::string_view text, std::size_t pos, std::string_view folded) {
  if (pos + folded.size() > text.size()) return false;
  for (std::size_t k = 0; k < folded.size(); ++k) {
    if (fold_char(text[pos + k]) != folded[k]) return false;
  }
  return true;
}

std::string token_key(std::string_view token) {
  std::size_t b = 0, e = token.size();
  while (b < e && std::ispunct(static_cast<unsigned char>(token[b]))) ++b;
  while (e > b && std::ispunct(static_cast<unsigned char>(token[e - 1]))) --e;
  std::string key(b == e ? token : token.substr(b, e - b));
  for (auto& c : key) c = fold_char(c);
  return key;
}

}  // namespace

TimeSpan caption_window(const EventLabel& event, const FusionConfig& cfg) {
  return TimeSpan{event.timestamp_ms + cfg.caption_lead_ms, event.timestamp_ms + cfg.caption_tail_ms};
}

bool caption_in_window(const TimeSpan& window, std::int64_t t) {
  return t >= window.start_ms && t <= window.end_ms;
}

std::string anonymize(std::string_view text, const Roster& roster, const JerseyColors& jerseys) {
  struct Rule {
    std::string folded;
    std::string replacement;
  };
  std::vector<Rule> rules;
  for (const auto& e : roster.entries) {
    if (e.surface_name.empty()) continue;
    Rule r;
    for (char c : e.surface_name) r.folded.push_back(fold_char(c));
    r.replacement = jerseys.color_of(e.side) + "-jerseyed team";
    if (e.kind == RosterKind::Player) r.replacement += " player";
    rules.push_back(std::move(r));
  }
  std::stable_sort(rules.begin(), rules.end(),
                   [](const Rule& a, const Rule& b) { return a.folded.size() > b.folded.size(); });

  std::string out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    bool boundary_before = i == 0 || !is_word_char(text[i - 1]);
    const Rule* hit = nullptr;
    if (boundary_before) {
      for (const auto& r : rules) {
        auto end = i + r.folded.size();
        if (iequal_at(text, i, r.folded) && (end == text.size() || !is_word_char(text[end]))) {
          hit = &r;
          break;
        }
      }
    }
    if (hit) {
      out += hit->replacement;
      i += hit->folded.size();
    } else {
      out.push_back(text[i]);
      ++i;
    }
  }
  return out;
}

std::string filter_asr(std::span<const AsrSegment> asr, std::span<const CameraSegment> camera,
                       const TimeSpan& clip_span, const FusionConfig& cfg) {
  std::vector<const AsrSegment*> kept;
  for (const auto& seg : asr) {
    if (!seg.span.intersects(clip_span)) continue;
    bool replay = std::any_of(camera.begin(), camera.end(), [&](const CameraSegment& c) {
      return c.kind == CameraKind::Replay && c.span.intersects(seg.span);
    });
    if (!replay) kept.push_back(&seg);
  }
  std::stable_sort(kept.begin(), kept.end(),
                   [](const AsrSegment* a, const AsrSegment* b) { return a->span < b->span; });

  std::set<std::string> fillers;
  for (const auto& f : cfg.filler_tokens) fillers.insert(token_key(f));

  std::string out;
  std::string last_key;
  for (const auto* seg : kept) {
    std::istringstream words(seg->text);
    std::string token;
    while (words >> token) {
      auto key = token_key(token);
      if (fillers.contains(key)) continue;
      if (cfg.collapse_repeats && !out.empty() && key == last_key) continue;
      if (!out.empty()) out.push_back(' ');
      out += token;
      last_key = std::move(key);
    }
  }
  return out;
}

const std::string& clip_id_of(const ClipVariant& clip) {
  return std::visit([](const auto& c) -> const std::string& { return c.clip_id; }, clip);
}

const MatchId& match_of(const ClipVariant& clip) {
  if (const auto* c = std::get_if<ClipSpec>(&clip)) return c->match;
  return std::get<EventPair>(clip).first.match;
}

int half_of(const ClipVariant& clip) {
  if (const auto* c = std::get_if<ClipSpec>(&clip)) return c->half;
  return std::get<EventPair>(clip).first.half;
}

const TimeSpan& span_of(const ClipVariant& clip) {
  return std::visit([](const auto& c) -> const TimeSpan& { return c.span; }, clip);
}

std::vector<EventLabel> anchors_of(const ClipVariant& clip) {
  if (const auto* c = std::get_if<ClipSpec>(&clip)) return {c->anchor_event};
  const auto& p = std::get<EventPair>(clip);
  return {p.first, p.second};
}

bool is_paired_event(const ClipVariant& clip) { return std::holds_alternative<EventPair>(clip); }

std::optional<FusedClip> fuse(const ClipVariant& clip, const MatchAnnotations& a, const FusionConfig& cfg) {
  const int half = half_of(clip);
  std::vector<TimeSpan> windows;
  for (const auto& e : anchors_of(clip)) windows.push_back(caption_window(e, cfg));

  FusedClip fused;
  fused.clip = clip;
  fused.jerseys = a.jerseys;
  if (!a.roster) {
    fused.issues.push_back({"MissingRoster", Severity::Warning, clip_id_of(clip),
                            "no roster; captions passed through without anonymization"});
  }
  for (const auto& cap : a.captions) {
    if (cap.half != half) continue;
    bool aligned = std::any_of(windows.begin(), windows.end(),
                               [&](const TimeSpan& w) { return caption_in_window(w, cap.timestamp_ms); });
    if (!aligned) continue;
    if (cap.anonymized || !a.roster) {
      fused.captions.push_back(cap.text);
    } else {
      fused.captions.push_back(anonymize(cap.text, *a.roster, a.jerseys));
    }
  }
  if (fused.captions.empty()) return std::nullopt;

  std::vector<AsrSegment> asr;
  for (const auto& s : a.asr) {
    if (s.half == half) asr.push_back(s);
  }
  fused.commentary = filter_asr(asr, segments_of(a, half), span_of(clip), cfg);
  return fused;
}

json fused_record(const FusedClip& f) {
  json issues = json::array();
  for (const auto& i : f.issues) issues.push_back(i);
  json clip = is_paired_event(f.clip) ? pair_record(std::get<EventPair>(f.clip))
                                      : clip_record(std::get<ClipSpec>(f.clip));
  return json{{"clip_id", clip_id_of(f.clip)},
              {"match_id", match_of(f.clip).key()},
              {"clip_type", is_paired_event(f.clip) ? "pair" : "single"},
              {"clip", std::move(clip)},
              {"captions", f.captions},
              {"commentary", f.commentary},
              {"jerseys", f.jerseys},
              {"issues", std::move(issues)}};
}

FusedClip fused_from_record(const json& r) {
  FusedClip f;
  if (r.at("clip_type").get<std::string>() == "pair") {
    f.clip = pair_from_record(r.at("clip"));
  } else {
    f.clip = clip_from_record(r.at("clip"));
  }
  r.at("captions").get_to(f.captions);
  r.at("commentary").get_to(f.commentary);
  r.at("jerseys").get_to(f.jerseys);
  for (const auto& i : r.at("issues")) {
    Issue issue;
    i.at("code").get_to(issue.code);
    issue.severity = i.at("severity").get<std::string>() == "Error" ? Severity::Error : Severity::Warning;
    i.at("location").get_to(issue.location);
    i.at("message").get_to(issue.message);
    f.issues.push_back(std::move(issue));
  }
  return f;
}

}  // namespace soccerforge
