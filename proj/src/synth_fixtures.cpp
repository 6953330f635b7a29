#include "soccerforge/synth_fixtures.hpp"

#include <algorithm>
#include <random>
#include <set>

#include <fmt/format.h>

namespace soccerforge {
namespace {

constexpr std::int64_t kSlotMs = 60000;
constexpr std::int64_t kFirstSlotMs = 30000;
constexpr std::int64_t kAnchorOffsetMs = 10000;  // event time relative to slot start
constexpr std::int64_t kReplayLabelLimitMs = 10000;
const char* kRealTimeLabel = "Main camera center";
const char* kReplayLabel = "Close-up player or field referee";

// Library distributions are implementation-defined; these are not.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::int64_t uniform(std::int64_t lo, std::int64_t hi) {
    const auto bound = static_cast<std::uint64_t>(hi - lo) + 1;
    const std::uint64_t limit = std::mt19937_64::max() - (std::mt19937_64::max() % bound);
    std::uint64_t r;
    do {
      r = gen_();
    } while (r >= limit);
    return lo + static_cast<std::int64_t>(r % bound);
  }

  bool chance(double p) { return static_cast<double>(gen_() >> 11) * 0x1.0p-53 < p; }

  template <typename T>
  const T& pick(const std::vector<T>& v) {
    return v[static_cast<std::size_t>(uniform(0, static_cast<std::int64_t>(v.size()) - 1))];
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[static_cast<std::size_t>(uniform(0, static_cast<std::int64_t>(i) - 1))]);
    }
  }

 private:
  std::mt19937_64 gen_;
};

enum class Scene { Single, Replay, Pair, ExcludedGap, Duplicate, Uncovered };

const std::vector<std::string> kColors{"red",   "blue",  "white",           "yellow",
                                       "green", "black", "blue/red stripe", "turquoise/teal"};
const std::vector<std::string> kSyllables{"ka", "lo", "ven", "dri", "mar", "tos", "bel", "ru",
                                          "sen", "zi", "gor", "an", "vik", "ol", "pe", "nu"};
const std::vector<std::string> kAsrWords{"what", "a",     "ball",  "from",    "the",  "left",  "and",  "he",
                                         "shoots", "great", "save", "pressure", "now", "on",    "goal", "keeper",
                                         "through", "pass", "into", "box",     "cross", "header", "wide", "corner"};
const std::vector<std::string> kCaptionPhrases{
    "scores a brilliant goal!", "goes down after a heavy challenge.", "whips a cross into the box.",
    "sends a shot just wide.", "takes a quick throw-in.",           "wins the ball back in midfield."};

std::string capitalize(std::string s) {
  if (!s.empty()) s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
  return s;
}

std::string make_name(Rng& rng, std::set<std::string>& used) {
  static const std::set<std::string> forbidden = [] {
    std::set<std::string> f{"team", "player", "jerseyed", "stripe", "teal", "turquoise"};
    for (const auto& c : kColors) f.insert(c);
    for (const auto& w : kAsrWords) f.insert(w);
    return f;
  }();
  while (true) {
    std::string name;
    const auto parts = rng.uniform(2, 3);
    for (int i = 0; i < parts; ++i) name += rng.pick(kSyllables);
    if (forbidden.contains(name) || !used.insert(name).second) continue;
    return capitalize(name);
  }
}

Team pick_team(Rng& rng) {
  const auto r = rng.uniform(0, 19);
  return r < 9 ? Team::Home : r < 18 ? Team::Away : Team::None;
}

struct HalfLayout {
  std::vector<TimeSpan> replays;
};

}  // namespace

json book_json(const GroundTruthBook& b) {
  auto clip_json = [](const PlantedClip& c) {
    return json{{"half", c.half},   {"kind", to_string(c.kind)}, {"anchor_ms", c.anchor_ms},
                {"span", c.span},   {"truncated", c.truncated},  {"fused", c.fused}};
  };
  json rt = json::array(), rp = json::array(), pairs = json::array();
  for (const auto& c : b.realtime_clips) rt.push_back(clip_json(c));
  for (const auto& c : b.replay_clips) rp.push_back(clip_json(c));
  for (const auto& p : b.pairs) {
    pairs.push_back({{"half", p.half}, {"first_ms", p.first_ms}, {"second_ms", p.second_ms}, {"span", p.span},
                     {"fused", p.fused}});
  }
  return json{{"planted_single_events", b.planted_single_events},
              {"planted_valid_pairs", b.planted_valid_pairs},
              {"planted_replays", b.planted_replays},
              {"planted_caption_hits", b.planted_caption_hits},
              {"planted_rejected_duplicates", b.planted_rejected_duplicates},
              {"planted_excluded_gaps", b.planted_excluded_gaps},
              {"planted_uncovered_events", b.planted_uncovered_events},
              {"expected_fused_singles", b.expected_fused_singles},
              {"expected_fused_pairs", b.expected_fused_pairs},
              {"realtime_clips", rt},
              {"replay_clips", rp},
              {"pairs", pairs},
              {"caption_hits", b.caption_hits},
              {"asr_overlaps_replay", b.asr_overlaps_replay}};
}

std::pair<MatchAnnotations, GroundTruthBook> generate_match(std::uint64_t seed, const SynthParams& p) {
  for (int count : {p.single_events, p.replays, p.valid_pairs, p.excluded_gap_pairs, p.replay_duplicates,
                    p.uncovered_events}) {
    if (count < 0) throw InfeasibleParams("scene counts must be >= 0");
  }
  if (p.valid_pairs > 0 && p.pair_gaps_ms.empty()) throw InfeasibleParams("valid pairs need at least one gap");
  for (auto g : p.pair_gaps_ms) {
    if (g < 1000 || g > 7000) throw InfeasibleParams(fmt::format("pair gap {} ms is outside the 1-7 s quota", g));
  }
  if (p.caption_rate < 0.0 || p.caption_rate > 1.0) throw InfeasibleParams("caption_rate must lie in [0, 1]");
  const std::int64_t slots_per_half = p.half_ms < kFirstSlotMs + kSlotMs ? 0 : (p.half_ms - kFirstSlotMs) / kSlotMs;
  const std::int64_t scenes = std::int64_t{p.single_events} + p.replays + p.valid_pairs + p.excluded_gap_pairs +
                              p.replay_duplicates + p.uncovered_events;
  if (scenes > 2 * slots_per_half) {
    throw InfeasibleParams(fmt::format("{} scenes do not fit in {} slots of {} ms", scenes, 2 * slots_per_half,
                                       kSlotMs));
  }

  Rng rng(seed);
  MatchAnnotations a;
  a.match_id = p.match_id.value_or(MatchId{"synth-league", "2024-2025", fmt::format("s{:06d}", seed)});
  const auto& labels = LabelSet::soccernet_v2().labels();

  // Jerseys and roster.
  const auto home = static_cast<std::size_t>(rng.uniform(0, static_cast<std::int64_t>(kColors.size()) - 1));
  auto away = static_cast<std::size_t>(rng.uniform(0, static_cast<std::int64_t>(kColors.size()) - 2));
  if (away >= home) ++away;
  a.jerseys = JerseyColors{a.match_id, kColors[home], kColors[away]};

  std::set<std::string> used_names;
  std::vector<std::string> home_names, away_names;
  Roster roster{a.match_id, {}};
  for (Team side : {Team::Home, Team::Away}) {
    auto& names = side == Team::Home ? home_names : away_names;
    roster.entries.push_back({make_name(rng, used_names) + " FC", side, RosterKind::Team});
    names.push_back(roster.entries.back().surface_name);
    for (int i = 0; i < 5; ++i) {
      roster.entries.push_back({make_name(rng, used_names), side, RosterKind::Player});
      names.push_back(roster.entries.back().surface_name);
    }
  }
  if (p.with_roster) a.roster = roster;

  // Scene placement.
  std::vector<Scene> order;
  auto add = [&](Scene s, int n) { order.insert(order.end(), static_cast<std::size_t>(n), s); };
  add(Scene::Single, p.single_events);
  add(Scene::Replay, p.replays);
  add(Scene::Pair, p.valid_pairs);
  add(Scene::ExcludedGap, p.excluded_gap_pairs);
  add(Scene::Duplicate, p.replay_duplicates);
  add(Scene::Uncovered, p.uncovered_events);
  rng.shuffle(order);
  std::vector<std::int64_t> slots(static_cast<std::size_t>(2 * slots_per_half));
  for (std::size_t i = 0; i < slots.size(); ++i) slots[i] = static_cast<std::int64_t>(i);
  rng.shuffle(slots);
  slots.resize(order.size());
  std::vector<std::size_t> by_slot(order.size());
  for (std::size_t i = 0; i < by_slot.size(); ++i) by_slot[i] = i;
  std::sort(by_slot.begin(), by_slot.end(), [&](std::size_t x, std::size_t y) { return slots[x] < slots[y]; });

  GroundTruthBook book;
  HalfLayout layout[2];
  std::vector<EventLabel> anchors;  // events that anchor a real-time clip
  std::size_t pair_index = 0;
  int excluded_index = 0;

  auto event = [&](int half, std::int64_t t, std::string label, Team team) {
    a.events.push_back(EventLabel{a.match_id, half, t, std::move(label), team});
    return a.events.back();
  };
  auto realtime_clip = [&](int half, std::int64_t t) {
    book.realtime_clips.push_back({half, CameraKind::RealTime, t, TimeSpan{t - 5000, t + 5000}, false, false});
  };

  for (std::size_t k : by_slot) {
    const int half = slots[k] < slots_per_half ? 1 : 2;
    const std::int64_t slot = slots[k] % slots_per_half;
    const std::int64_t start = kFirstSlotMs + slot * kSlotMs;
    const std::int64_t t = start + kAnchorOffsetMs;
    auto& replays = layout[half - 1].replays;

    switch (order[k]) {
      case Scene::Single: {
        anchors.push_back(event(half, t, rng.pick(labels), pick_team(rng)));
        realtime_clip(half, t);
        // A replay ending exactly at the window start must not block the clip.
        if (rng.chance(0.5)) replays.push_back(TimeSpan{t - 9000, t - 5000});
        break;
      }
      case Scene::Replay: {
        anchors.push_back(event(half, t, rng.pick(labels), pick_team(rng)));
        realtime_clip(half, t);
        const auto r = t + rng.uniform(5000, 8000);
        const auto len = rng.uniform(4000, 16000);
        replays.push_back(TimeSpan{r, r + len});
        book.replay_clips.push_back({half, CameraKind::Replay, t,
                                     TimeSpan{r, r + std::min(len, kReplayLabelLimitMs)}, len > kReplayLabelLimitMs,
                                     false});
        break;
      }
      case Scene::Pair: {
        const auto g = p.pair_gaps_ms[pair_index++ % p.pair_gaps_ms.size()];
        anchors.push_back(event(half, t, rng.pick(labels), pick_team(rng)));
        anchors.push_back(event(half, t + g, rng.pick(labels), pick_team(rng)));
        realtime_clip(half, t);
        realtime_clip(half, t + g);
        const std::int64_t excess = std::max<std::int64_t>(0, g - 5000);
        const std::int64_t cut_lead = excess / 2;
        book.pairs.push_back({half, t, t + g, TimeSpan{t - 2000 + cut_lead, t + g + 3000 - (excess - cut_lead)},
                              false});
        break;
      }
      case Scene::ExcludedGap: {
        const std::int64_t g = (excluded_index++ % 2 == 0) ? 900 : 7100;
        anchors.push_back(event(half, t, rng.pick(labels), pick_team(rng)));
        anchors.push_back(event(half, t + g, rng.pick(labels), pick_team(rng)));
        realtime_clip(half, t);
        realtime_clip(half, t + g);
        ++book.planted_excluded_gaps;
        break;
      }
      case Scene::Duplicate: {
        const auto label = rng.pick(labels);
        const auto team = pick_team(rng);
        anchors.push_back(event(half, t, label, team));
        realtime_clip(half, t);
        const auto r = t + 5000;
        const auto d = rng.uniform(1000, 2000);
        const auto len = rng.uniform(std::max<std::int64_t>(4000, d + 1000), 8000);
        replays.push_back(TimeSpan{r, r + len});
        event(half, r + d, label, team);
        book.replay_clips.push_back({half, CameraKind::Replay, t, TimeSpan{r, r + len}, false, false});
        ++book.planted_rejected_duplicates;
        break;
      }
      case Scene::Uncovered: {
        event(half, t, rng.pick(labels), pick_team(rng));
        const auto r = t + rng.uniform(1000, 4999);
        replays.push_back(TimeSpan{r, r + rng.uniform(3000, 8000)});
        ++book.planted_uncovered_events;
        break;
      }
    }

    // Commentary tiling the slot.
    std::int64_t cursor = start;
    std::string previous;
    while (cursor < start + kSlotMs) {
      const auto end = std::min(start + kSlotMs, cursor + rng.uniform(2000, 6000));
      std::string text;
      if (!rng.chance(0.05)) {
        const auto words = rng.uniform(3, 8);
        for (int w = 0; w < words; ++w) {
          std::string token;
          if (rng.chance(0.1)) {
            token = rng.pick(rng.chance(0.5) ? home_names : away_names);
          } else if (rng.chance(0.1)) {
            token = rng.pick(std::vector<std::string>{"uh", "um", "erm", "Uh,"});
          } else if (!previous.empty() && rng.chance(0.15)) {
            token = previous;
          } else {
            token = rng.pick(kAsrWords);
          }
          if (!text.empty()) text += ' ';
          text += token;
          previous = token;
        }
      }
      a.asr.push_back(AsrSegment{a.match_id, half, TimeSpan{cursor, end}, text});
      cursor = end;
    }
  }

  // Camera: replays as placed, real-time footage filling the rest of each half.
  for (int h = 1; h <= 2; ++h) {
    auto replays = layout[h - 1].replays;
    std::sort(replays.begin(), replays.end());
    std::int64_t cursor = 0;
    for (const auto& r : replays) {
      if (r.start_ms > cursor) {
        a.camera.push_back(CameraSegment{a.match_id, h, TimeSpan{cursor, r.start_ms}, CameraKind::RealTime,
                                         kRealTimeLabel});
      }
      a.camera.push_back(CameraSegment{a.match_id, h, r, CameraKind::Replay, kReplayLabel});
      cursor = r.end_ms;
    }
    if (cursor < p.half_ms) {
      a.camera.push_back(CameraSegment{a.match_id, h, TimeSpan{cursor, p.half_ms}, CameraKind::RealTime,
                                       kRealTimeLabel});
    }
  }

  // Captions: one inside the window for a share of anchors, plus decoys just
  // outside the window wherever they cannot reach another anchor's window.
  auto in_any_window = [&](int half, std::int64_t ts) {
    return std::any_of(anchors.begin(), anchors.end(), [&](const EventLabel& e) {
      return e.half == half && ts >= e.timestamp_ms + 3000 && ts <= e.timestamp_ms + 10000;
    });
  };
  auto caption_text = [&](const EventLabel& e) {
    std::string who;
    if (e.team == Team::None) {
      who = "The referee";
    } else {
      who = rng.pick(e.team == Team::Home ? home_names : away_names);
    }
    return who + " " + rng.pick(kCaptionPhrases);
  };
  for (const auto& e : anchors) {
    if (rng.chance(p.caption_rate)) {
      const auto ts = e.timestamp_ms + rng.uniform(3000, 10000);
      a.captions.push_back(Caption{a.match_id, e.half, ts, caption_text(e), false});
      book.caption_hits.push_back(ts);
    }
    for (auto ts : {e.timestamp_ms + 2999, e.timestamp_ms + 10001}) {
      if (rng.chance(0.5) && !in_any_window(e.half, ts)) {
        a.captions.push_back(Caption{a.match_id, e.half, ts, caption_text(e), false});
      }
    }
  }

  a = normalize(std::move(a));
  for (const auto& issue : validate(a)) {
    if (issue.severity == Severity::Error) {
      throw std::logic_error("synthetic match violates " + issue.code + ": " + issue.message);
    }
  }

  // Oracle bookkeeping by direct membership tests.
  auto captioned = [&](int half, std::int64_t anchor) {
    return std::any_of(a.captions.begin(), a.captions.end(), [&](const Caption& c) {
      return c.half == half && c.timestamp_ms >= anchor + 3000 && c.timestamp_ms <= anchor + 10000;
    });
  };
  auto by_time = [](const auto& x, const auto& y) {
    return std::tie(x.half, x.span.start_ms) < std::tie(y.half, y.span.start_ms);
  };
  for (auto* list : {&book.realtime_clips, &book.replay_clips}) {
    std::sort(list->begin(), list->end(), by_time);
    for (auto& c : *list) c.fused = captioned(c.half, c.anchor_ms);
  }
  std::sort(book.pairs.begin(), book.pairs.end(), by_time);
  for (auto& pr : book.pairs) pr.fused = captioned(pr.half, pr.first_ms) || captioned(pr.half, pr.second_ms);
  std::sort(book.caption_hits.begin(), book.caption_hits.end());
  for (const auto& s : a.asr) {
    book.asr_overlaps_replay.push_back(std::any_of(a.camera.begin(), a.camera.end(), [&](const CameraSegment& c) {
      return c.half == s.half && c.kind == CameraKind::Replay && c.span.intersects(s.span);
    }));
  }

  book.planted_single_events = static_cast<int>(book.realtime_clips.size());
  book.planted_replays = static_cast<int>(book.replay_clips.size());
  book.planted_valid_pairs = static_cast<int>(book.pairs.size());
  book.planted_caption_hits = static_cast<int>(book.caption_hits.size());
  for (const auto* list : {&book.realtime_clips, &book.replay_clips}) {
    book.expected_fused_singles += static_cast<int>(std::count_if(list->begin(), list->end(),
                                                                  [](const PlantedClip& c) { return c.fused; }));
  }
  book.expected_fused_pairs = static_cast<int>(
      std::count_if(book.pairs.begin(), book.pairs.end(), [](const PlantedPair& pr) { return pr.fused; }));
  return {std::move(a), std::move(book)};
}

SynthParams corpus_params(std::uint64_t seed) {
  Rng rng(seed ^ 0x5eedULL);
  SynthParams p;
  p.single_events = static_cast<int>(rng.uniform(4, 8));
  p.replays = static_cast<int>(rng.uniform(1, 4));
  p.valid_pairs = static_cast<int>(rng.uniform(2, 5));
  p.pair_gaps_ms = {1000, 7000, rng.uniform(1000, 7000), rng.uniform(1000, 7000)};
  p.excluded_gap_pairs = 2;
  p.replay_duplicates = static_cast<int>(rng.uniform(0, 2));
  p.uncovered_events = static_cast<int>(rng.uniform(0, 2));
  p.caption_rate = 0.8;
  return p;
}

}  // namespace soccerforge
