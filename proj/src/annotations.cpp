#include "soccerforge/annotations.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <tuple>

#include <fmt/format.h>

#include "soccerforge/jsonl.hpp"

namespace soccerforge {
namespace fs = std::filesystem;

// --- MatchId ------------------------------------------------------------------

std::string MatchId::key() const { return league + "/" + season + "/" + fixture; }

MatchId MatchId::from_key(std::string_view key) {
  auto a = key.find('/');
  auto b = a == std::string_view::npos ? a : key.find('/', a + 1);
  if (a == std::string_view::npos || b == std::string_view::npos) {
    throw std::invalid_argument(fmt::format("match key '{}' is not league/season/fixture", key));
  }
  MatchId id{std::string(key.substr(0, a)), std::string(key.substr(a + 1, b - a - 1)),
             std::string(key.substr(b + 1))};
  if (!id.valid()) throw std::invalid_argument(fmt::format("invalid match key '{}'", key));
  return id;
}

bool MatchId::valid() const {
  auto ok = [](const std::string& s) { return !s.empty() && s.find('/') == std::string::npos; };
  return ok(league) && ok(season) && ok(fixture);
}

// --- enums --------------------------------------------------------------------

std::string_view to_string(Team t) {
  switch (t) {
    case Team::Home: return "Home";
    case Team::Away: return "Away";
    case Team::None: return "None";
  }
  return "None";
}

std::string_view to_string(CameraKind k) { return k == CameraKind::Replay ? "Replay" : "RealTime"; }
std::string_view to_string(Severity s) { return s == Severity::Error ? "Error" : "Warning"; }

std::optional<Team> parse_team(std::string_view s) {
  if (s == "Home") return Team::Home;
  if (s == "Away") return Team::Away;
  if (s == "None") return Team::None;
  return std::nullopt;
}

std::optional<CameraKind> parse_camera_kind(std::string_view s) {
  if (s == "RealTime") return CameraKind::RealTime;
  if (s == "Replay") return CameraKind::Replay;
  return std::nullopt;
}

// --- labels -------------------------------------------------------------------

LabelSet::LabelSet(std::vector<std::string> labels) : labels_(std::move(labels)) {}

const LabelSet& LabelSet::soccernet_v2() {
  static const LabelSet set({"Ball out of play", "Clearance", "Corner", "Direct free-kick", "Foul",
                             "Goal", "Indirect free-kick", "Kick-off", "Offside", "Penalty",
                             "Red card", "Shots off target", "Shots on target", "Substitution",
                             "Throw-in", "Yellow card", "Yellow->red card"});
  return set;
}

bool LabelSet::contains(std::string_view label) const {
  return std::find(labels_.begin(), labels_.end(), label) != labels_.end();
}

std::optional<ActionClass> ActionClass::parse(std::string_view text, const LabelSet& labels) {
  if (!labels.contains(text)) return std::nullopt;
  return ActionClass(std::string(text));
}

OverlapConflict::OverlapConflict(CameraSegment a, CameraSegment b)
    : AnnotationError(fmt::format("{} camera segments overlap in half {}: [{},{}) and [{},{})",
                                  to_string(a.kind), a.half, a.span.start_ms, a.span.end_ms,
                                  b.span.start_ms, b.span.end_ms)),
      a_(std::move(a)),
      b_(std::move(b)) {}

// --- JSON mapping -------------------------------------------------------------

namespace {

template <typename E, typename Parse>
E enum_field(const json& j, const char* key, Parse parse) {
  auto text = j.at(key).get<std::string>();
  auto v = parse(text);
  if (!v) throw std::invalid_argument(fmt::format("bad value '{}' for field '{}'", text, key));
  return *v;
}

}  // namespace

void to_json(json& j, const MatchId& v) {
  j = json{{"league", v.league}, {"season", v.season}, {"fixture", v.fixture}};
}
void from_json(const json& j, MatchId& v) {
  j.at("league").get_to(v.league);
  j.at("season").get_to(v.season);
  j.at("fixture").get_to(v.fixture);
}

void to_json(json& j, const TimeSpan& v) { j = json{{"start_ms", v.start_ms}, {"end_ms", v.end_ms}}; }
void from_json(const json& j, TimeSpan& v) {
  j.at("start_ms").get_to(v.start_ms);
  j.at("end_ms").get_to(v.end_ms);
}

void to_json(json& j, const EventLabel& v) {
  j = json{{"match", v.match},   {"half", v.half},
           {"timestamp_ms", v.timestamp_ms}, {"label", v.label},
           {"team", to_string(v.team)}};
}
void from_json(const json& j, EventLabel& v) {
  j.at("match").get_to(v.match);
  j.at("half").get_to(v.half);
  j.at("timestamp_ms").get_to(v.timestamp_ms);
  j.at("label").get_to(v.label);
  v.team = enum_field<Team>(j, "team", parse_team);
}

void to_json(json& j, const CameraSegment& v) {
  j = json{{"match", v.match},
           {"half", v.half},
           {"span", v.span},
           {"kind", to_string(v.kind)},
           {"camera_label", v.camera_label}};
}
void from_json(const json& j, CameraSegment& v) {
  j.at("match").get_to(v.match);
  j.at("half").get_to(v.half);
  j.at("span").get_to(v.span);
  v.kind = enum_field<CameraKind>(j, "kind", parse_camera_kind);
  j.at("camera_label").get_to(v.camera_label);
}

void to_json(json& j, const Caption& v) {
  j = json{{"match", v.match},
           {"half", v.half},
           {"timestamp_ms", v.timestamp_ms},
           {"text", v.text},
           {"anonymized", v.anonymized}};
}
void from_json(const json& j, Caption& v) {
  j.at("match").get_to(v.match);
  j.at("half").get_to(v.half);
  j.at("timestamp_ms").get_to(v.timestamp_ms);
  j.at("text").get_to(v.text);
  v.anonymized = j.value("anonymized", false);
}

void to_json(json& j, const AsrSegment& v) {
  j = json{{"match", v.match}, {"half", v.half}, {"span", v.span}, {"text", v.text}};
}
void from_json(const json& j, AsrSegment& v) {
  j.at("match").get_to(v.match);
  j.at("half").get_to(v.half);
  j.at("span").get_to(v.span);
  j.at("text").get_to(v.text);
}

void to_json(json& j, const JerseyColors& v) {
  j = json{{"match", v.match}, {"home_color", v.home_color}, {"away_color", v.away_color}};
}
void from_json(const json& j, JerseyColors& v) {
  j.at("match").get_to(v.match);
  j.at("home_color").get_to(v.home_color);
  j.at("away_color").get_to(v.away_color);
}

void to_json(json& j, const Roster& v) {
  json entries = json::array();
  for (const auto& e : v.entries) {
    entries.push_back({{"surface_name", e.surface_name},
                       {"side", to_string(e.side)},
                       {"kind", e.kind == RosterKind::Team ? "Team" : "Player"}});
  }
  j = json{{"match", v.match}, {"entries", std::move(entries)}};
}
void from_json(const json& j, Roster& v) {
  j.at("match").get_to(v.match);
  v.entries.clear();
  for (const auto& e : j.at("entries")) {
    RosterEntry entry;
    e.at("surface_name").get_to(entry.surface_name);
    entry.side = enum_field<Team>(e, "side", parse_team);
    auto kind = e.value("kind", std::string("Player"));
    if (kind == "Team") {
      entry.kind = RosterKind::Team;
    } else if (kind == "Player") {
      entry.kind = RosterKind::Player;
    } else {
      throw std::invalid_argument("bad roster kind '" + kind + "'");
    }
    v.entries.push_back(std::move(entry));
  }
}

void to_json(json& j, const Issue& v) {
  j = json{{"code", v.code},
           {"severity", to_string(v.severity)},
           {"location", v.location},
           {"message", v.message}};
}

// --- record checks --------------------------------------------------------------

namespace {

std::string fold(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

struct RecordProblem {
  std::string code;
  std::string message;
};

std::optional<RecordProblem> check_half(int half) {
  if (half != 1 && half != 2) return RecordProblem{"InvalidHalf", fmt::format("half {} not in {{1,2}}", half)};
  return std::nullopt;
}

std::optional<RecordProblem> check(const EventLabel& e) {
  if (auto p = check_half(e.half)) return p;
  if (e.timestamp_ms < 0) return RecordProblem{"NegativeTimestamp", fmt::format("timestamp {} < 0", e.timestamp_ms)};
  return std::nullopt;
}

std::optional<RecordProblem> check(const CameraSegment& c) {
  if (auto p = check_half(c.half)) return p;
  if (!c.span.valid()) return RecordProblem{"InvalidSpan", fmt::format("span [{},{}) invalid", c.span.start_ms, c.span.end_ms)};
  return std::nullopt;
}

std::optional<RecordProblem> check(const Caption& c) {
  if (auto p = check_half(c.half)) return p;
  if (c.timestamp_ms < 0) return RecordProblem{"NegativeTimestamp", fmt::format("timestamp {} < 0", c.timestamp_ms)};
  if (c.text.empty()) return RecordProblem{"EmptyCaption", "caption text is empty"};
  return std::nullopt;
}

std::optional<RecordProblem> check(const AsrSegment& a) {
  if (auto p = check_half(a.half)) return p;
  if (!a.span.valid()) return RecordProblem{"InvalidSpan", fmt::format("span [{},{}) invalid", a.span.start_ms, a.span.end_ms)};
  return std::nullopt;
}

std::optional<RecordProblem> check(const JerseyColors& j) {
  if (j.home_color.empty() || j.away_color.empty()) return RecordProblem{"EmptyJerseyColor", "jersey color is empty"};
  return std::nullopt;
}

// Words the anonymizer writes; a roster name equal to one of them would be
// re-introduced by its own replacement.
std::set<std::string> replacement_vocabulary(const JerseyColors& j) {
  std::set<std::string> words{"team", "player", "jerseyed"};
  for (const auto* color : {&j.home_color, &j.away_color}) {
    std::string word;
    for (char ch : fold(*color) + " ") {
      if (std::isalnum(static_cast<unsigned char>(ch))) {
        word.push_back(ch);
      } else if (!word.empty()) {
        words.insert(word);
        word.clear();
      }
    }
    words.insert(fold(*color));
  }
  return words;
}

template <typename Vec>
void check_records(const Vec& records, std::string_view file, const MatchId& id, std::vector<Issue>& issues) {
  for (std::size_t i = 0; i < records.size(); ++i) {
    auto location = fmt::format("{}[{}]", file, i);
    if (records[i].match != id) {
      issues.push_back({"MatchIdMismatch", Severity::Error, location,
                        "record match " + records[i].match.key() + " != " + id.key()});
    }
    if (auto p = check(records[i])) issues.push_back({p->code, Severity::Error, location, p->message});
  }
}

}  // namespace

std::vector<CameraSegment> segments_of(const MatchAnnotations& a, int half, std::optional<CameraKind> kind) {
  std::vector<CameraSegment> out;
  for (const auto& c : a.camera) {
    if (c.half == half && (!kind || c.kind == *kind)) out.push_back(c);
  }
  return out;
}

std::vector<Issue> validate(const MatchAnnotations& a) {
  std::vector<Issue> issues;
  if (!a.match_id.valid()) {
    issues.push_back({"EmptyMatchId", Severity::Error, "match_id", "match id has an empty or malformed component"});
  }
  check_records(a.events, kEventsFile, a.match_id, issues);
  check_records(a.camera, kCameraFile, a.match_id, issues);
  check_records(a.captions, kCaptionsFile, a.match_id, issues);
  check_records(a.asr, kAsrFile, a.match_id, issues);

  if (a.jerseys.match != a.match_id) {
    issues.push_back({"MatchIdMismatch", Severity::Error, std::string(kJerseysFile), "jersey match id differs"});
  }
  if (auto p = check(a.jerseys)) issues.push_back({p->code, Severity::Error, std::string(kJerseysFile), p->message});

  for (std::size_t i = 1; i < a.events.size(); ++i) {
    const auto& prev = a.events[i - 1];
    const auto& cur = a.events[i];
    if (std::tie(prev.half, prev.timestamp_ms) > std::tie(cur.half, cur.timestamp_ms)) {
      issues.push_back({"UnsortedEvents", Severity::Error, fmt::format("{}[{}]", kEventsFile, i),
                        "events not sorted by (half, timestamp_ms)"});
      break;
    }
  }

  for (int half : {1, 2}) {
    for (auto kind : {CameraKind::RealTime, CameraKind::Replay}) {
      auto segs = segments_of(a, half, kind);
      std::sort(segs.begin(), segs.end(), [](const auto& x, const auto& y) { return x.span < y.span; });
      for (std::size_t i = 1; i < segs.size(); ++i) {
        if (segs[i].span.start_ms < segs[i - 1].span.end_ms) {
          issues.push_back({"CameraOverlap", Severity::Error, fmt::format("{} half {}", kCameraFile, half),
                            fmt::format("{} segments [{},{}) and [{},{}) overlap", to_string(kind),
                                        segs[i - 1].span.start_ms, segs[i - 1].span.end_ms,
                                        segs[i].span.start_ms, segs[i].span.end_ms)});
        }
      }
    }
    auto realtime = segments_of(a, half, CameraKind::RealTime);
    for (const auto& replay : segments_of(a, half, CameraKind::Replay)) {
      for (const auto& rt : realtime) {
        if (rt.span.intersects(replay.span)) {
          issues.push_back({"CrossKindOverlap", Severity::Warning, fmt::format("{} half {}", kCameraFile, half),
                            fmt::format("RealTime [{},{}) overlaps Replay [{},{})", rt.span.start_ms,
                                        rt.span.end_ms, replay.span.start_ms, replay.span.end_ms)});
        }
      }
    }
  }

  if (a.roster) {
    if (a.roster->match != a.match_id) {
      issues.push_back({"MatchIdMismatch", Severity::Error, std::string(kRosterFile), "roster match id differs"});
    }
    std::set<std::string> seen;
    auto vocab = replacement_vocabulary(a.jerseys);
    for (std::size_t i = 0; i < a.roster->entries.size(); ++i) {
      auto location = fmt::format("{}.entries[{}]", kRosterFile, i);
      const auto& name = a.roster->entries[i].surface_name;
      auto folded = fold(name);
      if (name.empty()) {
        issues.push_back({"EmptyRosterName", Severity::Error, location, "surface name is empty"});
        continue;
      }
      if (!seen.insert(folded).second) {
        issues.push_back({"DuplicateRosterName", Severity::Error, location, "duplicate surface name '" + name + "'"});
      }
      if (vocab.contains(folded)) {
        issues.push_back({"RosterNameCollision", Severity::Warning, location,
                          "surface name '" + name + "' occurs in its own anonymized replacement"});
      }
    }
  }
  return issues;
}

// --- normalization ------------------------------------------------------------

MatchAnnotations normalize(MatchAnnotations a) {
  std::sort(a.events.begin(), a.events.end(), [](const EventLabel& x, const EventLabel& y) {
    return std::tie(x.half, x.timestamp_ms, x.label, x.team) < std::tie(y.half, y.timestamp_ms, y.label, y.team);
  });

  auto cam = std::move(a.camera);
  std::sort(cam.begin(), cam.end(), [](const CameraSegment& x, const CameraSegment& y) {
    return std::tie(x.half, x.kind, x.span, x.camera_label) < std::tie(y.half, y.kind, y.span, y.camera_label);
  });
  a.camera.clear();
  for (auto& seg : cam) {
    if (!a.camera.empty()) {
      auto& last = a.camera.back();
      if (last.half == seg.half && last.kind == seg.kind) {
        if (seg.span.start_ms < last.span.end_ms) throw OverlapConflict(last, seg);
        if (seg.span.start_ms == last.span.end_ms) {
          last.span.end_ms = seg.span.end_ms;
          continue;
        }
      }
    }
    a.camera.push_back(std::move(seg));
  }
  std::sort(a.camera.begin(), a.camera.end(), [](const CameraSegment& x, const CameraSegment& y) {
    return std::tie(x.half, x.span, x.kind) < std::tie(y.half, y.span, y.kind);
  });

  std::sort(a.captions.begin(), a.captions.end(), [](const Caption& x, const Caption& y) {
    return std::tie(x.half, x.timestamp_ms, x.text, x.anonymized) < std::tie(y.half, y.timestamp_ms, y.text, y.anonymized);
  });
  std::sort(a.asr.begin(), a.asr.end(), [](const AsrSegment& x, const AsrSegment& y) {
    return std::tie(x.half, x.span, x.text) < std::tie(y.half, y.span, y.text);
  });
  if (a.roster) {
    std::sort(a.roster->entries.begin(), a.roster->entries.end(), [](const RosterEntry& x, const RosterEntry& y) {
      return std::tie(x.surface_name, x.side, x.kind) < std::tie(y.surface_name, y.side, y.kind);
    });
  }
  return a;
}

// --- load / save --------------------------------------------------------------

namespace {

template <typename T, typename Extra>
std::vector<T> load_records(const fs::path& path, Extra&& extra_check) {
  if (!fs::exists(path)) throw MissingFile(path);
  auto text = read_text(path);
  std::vector<T> out;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    std::string line = text.substr(pos, nl == std::string::npos ? std::string::npos : nl - pos);
    pos = nl == std::string::npos ? text.size() : nl + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto where = fmt::format("line {}: {}", line_no, line);
    T rec;
    try {
      json::parse(line).get_to(rec);
    } catch (const std::exception& e) {
      throw SchemaViolation(path, where, e.what());
    }
    if (auto p = check(rec)) throw SchemaViolation(path, where, p->code + ": " + p->message);
    extra_check(rec, path, where);
    out.push_back(std::move(rec));
  }
  return out;
}

template <typename T>
T load_object(const fs::path& path) {
  if (!fs::exists(path)) throw MissingFile(path);
  auto text = read_text(path);
  try {
    return json::parse(text).get<T>();
  } catch (const std::exception& e) {
    throw SchemaViolation(path, text.substr(0, 200), e.what());
  }
}

}  // namespace

MatchAnnotations load_match(const fs::path& dir, const LabelSet& labels) {
  MatchAnnotations a;
  a.jerseys = load_object<JerseyColors>(dir / kJerseysFile);
  if (!a.jerseys.match.valid()) {
    throw SchemaViolation(dir / kJerseysFile, a.jerseys.match.key(), "EmptyMatchId");
  }
  if (auto p = check(a.jerseys)) throw SchemaViolation(dir / kJerseysFile, a.jerseys.match.key(), p->code);
  a.match_id = a.jerseys.match;

  auto same_match = [&](const auto& rec, const fs::path& path, const std::string& where) {
    if (rec.match != a.match_id) {
      throw SchemaViolation(path, where, "MatchIdMismatch: expected " + a.match_id.key());
    }
  };
  a.events = load_records<EventLabel>(dir / kEventsFile, [&](const EventLabel& e, const fs::path& path,
                                                             const std::string& where) {
    same_match(e, path, where);
    if (!ActionClass::parse(e.label, labels)) throw SchemaViolation(path, where, "UnknownLabel: '" + e.label + "'");
  });
  a.camera = load_records<CameraSegment>(dir / kCameraFile, same_match);
  a.captions = load_records<Caption>(dir / kCaptionsFile, same_match);
  a.asr = load_records<AsrSegment>(dir / kAsrFile, same_match);
  if (fs::exists(dir / kRosterFile)) {
    a.roster = load_object<Roster>(dir / kRosterFile);
  }

  a = normalize(std::move(a));
  for (const auto& issue : validate(a)) {
    if (issue.severity == Severity::Error) {
      throw SchemaViolation(dir, issue.location, issue.code + ": " + issue.message);
    }
  }
  return a;
}

void save_match(const fs::path& dir, const MatchAnnotations& a) {
  fs::create_directories(dir);
  auto lines = [](const auto& records) {
    std::string out;
    for (const auto& r : records) {
      out += json(r).dump();
      out += '\n';
    }
    return out;
  };
  write_text(dir / kEventsFile, lines(a.events));
  write_text(dir / kCameraFile, lines(a.camera));
  write_text(dir / kCaptionsFile, lines(a.captions));
  write_text(dir / kAsrFile, lines(a.asr));
  write_text(dir / kJerseysFile, json(a.jerseys).dump() + "\n");
  if (a.roster) {
    write_text(dir / kRosterFile, json(*a.roster).dump() + "\n");
  } else if (fs::exists(dir / kRosterFile)) {
    fs::remove(dir / kRosterFile);
  }
}

}  // namespace soccerforge
