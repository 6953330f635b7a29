#pragma once

#include <compare>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace soccerforge {

using json = nlohmann::json;

/// Identifies one broadcast match. The key "league/season/fixture" doubles as
/// the relative directory for every per-match artifact.
struct MatchId {
  std::string league;
  std::string season;
  std::string fixture;

  std::string key() const;
  static MatchId from_key(std::string_view key);
  bool valid() const;

  auto operator<=>(const MatchId&) const = default;
};

/// Half-open interval [start_ms, end_ms) in milliseconds from the half start.
struct TimeSpan {
  std::int64_t start_ms = 0;
  std::int64_t end_ms = 0;

  std::int64_t duration() const { return end_ms - start_ms; }
  bool valid() const { return start_ms >= 0 && start_ms < end_ms; }
  bool contains(std::int64_t t) const { return t >= start_ms && t < end_ms; }
  bool contains(const TimeSpan& other) const {
    return other.start_ms >= start_ms && other.end_ms <= end_ms;
  }
  bool intersects(const TimeSpan& other) const {
    return start_ms < other.end_ms && other.start_ms < end_ms;
  }

  auto operator<=>(const TimeSpan&) const = default;
};

enum class Team { Home, Away, None };
enum class CameraKind { RealTime, Replay };
enum class Severity { Warning, Error };

std::string_view to_string(Team t);
std::string_view to_string(CameraKind k);
std::string_view to_string(Severity s);
std::optional<Team> parse_team(std::string_view s);
std::optional<CameraKind> parse_camera_kind(std::string_view s);

/// Configured action vocabulary. Matching is case-sensitive and exact.
class LabelSet {
 public:
  LabelSet() = default;
  explicit LabelSet(std::vector<std::string> labels);

  /// The 17 SoccerNet-v2 action classes.
  static const LabelSet& soccernet_v2();

  bool contains(std::string_view label) const;
  const std::vector<std::string>& labels() const { return labels_; }

 private:
  std::vector<std::string> labels_;
};

class ActionClass {
 public:
  static std::optional<ActionClass> parse(std::string_view text, const LabelSet& labels);
  const std::string& name() const { return name_; }
  auto operator<=>(const ActionClass&) const = default;

 private:
  explicit ActionClass(std::string name) : name_(std::move(name)) {}
  std::string name_;
};

struct EventLabel {
  MatchId match;
  int half = 1;
  std::int64_t timestamp_ms = 0;
  std::string label;
  Team team = Team::None;

  auto operator<=>(const EventLabel&) const = default;
};

struct CameraSegment {
  MatchId match;
  int half = 1;
  TimeSpan span;
  CameraKind kind = CameraKind::RealTime;
  std::string camera_label;

  bool operator==(const CameraSegment&) const = default;
};

struct Caption {
  MatchId match;
  int half = 1;
  std::int64_t timestamp_ms = 0;
  std::string text;
  bool anonymized = false;

  bool operator==(const Caption&) const = default;
};

struct AsrSegment {
  MatchId match;
  int half = 1;
  TimeSpan span;
  std::string text;

  bool operator==(const AsrSegment&) const = default;
};

struct JerseyColors {
  MatchId match;
  std::string home_color;
  std::string away_color;

  const std::string& color_of(Team t) const { return t == Team::Away ? away_color : home_color; }
  bool operator==(const JerseyColors&) const = default;
};

// Team entries anonymize to "<color>-jerseyed team", player entries to
// "<color>-jerseyed team player".
enum class RosterKind { Player, Team };

struct RosterEntry {
  std::string surface_name;
  Team side = Team::Home;
  RosterKind kind = RosterKind::Player;

  bool operator==(const RosterEntry&) const = default;
};

struct Roster {
  MatchId match;
  std::vector<RosterEntry> entries;

  bool operator==(const Roster&) const = default;
};

struct MatchAnnotations {
  MatchId match_id;
  std::vector<EventLabel> events;
  std::vector<CameraSegment> camera;
  std::vector<Caption> captions;
  std::vector<AsrSegment> asr;
  JerseyColors jerseys;
  std::optional<Roster> roster;

  bool operator==(const MatchAnnotations&) const = default;
};

struct Issue {
  std::string code;
  Severity severity = Severity::Error;
  std::string location;
  std::string message;
};

// --- errors ---------------------------------------------------------------

class AnnotationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class MissingFile : public AnnotationError {
 public:
  explicit MissingFile(std::filesystem::path path)
      : AnnotationError("missing annotation file: " + path.string()), path_(std::move(path)) {}
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

class SchemaViolation : public AnnotationError {
 public:
  SchemaViolation(std::filesystem::path path, std::string record, const std::string& reason)
      : AnnotationError(path.string() + ": " + reason + " in record: " + record),
        path_(std::move(path)),
        record_(std::move(record)),
        reason_(reason) {}
  const std::filesystem::path& path() const { return path_; }
  const std::string& record() const { return record_; }
  const std::string& reason() const { return reason_; }

 private:
  std::filesystem::path path_;
  std::string record_;
  std::string reason_;
};

class OverlapConflict : public AnnotationError {
 public:
  OverlapConflict(CameraSegment a, CameraSegment b);
  const CameraSegment& first() const { return a_; }
  const CameraSegment& second() const { return b_; }

 private:
  CameraSegment a_, b_;
};

// --- schema file names ------------------------------------------------------

inline constexpr std::string_view kEventsFile = "events.jsonl";
inline constexpr std::string_view kCameraFile = "camera.jsonl";
inline constexpr std::string_view kCaptionsFile = "captions.jsonl";
inline constexpr std::string_view kAsrFile = "asr.jsonl";
inline constexpr std::string_view kJerseysFile = "jerseys.json";
inline constexpr std::string_view kRosterFile = "roster.json";

// --- operations -------------------------------------------------------------

/// Loads the six schema files (roster optional), normalizes and validates.
/// Throws MissingFile, SchemaViolation or OverlapConflict.
MatchAnnotations load_match(const std::filesystem::path& dir,
                            const LabelSet& labels = LabelSet::soccernet_v2());

/// Writes the canonical file set. Output is a pure function of the value.
void save_match(const std::filesystem::path& dir, const MatchAnnotations& annotations);

/// Sorts every record list and merges same-kind camera segments that touch
/// (gap 0). Throws OverlapConflict when same-kind segments overlap.
MatchAnnotations normalize(MatchAnnotations annotations);

/// Invariant check; issues are data, never thrown.
std::vector<Issue> validate(const MatchAnnotations& annotations);

std::vector<CameraSegment> segments_of(const MatchAnnotations& a, int half,
                                       std::optional<CameraKind> kind = std::nullopt);

// --- JSON mapping (field names match the on-disk schema) --------------------

void to_json(json& j, const MatchId& v);
void from_json(const json& j, MatchId& v);
void to_json(json& j, const TimeSpan& v);
void from_json(const json& j, TimeSpan& v);
void to_json(json& j, const EventLabel& v);
void from_json(const json& j, EventLabel& v);
void to_json(json& j, const CameraSegment& v);
void from_json(const json& j, CameraSegment& v);
void to_json(json& j, const Caption& v);
void from_json(const json& j, Caption& v);
void to_json(json& j, const AsrSegment& v);
void from_json(const json& j, AsrSegment& v);
void to_json(json& j, const JerseyColors& v);
void from_json(const json& j, JerseyColors& v);
void to_json(json& j, const Roster& v);
void from_json(const json& j, Roster& v);
void to_json(json& j, const Issue& v);

}  // namespace soccerforge
