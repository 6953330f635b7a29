#include <algorithm>

#include <gtest/gtest.h>

#include "builders.hpp"
#include "soccerforge/annotations.hpp"
#include "soccerforge/jsonl.hpp"
#include "soccerforge/synth_fixtures.hpp"
#include "test_util.hpp"

using namespace soccerforge;
using namespace testutil;

namespace {

bool has_code(const std::vector<Issue>& issues, const std::string& code) {
  return std::any_of(issues.begin(), issues.end(), [&](const Issue& i) { return i.code == code; });
}

}  // namespace

TEST(MatchIdTest, KeyRoundTrip) {
  MatchId id{"england_epl", "2014-2015", "2015-02-21 - 18-00 Chelsea 1 - 1 Burnley"};
  EXPECT_EQ(id.key(), "england_epl/2014-2015/2015-02-21 - 18-00 Chelsea 1 - 1 Burnley");
  EXPECT_EQ(MatchId::from_key(id.key()), id);
  EXPECT_TRUE(id.valid());
  EXPECT_FALSE((MatchId{"a", "", "c"}.valid()));
}

TEST(LabelSetTest, ParseIsCaseSensitiveAndExact) {
  const auto& labels = LabelSet::soccernet_v2();
  EXPECT_EQ(labels.labels().size(), 17u);
  EXPECT_TRUE(ActionClass::parse("Shots on target", labels));
  EXPECT_FALSE(ActionClass::parse("shots on target", labels));
  EXPECT_FALSE(ActionClass::parse("Shots on target ", labels));
  for (const auto& l : labels.labels()) EXPECT_EQ(ActionClass::parse(l, labels)->name(), l);
}

TEST(ValidateTest, NegativeTimestamp) {
  auto a = blank_match();
  a.events.push_back(event(-5));
  auto issues = validate(a);
  ASSERT_EQ(issues.size(), 1u);
  EXPECT_EQ(issues[0].code, "NegativeTimestamp");
}

TEST(ValidateTest, EmptyCaption) {
  auto a = blank_match();
  a.captions.push_back(caption(1000, ""));
  EXPECT_TRUE(has_code(validate(a), "EmptyCaption"));
}

TEST(ValidateTest, SyntheticMatchIsClean) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto [a, book] = generate_match(seed, corpus_params(seed));
    EXPECT_TRUE(validate(a).empty()) << "seed " << seed;
  }
}

TEST(ValidateTest, DuplicateRosterNamesAfterCaseFolding) {
  auto a = blank_match();
  a.roster = Roster{a.match_id, {{"Silva", Team::Home, RosterKind::Player}, {"SILVA", Team::Away, RosterKind::Player}}};
  EXPECT_TRUE(has_code(validate(a), "DuplicateRosterName"));
}

TEST(NormalizeTest, SortsEventsAndMergesTouchingSegments) {
  auto a = blank_match();
  a.events = {event(9000), event(1000), event(5000)};
  a.camera = {camera(3000, 9000), camera(0, 3000), camera(9000, 12000, CameraKind::Replay),
              camera(12000, 20000)};
  auto n = normalize(a);
  ASSERT_EQ(n.events.size(), 3u);
  EXPECT_TRUE(std::is_sorted(n.events.begin(), n.events.end(),
                             [](auto& x, auto& y) { return x.timestamp_ms < y.timestamp_ms; }));
  auto rt = segments_of(n, 1, CameraKind::RealTime);
  ASSERT_EQ(rt.size(), 2u);
  EXPECT_EQ(rt[0].span, (TimeSpan{0, 9000}));
  EXPECT_EQ(rt[1].span, (TimeSpan{12000, 20000}));
}

TEST(NormalizeTest, SameKindOverlapThrows) {
  auto a = blank_match();
  a.camera = {camera(0, 5000), camera(4000, 9000)};
  EXPECT_THROW(normalize(a), OverlapConflict);
}

TEST(LoadMatchTest, ThreeEventsFiveSegmentsSorted) {
  TempDir dir;
  auto a = blank_match();
  a.events = {event(30000, "Foul"), event(10000, "Goal"), event(20000, "Corner")};
  a.camera = {camera(0, 8000), camera(8000, 12000, CameraKind::Replay), camera(12000, 25000),
              camera(25000, 27000, CameraKind::Replay), camera(27000, 40000)};
  a.captions = {caption(14000, "goal")};
  a.asr = {asr(0, 4000, "kick off")};
  // Write unsorted on purpose, bypassing save_match's normalization.
  std::string events;
  for (const auto& e : a.events) events += json(e).dump() + "\n";
  write_file(dir / "events.jsonl", events);
  std::string cams;
  for (const auto& c : a.camera) cams += json(c).dump() + "\n";
  write_file(dir / "camera.jsonl", cams);
  write_file(dir / "captions.jsonl", json(a.captions[0]).dump() + "\n");
  write_file(dir / "asr.jsonl", json(a.asr[0]).dump() + "\n");
  write_file(dir / "jerseys.json", json(a.jerseys).dump());

  auto loaded = load_match(dir.path());
  ASSERT_EQ(loaded.events.size(), 3u);
  EXPECT_EQ(loaded.events[0].timestamp_ms, 10000);
  EXPECT_EQ(loaded.events[1].timestamp_ms, 20000);
  EXPECT_EQ(loaded.events[2].timestamp_ms, 30000);
  EXPECT_EQ(loaded.camera.size(), 5u);
  EXPECT_FALSE(loaded.roster.has_value());
}

TEST(LoadMatchTest, OverlappingRealTimeSegmentsThrow) {
  TempDir dir;
  auto a = blank_match();
  save_match(dir.path(), a);
  write_file(dir / "camera.jsonl", json(camera(0, 5000)).dump() + "\n" + json(camera(4000, 9000)).dump() + "\n");
  EXPECT_THROW(load_match(dir.path()), OverlapConflict);
}

TEST(LoadMatchTest, MissingFileNamesTheFile) {
  TempDir dir;
  save_match(dir.path(), blank_match());
  std::filesystem::remove(dir / "asr.jsonl");
  try {
    load_match(dir.path());
    FAIL() << "expected MissingFile";
  } catch (const MissingFile& e) {
    EXPECT_EQ(e.path().filename(), "asr.jsonl");
  }
}

TEST(LoadMatchTest, SchemaViolationReportsFirstOffendingRecord) {
  TempDir dir;
  save_match(dir.path(), blank_match());
  auto good = json(event(1000)).dump();
  auto bad = json(event(2000, "Handball")).dump();
  write_file(dir / "events.jsonl", good + "\n" + bad + "\n" + json(event(-1)).dump() + "\n");
  try {
    load_match(dir.path());
    FAIL() << "expected SchemaViolation";
  } catch (const SchemaViolation& e) {
    EXPECT_EQ(e.path().filename(), "events.jsonl");
    EXPECT_NE(e.record().find("Handball"), std::string::npos);
  }
}

TEST(LoadMatchTest, MalformedLineIsSchemaViolation) {
  TempDir dir;
  save_match(dir.path(), blank_match());
  write_file(dir / "captions.jsonl", "{not json\n");
  EXPECT_THROW(load_match(dir.path()), SchemaViolation);
}

TEST(LoadMatchTest, SyntheticRoundTripIsLossless) {
  for (std::uint64_t seed : {1u, 7u, 42u}) {
    TempDir dir;
    auto [a, book] = generate_match(seed, corpus_params(seed));
    save_match(dir.path(), a);
    auto loaded = load_match(dir.path());
    EXPECT_EQ(loaded, a) << "seed " << seed;
  }
}

TEST(LoadMatchTest, SaveOfLoadIsByteIdentical) {
  TempDir first, second;
  auto [a, book] = generate_match(5, corpus_params(5));
  save_match(first.path(), a);
  save_match(second.path(), load_match(first.path()));
  for (auto name : {kEventsFile, kCameraFile, kCaptionsFile, kAsrFile, kJerseysFile, kRosterFile}) {
    EXPECT_EQ(read_file(first / std::string(name)), read_file(second / std::string(name))) << name;
  }
}

TEST(LoadMatchTest, DisjointSpansPerKindAfterLoad) {
  TempDir dir;
  auto [a, book] = generate_match(11, corpus_params(11));
  save_match(dir.path(), a);
  auto loaded = load_match(dir.path());
  for (int half : {1, 2}) {
    for (auto kind : {CameraKind::RealTime, CameraKind::Replay}) {
      auto segs = segments_of(loaded, half, kind);
      for (std::size_t i = 1; i < segs.size(); ++i) EXPECT_LE(segs[i - 1].span.end_ms, segs[i].span.start_ms);
    }
  }
}

TEST(JsonlTest, ManifestLinesAreSkipped) {
  auto records = parse_jsonl("{\"manifest\":{\"stage\":\"x\"}}\n{\"a\":1}\n\n{\"b\":2}\n");
  ASSERT_EQ(records.size(), 2u);
  EXPECT_EQ(records[0]["a"], 1);
  EXPECT_EQ(parse_jsonl("{\"manifest\":{}}\n{\"a\":1}\n", true).size(), 2u);
}
