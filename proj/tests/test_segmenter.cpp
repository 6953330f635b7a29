#include <algorithm>
#include <random>

#include <gtest/gtest.h>

#include "builders.hpp"
#include "soccerforge/clip_segmenter.hpp"
#include "soccerforge/synth_fixtures.hpp"

using namespace soccerforge;
using namespace testutil;

TEST(CameraIntervalTest, FindsContainingSegment) {
  auto a = blank_match();
  a.camera = {camera(0, 8000), camera(8000, 12000, CameraKind::Replay)};
  auto seg = camera_interval_at(a, 1, 4000);
  ASSERT_TRUE(seg);
  EXPECT_EQ(seg->span, (TimeSpan{0, 8000}));
}

TEST(CameraIntervalTest, BoundaryBelongsToFollowingSegment) {
  auto a = blank_match();
  a.camera = {camera(0, 8000), camera(8000, 12000, CameraKind::Replay)};
  auto seg = camera_interval_at(a, 1, 8000);
  ASSERT_TRUE(seg);
  EXPECT_EQ(seg->kind, CameraKind::Replay);
  EXPECT_FALSE(camera_interval_at(a, 1, 12000));
  EXPECT_FALSE(camera_interval_at(a, 2, 100));
}

TEST(CameraIntervalTest, MatchesLinearScanOnSyntheticMatch) {
  auto [a, book] = generate_match(3, corpus_params(3));
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<std::int64_t> t_dist(0, 2'800'000);
  for (int i = 0; i < 1000; ++i) {
    int half = 1 + static_cast<int>(rng() % 2);
    auto t = t_dist(rng);
    std::vector<CameraSegment> hits;
    for (const auto& s : a.camera) {
      if (s.half == half && s.span.start_ms <= t && t < s.span.end_ms) hits.push_back(s);
    }
    ASSERT_LE(hits.size(), 1u);
    auto got = camera_interval_at(a, half, t);
    ASSERT_EQ(got.has_value(), !hits.empty());
    if (got) EXPECT_EQ(*got, hits[0]);
  }
}

TEST(MatchEventTest, WindowFits) {
  auto a = blank_match();
  a.camera = {camera(0, 60000)};
  auto clip = match_event_to_realtime(a, event(30000));
  ASSERT_TRUE(clip);
  EXPECT_EQ(clip->span, (TimeSpan{25000, 35000}));
  EXPECT_FALSE(clip->truncated);
  EXPECT_EQ(clip->kind, CameraKind::RealTime);
}

TEST(MatchEventTest, ReplayInsideWindowRejects) {
  auto a = blank_match();
  a.camera = {camera(0, 33000), camera(33000, 40000, CameraKind::Replay), camera(40000, 60000)};
  EXPECT_FALSE(match_event_to_realtime(a, event(30000)));
}

TEST(MatchEventTest, WindowEndingExactlyAtSegmentEndFits) {
  auto a = blank_match();
  a.camera = {camera(0, 35000), camera(35000, 40000, CameraKind::Replay)};
  auto clip = match_event_to_realtime(a, event(30000));
  ASSERT_TRUE(clip);
  EXPECT_EQ(clip->span, (TimeSpan{25000, 35000}));
  EXPECT_FALSE(match_event_to_realtime(a, event(30001)));
}

TEST(MatchEventTest, WindowClampedAtHalfStart) {
  auto a = blank_match();
  a.camera = {camera(0, 60000)};
  auto clip = match_event_to_realtime(a, event(2000));
  ASSERT_TRUE(clip);
  EXPECT_EQ(clip->span, (TimeSpan{0, 7000}));
}

TEST(MatchEventTest, WiderWindowIsTruncatedAroundAnchor) {
  auto a = blank_match();
  a.camera = {camera(0, 60000)};
  SegmenterConfig cfg;
  cfg.event_window_ms = 8000;
  auto clip = match_event_to_realtime(a, event(30000), cfg);
  ASSERT_TRUE(clip);
  EXPECT_TRUE(clip->truncated);
  EXPECT_EQ(clip->span, (TimeSpan{25000, 35000}));
}

TEST(MatchEventTest, EventInReplayFootageRejects) {
  auto a = blank_match();
  a.camera = {camera(0, 20000), camera(20000, 60000, CameraKind::Replay)};
  EXPECT_FALSE(match_event_to_realtime(a, event(30000)));
}

TEST(PairReplaysTest, UniqueCandidate) {
  auto a = blank_match();
  a.events = {event(35000, "Goal")};
  a.camera = {camera(0, 40000), camera(40000, 47000, CameraKind::Replay), camera(47000, 90000)};
  std::vector<ClipSpec> rt;
  rt.push_back(*match_event_to_realtime(a, a.events[0]));
  auto replays = pair_replays(a, rt);
  ASSERT_EQ(replays.size(), 1u);
  EXPECT_EQ(replays[0].kind, CameraKind::Replay);
  EXPECT_EQ(replays[0].span, (TimeSpan{40000, 47000}));
  EXPECT_EQ(replays[0].anchor_event.label, "Goal");
  ASSERT_TRUE(replays[0].paired_with);
  EXPECT_EQ(*replays[0].paired_with, rt[0].clip_id);
  EXPECT_EQ(rt[0].paired_with, replays[0].clip_id);
}

TEST(PairReplaysTest, NoClipInLookbackIsNotEmitted) {
  auto a = blank_match();
  a.events = {event(10000)};
  a.camera = {camera(0, 50000), camera(50000, 56000, CameraKind::Replay)};
  std::vector<ClipSpec> rt{*match_event_to_realtime(a, a.events[0])};
  EXPECT_TRUE(pair_replays(a, rt).empty());
  EXPECT_FALSE(rt[0].paired_with);
}

TEST(PairReplaysTest, LatestAnchorWinsAndLongReplayKeepsOnset) {
  auto a = blank_match();
  a.events = {event(20000, "Foul"), event(34000, "Goal")};
  a.camera = {camera(0, 40000), camera(40000, 55000, CameraKind::Replay), camera(55000, 90000)};
  std::vector<ClipSpec> rt;
  for (const auto& e : a.events) rt.push_back(*match_event_to_realtime(a, e));
  auto replays = pair_replays(a, rt);
  ASSERT_EQ(replays.size(), 1u);
  EXPECT_EQ(replays[0].anchor_event.label, "Goal");
  EXPECT_TRUE(replays[0].truncated);
  EXPECT_EQ(replays[0].span, (TimeSpan{40000, 50000}));
  EXPECT_FALSE(rt[0].paired_with);
  EXPECT_TRUE(rt[1].paired_with);
}

TEST(PairReplaysTest, SecondReplayOfSameActionStaysUnpaired) {
  auto a = blank_match();
  a.events = {event(30000)};
  a.camera = {camera(0, 40000), camera(40000, 45000, CameraKind::Replay), camera(45000, 48000),
              camera(48000, 52000, CameraKind::Replay), camera(52000, 90000)};
  std::vector<ClipSpec> rt{*match_event_to_realtime(a, a.events[0])};
  auto replays = pair_replays(a, rt);
  ASSERT_EQ(replays.size(), 1u);
  EXPECT_EQ(replays[0].span.start_ms, 40000);
}

TEST(SegmentMatchTest, ZeroEvents) {
  auto a = blank_match();
  a.camera = {camera(0, 60000)};
  EXPECT_TRUE(segment_match(a).empty());
}

TEST(SegmentMatchTest, Deterministic) {
  auto [a, book] = generate_match(17, corpus_params(17));
  auto first = segment_match(a);
  auto second = segment_match(a);
  EXPECT_EQ(first, second);
  std::string x, y;
  for (const auto& c : first) x += clip_record(c).dump() + "\n";
  for (const auto& c : second) y += clip_record(c).dump() + "\n";
  EXPECT_EQ(x, y);
}

TEST(SegmentMatchTest, InvariantsOnSyntheticMatches) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto [a, book] = generate_match(seed, corpus_params(seed));
    auto clips = segment_match(a);
    std::map<std::string, const ClipSpec*> by_id;
    for (const auto& c : clips) by_id[c.clip_id] = &c;
    ASSERT_EQ(by_id.size(), clips.size());
    for (const auto& c : clips) {
      EXPECT_LE(c.span.duration(), 10000);
      EXPECT_TRUE(c.span.valid());
      int containing = 0;
      for (const auto& s : a.camera) {
        if (s.half == c.half && s.kind == c.kind && s.span.contains(c.span)) ++containing;
      }
      EXPECT_EQ(containing, 1) << c.clip_id;
      if (c.kind == CameraKind::RealTime) {
        EXPECT_TRUE(c.span.contains(c.anchor_event.timestamp_ms));
      }
      if (c.paired_with) {
        auto* other = by_id.at(*c.paired_with);
        EXPECT_NE(other->kind, c.kind);
        ASSERT_TRUE(other->paired_with);
        EXPECT_EQ(*other->paired_with, c.clip_id);
      }
    }
  }
}

TEST(SegmentMatchTest, CountsMatchBook) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    auto [a, book] = generate_match(seed, corpus_params(seed));
    auto clips = segment_match(a);
    auto rt = std::count_if(clips.begin(), clips.end(), [](auto& c) { return c.kind == CameraKind::RealTime; });
    auto rp = std::count_if(clips.begin(), clips.end(), [](auto& c) { return c.kind == CameraKind::Replay; });
    EXPECT_EQ(rt, book.planted_single_events) << "seed " << seed;
    EXPECT_EQ(rp, book.planted_replays) << "seed " << seed;
  }
}

TEST(SegmentMatchTest, TenPlantedSingleEvents) {
  SynthParams p;
  p.single_events = 10;
  auto [a, book] = generate_match(1, p);
  EXPECT_EQ(segment_match(a).size(), 10u);
}

TEST(SegmentMatchTest, InvariantUnderInputPermutation) {
  auto [a, book] = generate_match(23, corpus_params(23));
  auto expected = segment_match(a);
  std::mt19937_64 rng(5);
  auto shuffled = a;
  std::shuffle(shuffled.events.begin(), shuffled.events.end(), rng);
  std::shuffle(shuffled.camera.begin(), shuffled.camera.end(), rng);
  std::shuffle(shuffled.captions.begin(), shuffled.captions.end(), rng);
  EXPECT_EQ(segment_match(normalize(shuffled)), expected);
}

TEST(SegmentMatchTest, ClipRecordRoundTrip) {
  auto [a, book] = generate_match(2, corpus_params(2));
  for (const auto& c : segment_match(a)) {
    EXPECT_EQ(clip_from_record(clip_record(c)), c);
  }
}
