#include <algorithm>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "builders.hpp"
#include "soccerforge/synth_fixtures.hpp"
#include "soccerforge/text_fusion.hpp"

using namespace soccerforge;
using namespace testutil;

namespace {

Roster sample_roster() {
  return Roster{test_match(),
                {{"Messi", Team::Home, RosterKind::Player},
                 {"Lionel Messi", Team::Home, RosterKind::Player},
                 {"Barcelona", Team::Home, RosterKind::Team},
                 {"Real Madrid", Team::Away, RosterKind::Team},
                 {"Ramos", Team::Away, RosterKind::Player}}};
}

JerseyColors sample_jerseys() { return {test_match(), "red", "blue"}; }

// Whole-word, case-insensitive occurrence of `name` in `text`.
bool mentions(const std::string& text, const std::string& name) {
  auto lower = [](std::string s) {
    for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
  };
  auto t = lower(text), n = lower(name);
  for (auto pos = t.find(n); pos != std::string::npos; pos = t.find(n, pos + 1)) {
    bool before = pos == 0 || !std::isalnum(static_cast<unsigned char>(t[pos - 1]));
    auto end = pos + n.size();
    bool after = end == t.size() || !std::isalnum(static_cast<unsigned char>(t[end]));
    if (before && after) return true;
  }
  return false;
}

}  // namespace

TEST(CaptionWindowTest, Arithmetic) {
  EXPECT_EQ(caption_window(event(600000)), (TimeSpan{603000, 610000}));
  EXPECT_EQ(caption_window(event(0)), (TimeSpan{3000, 10000}));
}

TEST(CaptionWindowTest, ClosedAtBothEnds) {
  auto w = caption_window(event(50000));
  EXPECT_TRUE(caption_in_window(w, 53000));
  EXPECT_FALSE(caption_in_window(w, 52999));
  EXPECT_TRUE(caption_in_window(w, 60000));
  EXPECT_FALSE(caption_in_window(w, 60001));
}

TEST(AnonymizeTest, PlayerName) {
  Roster roster{test_match(), {{"Messi", Team::Home, RosterKind::Player}}};
  EXPECT_EQ(anonymize("Messi passes", roster, sample_jerseys()), "red-jerseyed team player passes");
}

TEST(AnonymizeTest, TeamName) {
  EXPECT_EQ(anonymize("Real Madrid scores a brilliant goal!", sample_roster(), sample_jerseys()),
            "blue-jerseyed team scores a brilliant goal!");
  EXPECT_EQ(anonymize("Barcelona scores a brilliant goal!", sample_roster(), sample_jerseys()),
            "red-jerseyed team scores a brilliant goal!");
}

TEST(AnonymizeTest, NoHitsIsIdentity) {
  std::string text = "A long ball over the top, and the keeper comes out.";
  EXPECT_EQ(anonymize(text, sample_roster(), sample_jerseys()), text);
}

TEST(AnonymizeTest, LongestFormFirstCaseInsensitiveWholeWords) {
  auto out = anonymize("LIONEL MESSI beats ramos; Messiah and Ramosa stay.", sample_roster(), sample_jerseys());
  EXPECT_EQ(out, "red-jerseyed team player beats blue-jerseyed team player; Messiah and Ramosa stay.");
}

TEST(AnonymizeTest, IdempotentAndNameFree) {
  auto roster = sample_roster();
  auto jerseys = sample_jerseys();
  std::vector<std::string> vocab{"Messi", "messi", "Lionel Messi", "Barcelona", "REAL MADRID", "Ramos",
                                 "the",   "ball", "crosses",      "goal!",     "Messi's",     "(Ramos)"};
  std::mt19937_64 rng(77);
  for (int round = 0; round < 500; ++round) {
    std::string text;
    auto n = rng() % 12;
    for (std::size_t i = 0; i < n; ++i) {
      if (i) text += ' ';
      text += vocab[rng() % vocab.size()];
    }
    auto once = anonymize(text, roster, jerseys);
    EXPECT_EQ(anonymize(once, roster, jerseys), once) << text;
    for (const auto& e : roster.entries) EXPECT_FALSE(mentions(once, e.surface_name)) << once;
  }
}

TEST(FilterAsrTest, CollapsesRepeats) {
  std::vector<AsrSegment> segs{asr(0, 5000, "what a a goal")};
  EXPECT_EQ(filter_asr(segs, {}, TimeSpan{0, 10000}), "what a goal");
}

TEST(FilterAsrTest, StripsFillersAndCollapsesAcrossThem) {
  std::vector<AsrSegment> segs{asr(0, 2000, "Uh the ball um"), asr(2000, 4000, "ball is in, erm, play")};
  EXPECT_EQ(filter_asr(segs, {}, TimeSpan{0, 10000}), "the ball is in, play");
}

TEST(FilterAsrTest, ReplayOverlapExcluded) {
  std::vector<AsrSegment> segs{asr(0, 3000, "live"), asr(4000, 6000, "replayed"), asr(6000, 9000, "again live")};
  std::vector<CameraSegment> cams{camera(0, 4000), camera(4000, 6000, CameraKind::Replay), camera(6000, 20000)};
  EXPECT_EQ(filter_asr(segs, cams, TimeSpan{0, 10000}), "live again live");
}

TEST(FilterAsrTest, OnlyClipSpan) {
  std::vector<AsrSegment> segs{asr(0, 3000, "before"), asr(3000, 6000, "inside"), asr(10000, 12000, "after")};
  EXPECT_EQ(filter_asr(segs, {}, TimeSpan{4000, 10000}), "inside");
}

TEST(FilterAsrTest, NoAdjacentRepeatedTokens) {
  std::vector<std::string> words{"goal", "Goal", "GOAL!", "uh", "the", "ball", "um", "what"};
  std::mt19937_64 rng(3);
  for (int round = 0; round < 300; ++round) {
    std::vector<AsrSegment> segs;
    for (int s = 0; s < 4; ++s) {
      std::string text;
      for (std::size_t i = 0, n = rng() % 6; i < n; ++i) text += words[rng() % words.size()] + " ";
      segs.push_back(asr(s * 1000, s * 1000 + 1000, text));
    }
    auto out = filter_asr(segs, {}, TimeSpan{0, 10000});
    std::istringstream in(out);
    std::string prev, tok;
    auto key = [](std::string t) {
      std::string k;
      for (char c : t) {
        if (std::isalnum(static_cast<unsigned char>(c))) k += static_cast<char>(std::tolower(c));
      }
      return k;
    };
    while (in >> tok) {
      EXPECT_NE(key(tok), key(prev)) << out;
      EXPECT_NE(key(tok), "uh");
      prev = tok;
    }
  }
}

TEST(FilterAsrTest, MatchesBookOracleOnSyntheticMatch) {
  FusionConfig raw;
  raw.filler_tokens.clear();
  raw.collapse_repeats = false;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto [a, book] = generate_match(seed, corpus_params(seed));
    ASSERT_EQ(book.asr_overlaps_replay.size(), a.asr.size());
    for (int half : {1, 2}) {
      std::vector<AsrSegment> asr_half;
      for (const auto& s : a.asr) {
        if (s.half == half) asr_half.push_back(s);
      }
      TimeSpan span{0, 3'000'000};
      std::string expected;
      for (std::size_t i = 0; i < a.asr.size(); ++i) {
        if (a.asr[i].half != half || book.asr_overlaps_replay[i]) continue;
        std::istringstream in(a.asr[i].text);
        std::string tok;
        while (in >> tok) expected += (expected.empty() ? "" : " ") + tok;
      }
      EXPECT_EQ(filter_asr(asr_half, segments_of(a, half), span, raw), expected) << "seed " << seed;
    }
  }
}

TEST(FuseTest, OneCaptionInWindow) {
  auto a = blank_match();
  a.roster = sample_roster();
  a.camera = {camera(0, 60000)};
  a.events = {event(30000)};
  a.captions = {caption(34000, "Messi scores for Barcelona"), caption(45000, "late")};
  a.asr = {asr(25000, 30000, "Messi Messi shoots")};
  ClipSpec clip;
  clip.clip_id = "c1";
  clip.match = a.match_id;
  clip.span = {25000, 35000};
  clip.anchor_event = a.events[0];
  auto fused = fuse(clip, a);
  ASSERT_TRUE(fused);
  ASSERT_EQ(fused->captions.size(), 1u);
  EXPECT_EQ(fused->captions[0], "red-jerseyed team player scores for red-jerseyed team");
  EXPECT_EQ(fused->commentary, "Messi shoots");
  EXPECT_TRUE(fused->issues.empty());
}

TEST(FuseTest, NoCaptionMeansNone) {
  auto a = blank_match();
  a.camera = {camera(0, 60000)};
  a.events = {event(30000)};
  a.captions = {caption(32999, "too early"), caption(40001, "too late")};
  ClipSpec clip;
  clip.match = a.match_id;
  clip.span = {25000, 35000};
  clip.anchor_event = a.events[0];
  EXPECT_FALSE(fuse(clip, a));
}

TEST(FuseTest, PairWindowsAreUnioned) {
  auto a = blank_match();
  a.camera = {camera(0, 60000)};
  EventPair pair;
  pair.clip_id = "p1";
  pair.first = event(10000, "Foul");
  pair.second = event(14000, "Goal");
  pair.span = {8000, 17000};
  a.captions = {caption(13500, "from first"), caption(24000, "from second"), caption(24001, "outside")};
  auto fused = fuse(pair, a);
  ASSERT_TRUE(fused);
  EXPECT_EQ(fused->captions, (std::vector<std::string>{"from first", "from second"}));
  ASSERT_EQ(fused->issues.size(), 1u);
  EXPECT_EQ(fused->issues[0].code, "MissingRoster");
}

TEST(FuseTest, RecordRoundTrip) {
  auto a = blank_match();
  a.camera = {camera(0, 60000)};
  a.captions = {caption(13500, "c")};
  EventPair pair;
  pair.clip_id = "p1";
  pair.first = event(10000, "Foul");
  pair.second = event(14000, "Goal");
  pair.span = {8000, 17000};
  auto fused = *fuse(pair, a);
  auto back = fused_from_record(fused_record(fused));
  EXPECT_EQ(fused_record(back), fused_record(fused));
  EXPECT_TRUE(is_paired_event(back.clip));
}

TEST(FuseTest, AttachedCaptionsLieInSomeAnchorWindow) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto [a, book] = generate_match(seed, corpus_params(seed));
    std::vector<ClipVariant> clips;
    ClipSpec probe;
    probe.match = a.match_id;
    for (const auto& e : a.events) {
      probe.anchor_event = e;
      probe.half = e.half;
      probe.span = {e.timestamp_ms, e.timestamp_ms + 1};
      clips.push_back(probe);
    }
    for (const auto& clip : clips) {
      auto fused = fuse(clip, a);
      if (!fused) continue;
      auto w = caption_window(anchors_of(clip)[0]);
      std::size_t expected = 0;
      for (const auto& c : a.captions) {
        if (c.half == half_of(clip) && c.timestamp_ms >= w.start_ms && c.timestamp_ms <= w.end_ms) ++expected;
      }
      EXPECT_EQ(fused->captions.size(), expected);
    }
  }
}
