#include <algorithm>
#include <atomic>
#include <mutex>
#include <thread>

#include <gtest/gtest.h>

#include "builders.hpp"
#include "soccerforge/mock_llm.hpp"
#include "soccerforge/qa_factory.hpp"

using namespace soccerforge;
using namespace testutil;

namespace {

FusedClip single_clip(std::string id = "abc-s0001") {
  ClipSpec clip;
  clip.clip_id = std::move(id);
  clip.match = test_match();
  clip.span = {25000, 35000};
  clip.anchor_event = event(30000, "Shots on target", Team::Away);
  return FusedClip{clip, {"blue-jerseyed team player shoots"}, "great effort", {test_match(), "red", "blue"}, {}};
}

FusedClip paired_clip() {
  EventPair p;
  p.clip_id = "abc-p0001";
  p.first = event(10000, "Foul");
  p.second = event(12000, "Yellow card");
  p.gap_ms = 2000;
  p.span = {8000, 15000};
  return FusedClip{p, {"a booking"}, "", {test_match(), "red", "blue"}, {}};
}

bool is_three(const PromptMessages& p) { return p.system().content.find("Generate THREE") != std::string::npos; }

std::string valid_reply(const PromptMessages& p) {
  if (is_three(p)) return "{'Q1': 'q1', 'A1': 'a1', 'Q2': 'q2', 'A2': 'a2', 'Q3': 'q3', 'A3': 'a3'}";
  return "{'Q': 'Describe it?', 'A': 'It happened.'}";
}

}  // namespace

TEST(GenerateForClipTest, SingleEventGetsDescriptionAndOverview) {
  std::vector<PromptMessages> seen;
  auto gen = generate_for_clip(single_clip(), [&](const PromptMessages& p) {
    seen.push_back(p);
    return valid_reply(p);
  });
  ASSERT_FALSE(gen.quarantine);
  ASSERT_EQ(gen.records.size(), 2u);
  EXPECT_EQ(gen.records[0].kind, QaKind::LongDescription);
  EXPECT_EQ(gen.records[1].kind, QaKind::OverviewQA);
  EXPECT_EQ(gen.records[0].media_path, test_match().key() + "/abc-s0001_Shotsontarget.mp4");
  ASSERT_EQ(seen.size(), 2u);
  // The overview prompt carries the generated long description.
  EXPECT_NE(seen[1].messages()[1].content.find("It happened."), std::string::npos);
}

TEST(GenerateForClipTest, PairedEventGetsDescriptionAndThreeDetails) {
  auto gen = generate_for_clip(paired_clip(), valid_reply);
  ASSERT_FALSE(gen.quarantine);
  ASSERT_EQ(gen.records.size(), 4u);
  EXPECT_EQ(gen.records[0].kind, QaKind::LongDescription);
  for (int i = 1; i <= 3; ++i) {
    EXPECT_EQ(gen.records[i].kind, QaKind::DetailQA);
    EXPECT_EQ(gen.records[i].index, i);
    EXPECT_EQ(gen.records[i].question, "q" + std::to_string(i));
  }
  EXPECT_EQ(gen.records[0].media_path, test_match().key() + "/abc-p0001_Foul--Yellowcard.mp4");
}

TEST(GenerateForClipTest, CorrectiveRetryRecovers) {
  std::vector<PromptMessages> seen;
  auto gen = generate_for_clip(single_clip(), [&](const PromptMessages& p) {
    seen.push_back(p);
    return seen.size() == 1 ? std::string("no dictionary here") : valid_reply(p);
  });
  ASSERT_FALSE(gen.quarantine);
  ASSERT_EQ(seen.size(), 3u);
  ASSERT_EQ(seen[1].messages().size(), 3u);
  EXPECT_EQ(seen[1].messages().back().content, kCorrectiveInstruction);
  EXPECT_EQ(seen[2].messages().size(), 2u);
}

TEST(GenerateForClipTest, TwoFailuresQuarantineWithRawText) {
  int calls = 0;
  auto gen = generate_for_clip(paired_clip(), [&](const PromptMessages& p) {
    ++calls;
    return is_three(p) ? std::string("{'Q1': 'only one'}") : valid_reply(p);
  });
  ASSERT_TRUE(gen.quarantine);
  EXPECT_TRUE(gen.records.empty());
  EXPECT_EQ(gen.quarantine->step, "detail_qa");
  EXPECT_EQ(gen.quarantine->raw_responses.size(), 2u);
  EXPECT_EQ(calls, 3);
  auto j = quarantine_json(*gen.quarantine);
  EXPECT_EQ(j["clip_id"], "abc-p0001");
}

TEST(GenerateForClipTest, RequestFailureQuarantinesImmediately) {
  int calls = 0;
  auto gen = generate_for_clip(single_clip(), [&](const PromptMessages&) -> std::string {
    ++calls;
    throw RateLimited("rate limited after 4 attempts");
  });
  ASSERT_TRUE(gen.quarantine);
  EXPECT_EQ(gen.quarantine->step, "long_description");
  EXPECT_EQ(calls, 1);
  EXPECT_TRUE(gen.quarantine->raw_responses.empty());
}

TEST(GenerateDatasetTest, OrderIndependentOfCompletionOrder) {
  std::vector<FusedClip> clips;
  for (int i = 0; i < 40; ++i) clips.push_back(i % 3 ? single_clip("c" + std::to_string(i)) : paired_clip());
  std::atomic<int> calls{0};
  auto results = generate_dataset(clips, [&](const PromptMessages& p) {
    if (++calls % 5 == 0) std::this_thread::sleep_for(std::chrono::milliseconds(2));
    return valid_reply(p);
  }, 6);
  ASSERT_EQ(results.size(), clips.size());
  for (std::size_t i = 0; i < clips.size(); ++i) {
    ASSERT_FALSE(results[i].records.empty());
    EXPECT_EQ(results[i].records[0].clip_id, clip_id_of(clips[i].clip));
    EXPECT_EQ(results[i].records.size(), is_paired_event(clips[i].clip) ? 4u : 2u);
  }
}

TEST(GenerateDatasetTest, QaRecordJsonRoundTrip) {
  auto gen = generate_for_clip(paired_clip(), valid_reply);
  for (const auto& r : gen.records) EXPECT_EQ(qa_record_from_json(qa_record_json(r)), r);
}

TEST(MockDatasetTest, ScriptedLongDescription) {
  auto fused = single_clip();
  MockLlmOptions opts;
  opts.script[prompt_hash(build_long_description_prompt(fused))] =
      "{'Q': 'Can you walk me through this clip?', 'A': 'A scripted description.'}";
  MockLlmServer server(opts);
  LlmConfig cfg;
  cfg.endpoint_url = server.url();
  cfg.api_key_env = "";
  auto gen = generate_for_clip(fused, [&](const PromptMessages& p) { return request_completion(p, cfg); });
  ASSERT_FALSE(gen.quarantine);
  auto n = std::count_if(gen.records.begin(), gen.records.end(),
                         [](auto& r) { return r.kind == QaKind::LongDescription; });
  EXPECT_EQ(n, 1);
  EXPECT_EQ(gen.records[0].answer, "A scripted description.");
}

TEST(MockDatasetTest, GarbageFallbackQuarantines) {
  MockLlmOptions opts;
  opts.fallback = MockFallback::Garbage;
  MockLlmServer server(opts);
  LlmConfig cfg;
  cfg.endpoint_url = server.url();
  cfg.api_key_env = "";
  auto gen = generate_for_clip(single_clip(), [&](const PromptMessages& p) { return request_completion(p, cfg); });
  ASSERT_TRUE(gen.quarantine);
  EXPECT_EQ(gen.quarantine->step, "long_description");
  EXPECT_EQ(server.request_count(), 2u);
}

TEST(MockDatasetTest, NoRosterNameReachesThePrompt) {
  auto a = blank_match();
  a.roster = Roster{a.match_id, {{"Zlatan", Team::Away, RosterKind::Player}, {"Rovers", Team::Home, RosterKind::Team}}};
  a.camera = {camera(0, 60000)};
  a.events = {event(30000, "Goal", Team::Away)};
  a.captions = {caption(35000, "Zlatan scores against Rovers")};
  ClipSpec clip;
  clip.clip_id = "x";
  clip.match = a.match_id;
  clip.span = {25000, 35000};
  clip.anchor_event = a.events[0];
  auto fused = fuse(clip, a);
  ASSERT_TRUE(fused);
  auto prompt = build_long_description_prompt(*fused).messages()[1].content;
  auto caption_block = prompt.substr(prompt.find("Possible Supporting Caption:"));
  caption_block = caption_block.substr(0, caption_block.find("-----"));
  EXPECT_EQ(caption_block.find("Zlatan"), std::string::npos);
  EXPECT_EQ(caption_block.find("Rovers"), std::string::npos);
  EXPECT_NE(caption_block.find("blue-jerseyed team player scores against red-jerseyed team"), std::string::npos);
}
