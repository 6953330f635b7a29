#include <gtest/gtest.h>

#include "builders.hpp"
#include "soccerforge/qa_factory.hpp"

using namespace soccerforge;
using namespace testutil;

namespace {

FusedClip single_goal(std::string commentary = "What a stunning finish! The home team takes the lead!") {
  ClipSpec clip;
  clip.clip_id = "c1";
  clip.match = test_match();
  clip.span = {25000, 35000};
  clip.anchor_event = event(30000, "Goal", Team::Home);
  FusedClip f{clip, {"red-jerseyed team scores a brilliant goal!"}, std::move(commentary), {test_match(), "red", "blue"}, {}};
  return f;
}

FusedClip pair_clip() {
  EventPair p;
  p.clip_id = "p1";
  p.first = event(10000, "Throw-in", Team::Away);
  p.second = event(13500, "Shots off target", Team::Home);
  p.gap_ms = 3500;
  p.span = {8000, 16500};
  return FusedClip{p, {"cap"}, "", {test_match(), "red", "blue"}, {}};
}

bool contains(const std::string& s, std::string_view needle) { return s.find(needle) != std::string::npos; }

}  // namespace

TEST(PromptMessagesTest, MustOpenWithSystem) {
  EXPECT_THROW(PromptMessages({}), std::invalid_argument);
  EXPECT_THROW(PromptMessages({{Role::User, "x"}}), std::invalid_argument);
  PromptMessages p({{Role::System, "s"}, {Role::User, "u"}});
  EXPECT_EQ(p.system().content, "s");
  EXPECT_EQ(p.with_appended({Role::User, "v"}).messages().size(), 3u);
}

TEST(LongDescriptionPromptTest, EventSlotWithJerseyColors) {
  auto p = build_long_description_prompt(single_goal());
  ASSERT_EQ(p.messages().size(), 2u);
  const auto& user = p.messages()[1].content;
  EXPECT_TRUE(contains(user, "shows only Goal event by red-jerseyed team"));
  EXPECT_TRUE(contains(user, "in the match between teams in red vs blue jerseys."));
  EXPECT_TRUE(contains(user, "Possible Supporting Caption:\nred-jerseyed team scores a brilliant goal!"));
  EXPECT_TRUE(contains(user, "Possible Supporting Commentary:\nWhat a stunning finish!"));
}

TEST(LongDescriptionPromptTest, SystemTemplateIsVerbatim) {
  const auto prompt = build_long_description_prompt(single_goal());
  const auto& system = prompt.system().content;
  EXPECT_TRUE(system.starts_with("You will play two roles"));
  EXPECT_TRUE(contains(system, "with a minimum of 250 words and a maximum of 300 words."));
  EXPECT_TRUE(contains(system, "Don't mention about 'commentary' and 'caption' in the answer."));
  EXPECT_TRUE(system.ends_with("- Begin answers with creative opening."));
  const auto& user = prompt.messages()[1].content;
  EXPECT_TRUE(contains(user, "{'Q': 'Your question here...', 'A': 'Your answer here...'}"));
}

TEST(LongDescriptionPromptTest, PairedEventSlot) {
  auto slot = render_event_slot(pair_clip());
  EXPECT_EQ(slot,
            "shows Throw-in event by blue-jerseyed team followed by Shots off target event by red-jerseyed team "
            "3.5 seconds later in the match between teams in red vs blue jerseys.");
}

TEST(LongDescriptionPromptTest, EmptyCommentaryPlaceholder) {
  auto details = render_game_details(single_goal(""));
  EXPECT_TRUE(details.ends_with("Possible Supporting Commentary:\n(none)"));
}

TEST(LongDescriptionPromptTest, ReplayAndTeamlessEvents) {
  auto f = single_goal();
  auto& clip = std::get<ClipSpec>(f.clip);
  clip.kind = CameraKind::Replay;
  clip.anchor_event.team = Team::None;
  EXPECT_EQ(render_event_slot(f), "shows only a replay of the Goal event in the match between teams in red vs blue jerseys.");
}

TEST(DetailPromptTest, SampleQuestionsAndShape) {
  auto p = build_detail_qa_prompt("A long description.", "The clip shows a Goal event.");
  const auto& system = p.system().content;
  EXPECT_TRUE(contains(system, "Generate THREE different descriptive and conversational style questions"));
  EXPECT_TRUE(contains(system, "- How did the player score the goal in the clip?"));
  EXPECT_TRUE(contains(system, "- What defensive strategy did the team use to prevent the goal?"));
  EXPECT_TRUE(contains(system, "- Describe the sequence of passes that led to the goal."));
  EXPECT_TRUE(contains(system, "- Was there an offside violation in the buildup to the goal?"));
  EXPECT_TRUE(contains(system, "- How did the goalkeeper react to the shot?"));
  EXPECT_TRUE(contains(system, "The clip shows a Goal event. The questions should"));
  const auto& user = p.messages()[1].content;
  EXPECT_TRUE(user.starts_with("The video caption is: A long description."));
  EXPECT_TRUE(contains(user, "{'Q1': 'Your first question here...', 'A1': 'Your first answer here...', 'Q2': "
                             "'Your second question here...', 'A2': 'Your second answer here...', 'Q3': 'Your "
                             "third question here...', 'A3': 'Your third answer here...'}"));
}

TEST(DetailPromptTest, EmptyEventInfoLeavesNoGap) {
  const auto prompt = build_detail_qa_prompt("desc", "");
  const auto& system = prompt.system().content;
  EXPECT_TRUE(contains(system, "related to the visible events. The questions should"));
  EXPECT_FALSE(contains(system, "  "));
  EXPECT_FALSE(contains(system, "<"));
  EXPECT_FALSE(contains(system, "{"));
}

TEST(DetailPromptTest, EmptyDescriptionRejected) {
  EXPECT_THROW(build_detail_qa_prompt("", "x"), std::invalid_argument);
  EXPECT_THROW(build_overview_qa_prompt(""), std::invalid_argument);
}

TEST(OverviewPromptTest, SingleQaShape) {
  auto p = build_overview_qa_prompt("desc");
  EXPECT_TRUE(contains(p.messages()[1].content, "{'Q': 'Your question here...', 'A': 'Your answer here...'}"));
  EXPECT_FALSE(contains(p.messages()[1].content, "Q1"));
  EXPECT_TRUE(contains(p.system().content, "overall flow, strategic developments, or key moments"));
  EXPECT_TRUE(contains(p.system().content, "must not ask about specific timestamps"));
}

TEST(PromptDeterminismTest, SameInputsSameBytes) {
  EXPECT_EQ(build_long_description_prompt(single_goal()), build_long_description_prompt(single_goal()));
  EXPECT_EQ(prompt_hash(build_detail_qa_prompt("d", "e")), prompt_hash(build_detail_qa_prompt("d", "e")));
  EXPECT_EQ(prompt_hash(build_overview_qa_prompt("d")), prompt_hash(build_overview_qa_prompt("d")));
  EXPECT_NE(prompt_hash(build_overview_qa_prompt("d")), prompt_hash(build_overview_qa_prompt("e")));
  EXPECT_EQ(prompt_hash(build_overview_qa_prompt("d")).size(), 64u);
}

TEST(EventInfoTest, SingleAndPair) {
  EXPECT_EQ(describe_event_info(single_goal()), "The clip shows a Goal event by red-jerseyed team.");
  EXPECT_EQ(describe_event_info(pair_clip()),
            "The clip shows a Throw-in event by blue-jerseyed team, followed 3.5 seconds later by a Shots off "
            "target event by red-jerseyed team.");
}
