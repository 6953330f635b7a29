#include <random>

#include <gtest/gtest.h>

#include "fuzz_render.hpp"
#include "soccerforge/pseudo_json.hpp"
#include "soccerforge/qa_factory.hpp"

using namespace soccerforge;
using namespace testutil;

TEST(PseudoJsonTest, SingleQuotedDict) {
  auto j = parse_pseudo_json("{'Q': 'What happened?', 'A': 'A goal.'}");
  EXPECT_EQ(j["Q"], "What happened?");
  EXPECT_EQ(j["A"], "A goal.");
}

TEST(PseudoJsonTest, EscapedApostropheAndEmbeddedDoubleQuote) {
  auto j = parse_pseudo_json(R"({'A': 'The keeper\'s "save"'})");
  EXPECT_EQ(j["A"], "The keeper's \"save\"");
}

TEST(PseudoJsonTest, BareApostropheSurvives) {
  auto j = parse_pseudo_json("{'A': 'the keeper's save', 'B': 'ok'}");
  EXPECT_EQ(j["A"], "the keeper's save");
  EXPECT_EQ(j["B"], "ok");
}

TEST(PseudoJsonTest, PythonLiteralsAndTrailingCommas) {
  auto j = parse_pseudo_json("{'a': True, 'b': False, 'c': None, 'd': [1, 2,],}");
  EXPECT_EQ(j["a"], true);
  EXPECT_EQ(j["b"], false);
  EXPECT_TRUE(j["c"].is_null());
  EXPECT_EQ(j["d"].size(), 2u);
}

TEST(PseudoJsonTest, FirstFenceWins) {
  auto j = parse_pseudo_json("text {'x': 0} ```python\n{'x': 1}\n``` ```{'x': 2}```");
  EXPECT_EQ(j["x"], 1);
}

TEST(PseudoJsonTest, RawControlCharactersEscaped) {
  auto j = parse_pseudo_json("{'A': 'line one\nline two'}");
  EXPECT_EQ(j["A"], "line one\nline two");
}

TEST(PseudoJsonTest, NoObjectThrows) {
  EXPECT_THROW(parse_pseudo_json("no braces here"), PseudoJsonError);
  EXPECT_THROW(parse_pseudo_json("{'a': 'unterminated"), PseudoJsonError);
  EXPECT_THROW(parse_pseudo_json("{'a': {'b': 1}"), PseudoJsonError);
}

TEST(ParseQaTest, SingleQuotedOne) {
  auto parts = parse_qa_response("{'Q': 'What happened?', 'A': 'A goal.'}", ExpectedShape::One);
  ASSERT_EQ(parts.size(), 1u);
  EXPECT_EQ(parts[0], (QaPart{"What happened?", "A goal."}));
}

TEST(ParseQaTest, FencedStrictTripleInOrder) {
  std::string raw =
      "```json\n{\"A2\": \"a2\", \"Q1\": \"q1\", \"A1\": \"a1\", \"Q3\": \"q3\", \"Q2\": \"q2\", \"A3\": \"a3\"}\n```";
  auto parts = parse_qa_response(raw, ExpectedShape::Three);
  ASSERT_EQ(parts.size(), 3u);
  EXPECT_EQ(parts[0], (QaPart{"q1", "a1"}));
  EXPECT_EQ(parts[1], (QaPart{"q2", "a2"}));
  EXPECT_EQ(parts[2], (QaPart{"q3", "a3"}));
}

TEST(ParseQaTest, MissingA3IsWrongShape) {
  std::string raw = "{'Q1': 'q', 'A1': 'a', 'Q2': 'q', 'A2': 'a', 'Q3': 'q'}";
  try {
    parse_qa_response(raw, ExpectedShape::Three);
    FAIL() << "expected WrongShape";
  } catch (const WrongShape& e) {
    EXPECT_EQ(e.raw(), raw);
    EXPECT_NE(std::string(e.what()).find("A3"), std::string::npos);
  }
}

TEST(ParseQaTest, ExtraOrEmptyKeysAreWrongShape) {
  EXPECT_THROW(parse_qa_response("{'Q': 'q', 'A': 'a', 'Note': 'x'}", ExpectedShape::One), WrongShape);
  EXPECT_THROW(parse_qa_response("{'Q': '', 'A': 'a'}", ExpectedShape::One), WrongShape);
  EXPECT_THROW(parse_qa_response("{'Q': 1, 'A': 'a'}", ExpectedShape::One), WrongShape);
}

TEST(ParseQaTest, UnparseableKeepsRawText) {
  try {
    parse_qa_response("Sorry, I can't help.", ExpectedShape::One);
    FAIL() << "expected UnparseableResponse";
  } catch (const UnparseableResponse& e) {
    EXPECT_EQ(e.raw(), "Sorry, I can't help.");
  }
}

TEST(ParseQaTest, RoundTripOnFuzzedDicts) {
  std::mt19937_64 rng(2024);
  int recovered = 0;
  const int n = 10000;
  for (int i = 0; i < n; ++i) {
    bool three = rng() % 2;
    auto obj = qa_object(rng, three);
    auto style = kWellFormedStyles[rng() % std::size(kWellFormedStyles)];
    auto raw = render(obj, style);
    std::vector<QaPart> parts;
    try {
      parts = parse_qa_response(raw, three ? ExpectedShape::Three : ExpectedShape::One);
    } catch (const std::exception& e) {
      ADD_FAILURE() << e.what() << "\n" << raw;
      continue;
    }
    bool ok = true;
    if (three) {
      for (int k = 0; k < 3; ++k) {
        ok = ok && parts[k].question == obj["Q" + std::to_string(k + 1)] &&
             parts[k].answer == obj["A" + std::to_string(k + 1)];
      }
    } else {
      ok = parts[0].question == obj["Q"] && parts[0].answer == obj["A"];
    }
    EXPECT_TRUE(ok) << raw;
    recovered += ok;
  }
  EXPECT_EQ(recovered, n);
}

TEST(ParseQaTest, SloppyInputsParseOrRaiseResponseErrors) {
  std::mt19937_64 rng(99);
  for (int i = 0; i < 5000; ++i) {
    bool three = rng() % 2;
    auto raw = render_sloppy(qa_object(rng, three), rng);
    try {
      auto parts = parse_qa_response(raw, three ? ExpectedShape::Three : ExpectedShape::One);
      EXPECT_EQ(parts.size(), three ? 3u : 1u);
    } catch (const ResponseError&) {
    }
  }
}
