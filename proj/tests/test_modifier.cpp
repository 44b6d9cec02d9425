#include <gtest/gtest.h>

#include "demod/error.hpp"
#include "demod/modifier.hpp"
#include "support.hpp"

namespace demod {
namespace {

using testing::tokenizer;

const char* kDemoText =
    "Some fans of celebrities bully female artists. I didn't know before, but now I do. The "
    "fans are really repulsive";
const char* kDemoRevision =
    "The attitude of some celebrities' fans towards female artists is perplexing. I didn't "
    "know before, but now I do. The fans are truly troubling";

std::vector<PairExample> make_pairs(int n) {
  std::vector<PairExample> out;
  for (int i = 0; i < n; ++i) {
    out.push_back({"toxic " + std::to_string(i), "nontoxic " + std::to_string(i),
                   "u#" + std::to_string(i), {}});
  }
  return out;
}

struct Rig {
  std::shared_ptr<ChatProvider> chat;
  std::shared_ptr<Detector> detector;
  std::shared_ptr<Modifier> modifier;

  explicit Rig(std::shared_ptr<ChatProvider> c, ModifierConfig cfg = {})
      : chat(std::move(c)),
        detector(std::make_shared<Detector>(chat, tokenizer())),
        modifier(std::make_shared<Modifier>(chat, detector, cfg)) {}
};

TEST(ParseRevision, JsonOrRaw) {
  EXPECT_EQ(parse_revision(R"({"revision": " calm words "})"), "calm words");
  EXPECT_EQ(parse_revision("just text\n"), "just text");
  EXPECT_THROW(parse_revision("  "), Error);
  EXPECT_THROW(parse_revision(R"({"revision": ""})"), Error);
}

TEST(ModificationPrompt, NewestPairsFirstToxicFirst) {
  Rig rig(std::make_shared<ScriptedChat>());
  const auto r = rig.modifier->build_modification_prompt({kDemoText, std::nullopt, {}},
                                                         make_pairs(7), 5);
  const auto& u = r.user_text;
  ASSERT_NE(u.find(kSamplesStart), std::string::npos);
  ASSERT_NE(u.find(kSamplesEnd), std::string::npos);
  EXPECT_LT(u.find("Sample 1\nToxic: toxic 6\nNontoxic: nontoxic 6"),
            u.find("Sample 2\nToxic: toxic 5"));
  EXPECT_NE(u.find("Sample 5\nToxic: toxic 2"), std::string::npos);
  EXPECT_EQ(u.find("toxic 1\n"), std::string::npos);
  EXPECT_EQ(u.find("Sample 6"), std::string::npos);
  EXPECT_EQ(r.system_text.find(kBasicExamplesHeader), std::string::npos);
  EXPECT_EQ(r.tag, "modify");
}

TEST(ModificationPrompt, BasicExamplesWithoutPairs) {
  Rig rig(std::make_shared<ScriptedChat>());
  const auto r =
      rig.modifier->build_modification_prompt({kDemoText, std::nullopt, {}}, {}, 5);
  EXPECT_EQ(r.user_text.find(kSamplesStart), std::string::npos);
  EXPECT_NE(r.system_text.find(kBasicExamplesHeader), std::string::npos);
  EXPECT_NE(r.system_text.find(basic_examples()), std::string::npos);
}

TEST(Modify, FanBullyingDemoConvergesInOneRound) {
  auto chat = std::make_shared<ScriptedChat>();
  chat->add("detect", "perplexing", R"({"verdict":"N","keywords":[],"explanation":"fine"})");
  chat->add("detect", "",
            R"({"verdict":"Y","keywords":["bully","repulsive"],"explanation":"toxic"})");
  chat->add("modify", "", std::string(R"({"revision": ")") + kDemoRevision + "\"}");
  Rig rig(chat);
  const auto r = rig.modifier->modify({kDemoText, std::string("FanBullying"), "u"}, {});
  EXPECT_TRUE(r.converged);
  EXPECT_EQ(r.iterations, 1);
  EXPECT_EQ(r.revised_text, kDemoRevision);
  EXPECT_FALSE(r.final_detection.toxic());
}

TEST(Modify, NontoxicInputShortCircuits) {
  auto chat = testing::rule_chat();
  Rig rig(chat);
  const auto r = rig.modifier->modify({"today the weather is pleasant", std::nullopt, {}}, {});
  EXPECT_TRUE(r.converged);
  EXPECT_EQ(r.iterations, 0);
  EXPECT_EQ(r.revised_text, "today the weather is pleasant");
}

TEST(Modify, NeverDetoxifyingStopsAtMaxIters) {
  Rig rig(testing::rule_chat(false), ModifierConfig{5, 3, 0.0, std::nullopt});
  const auto r = rig.modifier->modify({"the referee is a vile moron", std::nullopt, {}}, {});
  EXPECT_FALSE(r.converged);
  EXPECT_EQ(r.iterations, 3);
  EXPECT_TRUE(r.final_detection.toxic());
  EXPECT_EQ(r.revised_text, "the referee is a vile moron");
}

TEST(Modify, RetryFeedsLatestRevision) {
  auto chat = std::make_shared<ScriptedChat>();
  chat->add("detect", "gentle words", R"({"verdict":"N","keywords":[],"explanation":"ok"})");
  chat->add("detect", "", R"({"verdict":"Y","keywords":[],"explanation":"bad"})");
  chat->add("modify", "first attempt", R"({"revision":"gentle words now"})");
  chat->add("modify", "", R"({"revision":"first attempt still rude"})");
  Rig rig(chat);
  const auto r = rig.modifier->modify({"rude original text here", std::nullopt, {}}, {});
  EXPECT_TRUE(r.converged);
  EXPECT_EQ(r.iterations, 2);
  EXPECT_EQ(r.revised_text, "gentle words now");
  std::vector<std::string> subjects;
  for (const auto& req : chat->requests()) {
    if (req.tag == "modify") subjects.push_back(req.subject);
  }
  EXPECT_EQ(subjects, (std::vector<std::string>{"rude original text here",
                                                "first attempt still rude"}));
}

TEST(Modify, RuleChatDetoxifiesWithSynonyms) {
  Rig rig(testing::rule_chat());
  const auto r = rig.modifier->modify({kDemoText, std::string("FanBullying"), "u"}, {});
  EXPECT_TRUE(r.converged);
  EXPECT_EQ(r.iterations, 1);
  EXPECT_NE(r.revised_text.find("troubling"), std::string::npos);
  EXPECT_NE(r.revised_text.find("criticize"), std::string::npos);
}

TEST(Modify, ConfigValidation) {
  auto chat = std::make_shared<ScriptedChat>();
  auto det = std::make_shared<Detector>(chat, tokenizer());
  EXPECT_THROW(Modifier(chat, det, ModifierConfig{5, 0, 0.0, std::nullopt}), Error);
}

}  // namespace
}  // namespace demod
