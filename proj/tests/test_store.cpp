#include <gtest/gtest.h>

#include <fstream>
#include <thread>

#include "demod/error.hpp"
#include "demod/store.hpp"
#include "support.hpp"

namespace demod {
namespace {

UserProfile sample_profile(const std::string& id) {
  UserProfile p;
  p.user_id = id;
  p.historical_posts = {{"today the weather is pleasant", std::nullopt, id}};
  p.interaction_contexts["friend"] = {{"hey", 1}};
  p.pairs = {{"today the weather is nasty", "today the weather is pleasant", id + "#0",
              {{"pleasant", "nasty", 4, 21}}}};
  return p;
}

TEST(Store, ProfileVersionIncrements) {
  Store store(std::make_shared<MemoryBackend>());
  EXPECT_EQ(store.put_profile(sample_profile("u1")).version, 1u);
  const auto second = store.put_profile(sample_profile("u1"));
  EXPECT_EQ(second.version, 2u);
  EXPECT_EQ(store.get_profile("u1"), second);
  try {
    store.get_profile("nobody");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotFound);
  }
}

TEST(Store, FileBackendSurvivesRestart) {
  testing::TempDir dir("store");
  ToxicWordSpace space(2);
  space.insert("nasty", {0.5, -0.5});
  {
    Store store(std::make_shared<FileBackend>(dir.path()), [] { return Timestamp{100}; });
    store.put_profile(sample_profile("user/with spaces"));
    store.record_grant({"user/with spaces", {Scope::HistoricalPosts}, 100, false});
    store.put_word_space("default", space);
    store.append_audit("user/with spaces", "authorize");
    store.append_audit("other", "login");
  }
  Store reopened(std::make_shared<FileBackend>(dir.path()), [] { return Timestamp{200}; });
  auto want = sample_profile("user/with spaces");
  want.version = 1;
  EXPECT_EQ(reopened.get_profile("user/with spaces"), want);
  EXPECT_TRUE(reopened.check_grant("user/with spaces", Scope::HistoricalPosts));
  EXPECT_FALSE(reopened.check_grant("user/with spaces", Scope::InteractionContexts));
  EXPECT_EQ(reopened.get_word_space("default"), space);
  const auto next = reopened.append_audit("other", "detect");
  EXPECT_EQ(next.sequence, 2u);
  EXPECT_EQ(next.timestamp, 200);
  EXPECT_TRUE(std::filesystem::exists(dir.path() / "audit.jsonl"));
  EXPECT_TRUE(std::filesystem::exists(dir.path() / "profiles" / "user%2Fwith%20spaces.json"));
}

TEST(Store, RevokeLeavesTombstoneAndErasesData) {
  Store store(std::make_shared<MemoryBackend>());
  store.put_profile(sample_profile("u1"));
  store.record_grant({"u1", {Scope::HistoricalPosts, Scope::InteractionContexts}, 1, false});
  store.revoke("u1");
  EXPECT_FALSE(store.has_profile("u1"));
  EXPECT_TRUE(store.get_pairs("u1").empty());
  const auto grant = store.get_grant("u1");
  ASSERT_TRUE(grant);
  EXPECT_TRUE(grant->revoked);
  for (auto s : all_scopes()) EXPECT_FALSE(store.check_grant("u1", s));
}

TEST(Store, AuditQueryExportPrune) {
  Timestamp t = 10;
  Store store(std::make_shared<MemoryBackend>(), [&] { return t; });
  store.append_audit("a", "login");
  t = 20;
  store.append_audit("b", "detect", {{"verdict", "toxic"}});
  t = 30;
  store.append_audit("a", "detect", {{"note", "has, comma"}});
  EXPECT_EQ(store.query_audit(std::string("a")).size(), 2u);
  EXPECT_EQ(store.query_audit(std::nullopt, std::string("detect")).size(), 2u);
  const auto csv = store.export_audit_csv();
  EXPECT_EQ(csv.rfind("sequence,timestamp,user_id,operation,detail\n", 0), 0u);
  EXPECT_NE(csv.find("\"{\"\"note\"\":\"\"has, comma\"\"}\""), std::string::npos);
  EXPECT_EQ(store.prune_audit(20), 1u);
  const auto left = store.query_audit(std::nullopt);
  ASSERT_EQ(left.size(), 2u);
  EXPECT_EQ(left[0].sequence, 1u);
}

TEST(Store, ConcurrentAuditAppendsKeepEveryEvent) {
  testing::TempDir dir("audit");
  Store store(std::make_shared<FileBackend>(dir.path()));
  std::vector<std::thread> threads;
  for (int t = 0; t < 8; ++t) {
    threads.emplace_back([&, t] {
      for (int i = 0; i < 25; ++i) store.append_audit("u" + std::to_string(t), "detect");
    });
  }
  for (auto& th : threads) th.join();
  const auto events = store.query_audit(std::nullopt);
  ASSERT_EQ(events.size(), 200u);
  std::set<std::uint64_t> seqs;
  for (const auto& e : events) seqs.insert(e.sequence);
  EXPECT_EQ(seqs.size(), 200u);
}

TEST(Store, CorruptFileIsStorageFailure) {
  testing::TempDir dir("corrupt");
  Store store(std::make_shared<FileBackend>(dir.path()));
  store.put_profile(sample_profile("u1"));
  std::ofstream(dir.path() / "profiles" / "u1.json") << "{not json";
  try {
    store.get_profile("u1");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::StorageFailure);
  }
}

TEST(Store, KeyEncoding) {
  EXPECT_EQ(encode_key_component("abc-1_2"), "abc-1_2");
  EXPECT_EQ(encode_key_component("../x"), "%2E%2E%2Fx");
  EXPECT_EQ(encode_key_component("蠢"), "%E8%A0%A2");
}

}  // namespace
}  // namespace demod
