#include <gtest/gtest.h>

#include <atomic>
#include <set>
#include <thread>

#include "lakelet/error.hpp"
#include "lakelet/hash.hpp"
#include "lakelet/lake_store.hpp"
#include "test_support.hpp"

namespace lakelet {
namespace {

namespace fs = std::filesystem;
using testing::TempDir;

template <typename F>
ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const LakeError& e) {
    return e.code();
  }
  ADD_FAILURE() << "no LakeError thrown";
  return ErrorCode::kInvalidArgument;
}

ObjectKey key(std::string file, std::string part = "p0") {
  return ObjectKey{Zone::kRaw, "ds", std::move(part), std::move(file)};
}

const DatasetId kDs{Zone::kRaw, "ds"};

TEST(Hash, KnownVectors) {
  EXPECT_EQ(sha256_hex(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Names, Validation) {
  EXPECT_TRUE(is_valid_name("tweets_2019-a"));
  EXPECT_FALSE(is_valid_name(""));
  EXPECT_FALSE(is_valid_name("Tweets"));
  EXPECT_FALSE(is_valid_name("a/b"));
  EXPECT_FALSE(is_valid_name(".."));
}

TEST(DatasetId, ParseAndRender) {
  auto id = DatasetId::parse("curated/sales");
  EXPECT_EQ(id.zone, Zone::kCurated);
  EXPECT_EQ(id.name, "sales");
  EXPECT_EQ(id.to_string(), "curated/sales");
  EXPECT_EQ(code_of([] { DatasetId::parse("nozone"); }), ErrorCode::kInvalidKey);
  EXPECT_EQ(code_of([] { DatasetId::parse("gold/x"); }), ErrorCode::kInvalidKey);
}

TEST(ObjectKey, RejectsTraversal) {
  EXPECT_EQ(code_of([] { key("../x").validate(); }), ErrorCode::kInvalidKey);
  EXPECT_EQ(code_of([] { key("a", "x/y").validate(); }), ErrorCode::kInvalidKey);
  EXPECT_EQ(code_of([] { key("").validate(); }), ErrorCode::kInvalidKey);
  EXPECT_EQ(key("f.csv").relative_path(), fs::path("zones/raw/ds/p0/f.csv"));
  EXPECT_EQ(key("f.csv", "").relative_path(), fs::path("zones/raw/ds/f.csv"));
}

TEST(LakeStore, EmptyPayloadHash) {
  TempDir dir;
  LakeStore store(dir.path());
  auto ref = store.put_object(key("empty"), "");
  EXPECT_EQ(ref.size_bytes, 0u);
  EXPECT_EQ(ref.content_hash, "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  store.commit_manifest(kDs, {ref});
  EXPECT_EQ(store.read_object(ref), "");
}

TEST(LakeStore, PutIsWriteOnce) {
  TempDir dir;
  LakeStore store(dir.path());
  store.put_object(key("a"), "one");
  EXPECT_EQ(code_of([&] { store.put_object(key("a"), "two"); }), ErrorCode::kDuplicateObject);
  EXPECT_EQ(testing::slurp(store.object_path(key("a"))), "one");
}

TEST(LakeStore, UncommittedObjectsAreInvisible) {
  TempDir dir;
  LakeStore store(dir.path());
  store.put_object(key("a"), "x");
  EXPECT_EQ(store.current_version(kDs), 0u);
  EXPECT_TRUE(store.list_objects(kDs).empty());
  EXPECT_FALSE(store.latest_manifest(kDs).has_value());
  EXPECT_TRUE(store.committed_datasets().empty());
}

TEST(LakeStore, VersionsAccumulateAndHistoryIsReadable) {
  TempDir dir;
  LakeStore store(dir.path());
  auto a = store.put_object(key("b"), "bb", 1);
  auto m1 = store.commit_manifest(kDs, {a});
  EXPECT_EQ(m1.version, 1u);
  auto b = store.put_object(key("a", "p1"), "aa");
  auto c = store.put_object(key("a"), "cc");
  auto m2 = store.commit_manifest(kDs, {b, c});
  EXPECT_EQ(m2.version, 2u);
  ASSERT_EQ(m2.files.size(), 3u);
  // Sorted by (partition, filename).
  EXPECT_EQ(m2.files[0].key, key("a"));
  EXPECT_EQ(m2.files[1].key, key("b"));
  EXPECT_EQ(m2.files[2].key, key("a", "p1"));
  EXPECT_EQ(m2.hash_algo, "sha256");
  EXPECT_EQ(store.list_objects(kDs, 1).size(), 1u);
  EXPECT_EQ(store.list_objects(kDs), m2.files);
  EXPECT_EQ(store.list_objects(kDs, 1)[0].record_count, std::optional<uint64_t>(1));
  EXPECT_EQ(code_of([&] { store.list_objects(kDs, 3); }), ErrorCode::kUnknownVersion);
  EXPECT_EQ(code_of([&] { store.list_objects(kDs, 0); }), ErrorCode::kUnknownVersion);
  EXPECT_EQ(store.committed_datasets(), std::vector<DatasetId>{kDs});
  EXPECT_EQ(*store.latest_manifest(kDs), m2);
}

TEST(LakeStore, CurrentHoldsBareVersion) {
  TempDir dir;
  LakeStore store(dir.path());
  store.commit_manifest(kDs, {store.put_object(key("a"), "x")});
  EXPECT_EQ(testing::slurp(store.manifest_dir(kDs) / "CURRENT"), "1");
}

TEST(LakeStore, CommitErrors) {
  TempDir dir;
  LakeStore store(dir.path());
  auto a = store.put_object(key("a"), "x");
  ObjectRef ghost{key("ghost"), 1, sha256_hex("g"), std::nullopt};
  EXPECT_EQ(code_of([&] { store.commit_manifest(kDs, {ghost}); }), ErrorCode::kDanglingRef);
  EXPECT_EQ(code_of([&] { store.commit_manifest(kDs, {a, a}); }), ErrorCode::kDuplicateObject);
  EXPECT_EQ(code_of([&] { store.commit_manifest({Zone::kRaw, "other"}, {a}); }), ErrorCode::kInvalidKey);
  ObjectRef wrong = a;
  wrong.content_hash = sha256_hex("y");
  EXPECT_EQ(code_of([&] { store.commit_manifest(kDs, {wrong}); }), ErrorCode::kCorruptObject);
  store.commit_manifest(kDs, {a});
  EXPECT_EQ(code_of([&] { store.commit_manifest(kDs, {a}); }), ErrorCode::kDuplicateObject);
  // A failed commit leaves the version untouched.
  EXPECT_EQ(store.current_version(kDs), 1u);
}

TEST(LakeStore, ReadDetectsTamperingAndLoss) {
  TempDir dir;
  LakeStore store(dir.path());
  auto a = store.put_object(key("a"), "original");
  store.commit_manifest(kDs, {a});
  fs::permissions(store.object_path(a.key), fs::perms::owner_write, fs::perm_options::add);
  testing::spit(store.object_path(a.key), "tampered");
  EXPECT_EQ(code_of([&] { store.read_object(a); }), ErrorCode::kCorruptObject);
  fs::remove(store.object_path(a.key));
  EXPECT_EQ(code_of([&] { store.read_object(a); }), ErrorCode::kMissingObject);
}

TEST(LakeStore, RecoveryRemovesTempsAndRepairsCurrent) {
  TempDir dir;
  {
    LakeStore store(dir.path());
    store.commit_manifest(kDs, {store.put_object(key("a"), "x")});
    store.commit_manifest(kDs, {store.put_object(key("b"), "y")});
  }
  LakeStore probe(dir.path());
  fs::path mdir = probe.manifest_dir(kDs);
  // Crash after the version file landed but before CURRENT moved.
  testing::spit(mdir / "CURRENT", "1");
  // Half-written staging files, in both trees.
  testing::spit(mdir / ".v3.json.tmp-abc", "{");
  testing::spit(dir.path() / "zones/raw/ds/p0/.c.tmp-def", "partial");
  // A torn newest manifest.
  testing::spit(mdir / "v3.json", "{\"dataset\":");

  LakeStore store(dir.path());
  EXPECT_EQ(store.recovery_stats().temp_files_removed, 2u);
  EXPECT_EQ(store.recovery_stats().manifests_quarantined, 1u);
  EXPECT_EQ(store.recovery_stats().current_repaired, 1u);
  EXPECT_EQ(store.current_version(kDs), 2u);
  EXPECT_FALSE(fs::exists(mdir / ".v3.json.tmp-abc"));
  EXPECT_TRUE(fs::exists(mdir / "v3.json.corrupt"));
  // The next commit reuses version 3.
  auto m = store.commit_manifest(kDs, {store.put_object(key("c"), "z")});
  EXPECT_EQ(m.version, 3u);
  EXPECT_EQ(m.files.size(), 3u);
}

TEST(LakeStore, RecoveryIsIdempotentOnCleanLake) {
  TempDir dir;
  {
    LakeStore store(dir.path());
    store.commit_manifest(kDs, {store.put_object(key("a"), "x")});
  }
  LakeStore store(dir.path());
  EXPECT_EQ(store.recovery_stats().temp_files_removed, 0u);
  EXPECT_EQ(store.recovery_stats().current_repaired, 0u);
  EXPECT_EQ(store.current_version(kDs), 1u);
}

TEST(LakeStore, ConcurrentCommitsLoseNothing) {
  TempDir dir;
  LakeStore store(dir.path());
  constexpr int kThreads = 4;
  constexpr int kPerThread = 15;
  {
    std::vector<std::jthread> threads;
    for (int t = 0; t < kThreads; ++t) {
      threads.emplace_back([&, t] {
        for (int i = 0; i < kPerThread; ++i) {
          auto ref = store.put_object(key("t" + std::to_string(t) + "-" + std::to_string(i)), "x");
          store.commit_manifest(kDs, {ref});
        }
      });
    }
  }
  EXPECT_EQ(store.current_version(kDs), uint64_t{kThreads * kPerThread});
  EXPECT_EQ(store.list_objects(kDs).size(), size_t{kThreads * kPerThread});
}

TEST(LakeStore, TwoHandlesRebaseOnEachOther) {
  TempDir dir;
  LakeStore s1(dir.path());
  LakeStore s2(dir.path());
  {
    std::vector<std::jthread> threads;
    for (int h = 0; h < 2; ++h) {
      threads.emplace_back([&, h] {
        LakeStore& s = h == 0 ? s1 : s2;
        for (int i = 0; i < 10; ++i) {
          s.commit_manifest(kDs, {s.put_object(key("h" + std::to_string(h) + "-" + std::to_string(i)), "x")});
        }
      });
    }
  }
  EXPECT_EQ(s1.current_version(kDs), 20u);
  EXPECT_EQ(s2.list_objects(kDs).size(), 20u);
}

// Readers only ever observe whole commits.
TEST(LakeStore, SnapshotReadsAreAtomic) {
  TempDir dir;
  LakeStore store(dir.path());
  std::atomic<bool> done{false};
  std::atomic<int> bad{0};
  std::jthread reader([&] {
    while (!done) {
      auto files = store.list_objects(kDs);
      if (files.size() % 3 != 0) ++bad;
    }
  });
  for (int i = 0; i < 30; ++i) {
    std::vector<ObjectRef> refs;
    for (int k = 0; k < 3; ++k) refs.push_back(store.put_object(key(std::to_string(i) + "-" + std::to_string(k)), "r"));
    store.commit_manifest(kDs, refs);
  }
  done = true;
  reader.join();
  EXPECT_EQ(bad.load(), 0);
}

}  // namespace
}  // namespace lakelet
