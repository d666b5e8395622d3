// SPDX-FileCopyrightText: Copyright (c) 2026 The remcap Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>
#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <barrier>
#include <filesystem>
#include <random>
#include <thread>

#include "remcap/core/error.hpp"
#include "remcap/gateway/event_store.hpp"
#include "remcap/gateway/lease_table.hpp"
#include "remcap/gateway/scene.hpp"
#include "remcap/gateway/session.hpp"

namespace remcap::gateway {
namespace {

namespace fs = std::filesystem;

Errc code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return Errc::IoError;
}

TEST(LeaseTable, FirstAcquireGranted) {
  ManualClock clock(1'000'000);
  LeaseTable t(clock);
  auto l = t.acquire("alice", "lab", 300);
  EXPECT_EQ(l.holder, "alice");
  EXPECT_EQ(l.expires_at_micros(), 301'000'000u);
}

TEST(LeaseTable, SecondResearcherIsRefusedUntilExpiry) {
  ManualClock clock(0);
  LeaseTable t(clock);
  t.acquire("alice", "lab", 10);
  try {
    t.acquire("bob", "lab", 10);
    FAIL();
  } catch (const SceneBusyError& e) {
    EXPECT_EQ(e.code(), Errc::SceneBusy);
    EXPECT_EQ(e.current().holder, "alice");
    EXPECT_EQ(e.current().expires_at_micros(), 10'000'000u);
  }
  clock.advance(9'999'999);
  EXPECT_EQ(code_of([&] { t.acquire("bob", "lab", 10); }), Errc::SceneBusy);
  clock.advance(1);
  EXPECT_EQ(t.acquire("bob", "lab", 10).holder, "bob");
  EXPECT_EQ(code_of([&] { t.validate("lab", "alice"); }), Errc::LeaseInvalid);
}

TEST(LeaseTable, HolderRenews) {
  ManualClock clock(0);
  LeaseTable t(clock);
  t.acquire("alice", "lab", 10);
  clock.advance(8'000'000);
  auto renewed = t.acquire("alice", "lab", 10);
  EXPECT_EQ(renewed.expires_at_micros(), 18'000'000u);
}

TEST(LeaseTable, ReleaseRequiresHolder) {
  ManualClock clock(0);
  LeaseTable t(clock);
  t.acquire("alice", "lab", 10);
  EXPECT_EQ(code_of([&] { t.release("lab", "bob"); }), Errc::LeaseInvalid);
  t.release("lab", "alice");
  EXPECT_FALSE(t.current("lab"));
  EXPECT_EQ(t.acquire("bob", "lab", 10).holder, "bob");
}

TEST(LeaseTable, SixteenConcurrentAcquiresGrantExactlyOne) {
  for (int round = 0; round < 20; ++round) {
    ManualClock clock(0);
    LeaseTable t(clock);
    std::atomic<int> granted{0}, busy{0};
    std::barrier sync(16);
    std::vector<std::thread> threads;
    for (int i = 0; i < 16; ++i) {
      threads.emplace_back([&, i] {
        sync.arrive_and_wait();
        try {
          t.acquire("r" + std::to_string(i), "lab", 300);
          ++granted;
        } catch (const SceneBusyError&) {
          ++busy;
        }
      });
    }
    for (auto& th : threads) th.join();
    ASSERT_EQ(granted.load(), 1);
    ASSERT_EQ(busy.load(), 15);
  }
}

TEST(LeaseTable, RandomInterleavingsNeverShareAScene) {
  std::mt19937_64 rng(5);
  ManualClock clock(0);
  LeaseTable t(clock);
  const std::vector<std::string> people{"a", "b", "c"};
  for (int step = 0; step < 5000; ++step) {
    const auto& who = people[rng() % 3];
    switch (rng() % 4) {
      case 0:
      case 1:
        try {
          t.acquire(who, "lab", 1 + rng() % 5);
        } catch (const SceneBusyError& e) {
          ASSERT_NE(e.current().holder, who);
          ASSERT_FALSE(e.current().expired_at(clock.now_micros()));
        }
        break;
      case 2:
        try {
          t.release("lab", who);
        } catch (const Error&) {
        }
        break;
      default: clock.advance(rng() % 3'000'000);
    }
    // At most one holder validates at any instant.
    int valid = 0;
    for (const auto& p : people) {
      try {
        t.validate("lab", p);
        ++valid;
      } catch (const Error&) {
      }
    }
    ASSERT_LE(valid, 1);
  }
}

class EventStoreTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("remcap-events-" + std::to_string(::getpid()));
    fs::remove_all(dir_);
    store_ = std::make_unique<EventStore>(dir_, broker_);
    id_ = Uuid::random();
    store_->create(id_);
  }
  void TearDown() override {
    store_.reset();
    fs::remove_all(dir_);
  }
  fs::path dir_;
  Broker broker_;
  std::unique_ptr<EventStore> store_;
  Uuid id_;
};

TEST_F(EventStoreTest, SeqStartsAtOneAndIsGapless) {
  EXPECT_EQ(store_->append(id_, EventKind::Marker, 3, R"({"text":"a"})"), 1u);
  EXPECT_EQ(store_->append(id_, EventKind::Marker, 1, R"({"text":"b"})"), 2u);
  auto all = store_->read(id_, 1);
  ASSERT_EQ(all.size(), 2u);
  EXPECT_EQ(all[1].seq, 2u);
  EXPECT_EQ(store_->read(id_, 2).size(), 1u);
  EXPECT_TRUE(store_->read(id_, 3).empty());
}

TEST_F(EventStoreTest, PayloadsAreCanonicalAndValidated) {
  store_->append(id_, EventKind::Command, 0, R"({ "value" : 50, "kind":"SET_SPEED" })");
  EXPECT_EQ(store_->read(id_)[0].payload, R"({"kind":"SET_SPEED","value":50})");
  EXPECT_EQ(code_of([&] { store_->append(id_, EventKind::Marker, 0, "{nope"); }),
            Errc::MalformedPayload);
  EXPECT_EQ(code_of([&] { store_->append(Uuid::random(), EventKind::Marker, 0, "{}"); }),
            Errc::UnknownSession);
  EXPECT_EQ(code_of([&] { store_->read(Uuid::random()); }), Errc::UnknownSession);
}

TEST_F(EventStoreTest, ThousandConcurrentAppendsAreGapless) {
  std::vector<std::uint64_t> seqs(1000);
  std::vector<std::thread> threads;
  for (int t = 0; t < 8; ++t) {
    threads.emplace_back([&, t] {
      for (int i = t; i < 1000; i += 8)
        seqs[i] = store_->append(id_, EventKind::Marker, i, "{\"i\":" + std::to_string(i) + "}");
    });
  }
  for (auto& th : threads) th.join();
  std::sort(seqs.begin(), seqs.end());
  for (std::uint64_t i = 0; i < 1000; ++i) ASSERT_EQ(seqs[i], i + 1);
  auto all = store_->read(id_);
  for (std::uint64_t i = 0; i < all.size(); ++i) ASSERT_EQ(all[i].seq, i + 1);
}

TEST_F(EventStoreTest, FileMirrorsMemory) {
  for (int i = 0; i < 5; ++i) store_->append(id_, EventKind::Lifecycle, i, R"({"event":"x"})");
  EXPECT_EQ(EventStore::load_file(store_->path_for(id_)), store_->read(id_));
}

TEST_F(EventStoreTest, SubscriberAttachedBeforeAppendsSeesAllInOrder) {
  auto sub = broker_.subscribe(events_channel(id_));
  for (int i = 0; i < 50; ++i) store_->append(id_, EventKind::Marker, i, "{}");
  for (std::uint64_t i = 1; i <= 50; ++i) {
    auto msg = sub->pop_for(std::chrono::seconds(1));
    ASSERT_TRUE(msg);
    EXPECT_EQ(nlohmann::json::parse(*msg)["seq"], i);
  }
}

TEST(Broker, SlowSubscriberDropsOldestOnly) {
  Broker broker(4);
  auto slow = broker.subscribe("c");
  auto other = broker.subscribe("d");
  for (int i = 0; i < 10; ++i) broker.publish("c", std::to_string(i));
  std::vector<std::string> got;
  while (slow->size()) got.push_back(*slow->pop());
  EXPECT_EQ(got, (std::vector<std::string>{"6", "7", "8", "9"}));
  EXPECT_EQ(slow->dropped(), 6u);
  EXPECT_EQ(other->size(), 0u);
  broker.unsubscribe("c", slow);
  EXPECT_EQ(broker.publish("c", "x"), 0u);
}

TEST(StatusMachine, OnlyForward) {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 500; ++trial) {
    StatusMachine m;
    int prev = 0;
    for (int step = 0; step < 10; ++step) {
      auto to = static_cast<SessionStatus>(rng() % 4);
      const bool ok = m.advance(to);
      EXPECT_EQ(ok, static_cast<int>(to) > prev);
      ASSERT_GE(static_cast<int>(m.status()), prev);
      prev = static_cast<int>(m.status());
    }
  }
  EXPECT_EQ(session_status_name(SessionStatus::Packed), "PACKED");
}

TEST(SceneRegistry, ParsesAndValidates) {
  auto j = nlohmann::json::parse(R"({"scenes":[
    {"scene_id":"lab","description":"bench","devices":[{"device_id":1,"capabilities":"camera"},{"device_id":2}]},
    {"scene_id":"yard","devices":[{"device_id":1}]}]})");
  auto reg = SceneRegistry::from_json(j);
  EXPECT_EQ(reg.at("lab").devices.size(), 2u);
  EXPECT_TRUE(reg.at("lab").has_device(2));
  EXPECT_FALSE(reg.at("yard").has_device(2));
  EXPECT_EQ(code_of([&] { reg.at("moon"); }), Errc::UnknownScene);
  EXPECT_EQ(scene_from_json(to_json(reg.at("lab"))), reg.at("lab"));
  auto dup = nlohmann::json::parse(R"([{"scene_id":"a","devices":[{"device_id":1},{"device_id":1}]}])");
  EXPECT_EQ(code_of([&] { SceneRegistry::from_json(dup); }), Errc::InvalidArgument);
}

}  // namespace
}  // namespace remcap::gateway
