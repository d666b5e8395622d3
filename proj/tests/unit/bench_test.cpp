// SPDX-FileCopyrightText: Copyright (c) 2026 The remcap Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>
#include <spawn.h>
#include <sys/wait.h>

#include <cmath>
#include <fstream>
#include <sstream>
#include <thread>

#include "json_schema.hpp"
#include "remcap/bench/bench.hpp"
#include "remcap/core/error.hpp"
#include "remcap/stack/local_stack.hpp"

extern char** environ;

using namespace remcap;
using namespace std::chrono_literals;
using nlohmann::json;

namespace {

json load_schema() {
  std::ifstream in(std::string(REMCAP_TEST_DATA_DIR) + "/latency_report.schema.json");
  return json::parse(in);
}

std::vector<std::vector<std::string>> csv_rows(const std::string& csv) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(csv);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

pid_t spawn(const std::vector<std::string>& args) {
  std::vector<char*> argv;
  for (const auto& a : args) argv.push_back(const_cast<char*>(a.c_str()));
  argv.push_back(nullptr);
  pid_t pid = 0;
  if (posix_spawn(&pid, argv[0], nullptr, nullptr, argv.data(), environ) != 0) return -1;
  return pid;
}

}  // namespace

TEST(Bench, ExpectedFpsMatchesBudgetOverFrameSize) {
  // 48-byte header plus 1920*1080*3 pixel bytes; 15 frames worth of budget.
  const std::uint64_t frame = 48 + 1920ull * 1080 * 3;
  EXPECT_EQ(frame, 6'220'848u);
  EXPECT_DOUBLE_EQ(bench::expected_fps(Preset::P1080, 15 * frame, 30), 15.0);
  EXPECT_DOUBLE_EQ(bench::expected_fps(Preset::P1080, 93'312'720, 30), 15.0);
  EXPECT_DOUBLE_EQ(bench::expected_fps(Preset::P360, std::nullopt, 30), 30.0);
  EXPECT_DOUBLE_EQ(bench::expected_fps(Preset::P360, 1'000'000'000, 30), 30.0);
  const double p720 = 30'000'000.0 / (48 + 1280.0 * 720 * 3);
  EXPECT_DOUBLE_EQ(bench::expected_fps(Preset::P720, 30'000'000, 30), p720);
}

TEST(Bench, PopulationStandardDeviation) {
  std::vector<double> s{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  auto [mean, sd] = bench::mean_std(s);
  EXPECT_DOUBLE_EQ(mean, 5.5);
  EXPECT_DOUBLE_EQ(sd, std::sqrt(8.25));
  EXPECT_EQ(bench::mean_std({}), std::make_pair(0.0, 0.0));
}

TEST(Bench, TaskNamesFollowTheTableOrder) {
  EXPECT_EQ(bench::latency_task_names(),
            (std::vector<std::string>{"Loading the system", "Setting up the device",
                                      "Client-server latency", "Executing control command"}));
}

TEST(Bench, LatencyReportHasFourRowsAndMatchesSchema) {
  bench::StackHandle stack(bench::StackTarget{});
  const auto report = bench::measure_task_latencies(stack, 10);
  ASSERT_EQ(report.tasks.size(), 4u);
  for (std::size_t i = 0; i < 4; ++i) {
    const auto& t = report.tasks[i];
    EXPECT_EQ(t.name, bench::latency_task_names()[i]);
    EXPECT_EQ(t.runs, 10u);
    ASSERT_EQ(t.samples_ms.size(), 10u);
    auto [mean, sd] = bench::mean_std(t.samples_ms);
    EXPECT_DOUBLE_EQ(t.mean_ms, mean);
    EXPECT_DOUBLE_EQ(t.std_ms, sd);
    EXPECT_GE(t.mean_ms, 0.0);
    EXPECT_LT(t.mean_ms, 100.0) << t.name;
  }
  json j = bench::to_json(report);
  j["report"] = "latency";
  j["runs"] = 10;
  const auto errors = remcap::testing::validate_schema(load_schema(), j);
  EXPECT_TRUE(errors.empty()) << errors.front();
}

TEST(Bench, SchemaRejectsRenamedRow) {
  json j{{"report", "latency"}, {"unit", "ms"}, {"runs", 10}, {"tasks", json::array()}};
  for (const auto& n : bench::latency_task_names()) {
    j["tasks"].push_back({{"name", n}, {"mean_ms", 1.0}, {"std_ms", 0.1}, {"runs", 10},
                          {"samples_ms", std::vector<double>(10, 1.0)}});
  }
  const auto schema = load_schema();
  EXPECT_TRUE(remcap::testing::validate_schema(schema, j).empty());
  j["tasks"][1]["name"] = "setting up the device";
  EXPECT_FALSE(remcap::testing::validate_schema(schema, j).empty());
  j["tasks"][1]["name"] = "Setting up the device";
  j["tasks"].erase(3);
  EXPECT_FALSE(remcap::testing::validate_schema(schema, j).empty());
}

TEST(Bench, UnreachableStack) {
  bench::StackTarget t;
  t.http = net::Endpoint{"127.0.0.1", 1};
  t.control = net::Endpoint{"127.0.0.1", 1};
  t.relay = net::Endpoint{"127.0.0.1", 1};
  try {
    bench::StackHandle h(t);
    FAIL() << "expected StackUnreachable";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::StackUnreachable);
  }
}

TEST(Bench, FpsNeedsAtLeastFiveSeconds) {
  bench::StackHandle stack(bench::StackTarget{});
  try {
    bench::measure_fps(stack, Preset::P360, std::nullopt, 2.0);
    FAIL() << "expected InvalidArgument";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::InvalidArgument);
  }
}

TEST(Bench, ResourceSamplesOwnProcess) {
  const auto csv = bench::sample_resources({"bench_test"}, 500ms, 2.0);
  const auto rows = csv_rows(csv);
  ASSERT_GE(rows.size(), 1u);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "ts,process,cpu,rss");
  const auto data = rows.size() - 1;
  EXPECT_GE(data, 3u);
  EXPECT_LE(data, 5u);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    ASSERT_EQ(rows[i].size(), 4u);
    EXPECT_EQ(rows[i][1], "bench_test");
    EXPECT_GE(std::stod(rows[i][2]), 0.0);
    EXPECT_GT(std::stoull(rows[i][3]), 0u);
  }
}

TEST(Bench, UnknownProcessIsNotFound) {
  try {
    bench::sample_resources({"no-such-process-xyz"}, 500ms, 1.0);
    FAIL() << "expected ProcessNotFound";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::ProcessNotFound);
  }
}

TEST(Bench, AgentCpuGrowsWithResolution) {
  stack::LocalStack s;
  auto mean_cpu = [&](const std::string& resolution, std::uint16_t device) {
    const pid_t pid = spawn({REMCAP_AGENT_BIN, "--scene", "lab", "--device", std::to_string(device),
                             "--resolution", resolution, "--relay", s.relay_endpoint().str(),
                             "--gateway", s.control_endpoint().str(), "--deterministic",
                             "--frames", "120", "--once"});
    EXPECT_GT(pid, 0);
    EXPECT_TRUE(s.gateway().wait_for_device("lab", device, 10s));
    auto lease = s.gateway().acquire_lease("bench", "lab");
    auto sessions = s.gateway().start_parallel_capture(lease, {device});
    const auto csv = bench::sample_resources({"remcap-agent"}, 250ms, 3.0);
    double sum = 0;
    std::size_t n = 0;
    const auto rows = csv_rows(csv);
    for (std::size_t i = 1; i < rows.size(); ++i, ++n) sum += std::stod(rows[i][2]);
    int status = 0;
    waitpid(pid, &status, 0);
    s.gateway().release_lease("lab", "bench");
    return n ? sum / n : 0.0;
  };
  const double low = mean_cpu("360p", 1);
  const double high = mean_cpu("1080p", 2);
  EXPECT_GT(high, low) << "360p " << low << "%, 1080p " << high << "%";
}
