// SPDX-FileCopyrightText: Copyright (c) 2026 The remcap Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <chrono>
#include <fstream>
#include <thread>

#include "remcap/core/srt.hpp"
#include "remcap/inference/detector.hpp"
#include "remcap/packer/packer.hpp"
#include "remcap/stack/local_stack.hpp"
#include "stack_client.hpp"

using namespace remcap;
using namespace std::chrono_literals;
using nlohmann::json;
using remcap::testing::HttpJson;
using remcap::testing::WsClient;

namespace {

agent::AgentConfig agent_config(const std::string& scene, std::uint16_t device) {
  agent::AgentConfig c;
  c.scene_id = scene;
  c.device_id = device;
  c.deterministic_clock = true;
  return c;
}

std::string sid_of(const remcap::testing::HttpReply& r, std::size_t i = 0) {
  return r.body.at("sessions").at(i).at("session_id").get<std::string>();
}

Uuid uuid(const std::string& text) { return *Uuid::parse(text); }

bool wait_packed(stack::LocalStack& s, const std::string& sid, std::chrono::milliseconds t = 20s) {
  if (s.gateway().wait_for_status(uuid(sid), gateway::SessionStatus::Packed, t)) return true;
  for (const auto& e : s.gateway().read_events(uuid(sid))) {
    if (e.kind == EventKind::Lifecycle) ADD_FAILURE() << "lifecycle: " << e.payload;
  }
  if (auto* p = s.packing(); p && p->last_error()) ADD_FAILURE() << "packer: " << *p->last_error();
  return false;
}

std::vector<EventRecord> events_of(stack::LocalStack& s, const std::string& sid, EventKind kind) {
  std::vector<EventRecord> out;
  for (auto& e : s.gateway().read_events(uuid(sid))) {
    if (e.kind == kind) out.push_back(e);
  }
  return out;
}

}  // namespace

TEST(StackHttp, PingScenesAndErrors) {
  stack::LocalStack s;
  HttpJson http(s.http_endpoint());
  auto ping = http.get("/ping");
  EXPECT_EQ(ping.status, 200);
  EXPECT_GT(ping.body.at("ts_micros").get<std::uint64_t>(), 1'600'000'000'000'000ull);

  auto scenes = http.get("/scenes");
  ASSERT_EQ(scenes.status, 200);
  ASSERT_EQ(scenes.body.size(), 2u);

  auto missing = http.get("/sessions/00000000-0000-4000-8000-000000000000");
  EXPECT_EQ(missing.status, 404);
  EXPECT_EQ(missing.body.at("error"), "UnknownSession");

  auto bad = http.post("/leases", json{{"scene_id", "lab"}});
  EXPECT_EQ(bad.status, 400);
  EXPECT_EQ(bad.body.at("error"), "MalformedPayload");

  auto offline = http.post("/leases", json{{"researcher", "r1"}, {"scene_id", "lab"}});
  ASSERT_EQ(offline.status, 201);
  auto start = http.post("/sessions", json{{"researcher", "r1"}, {"scene_id", "lab"}, {"device_ids", {1}}});
  EXPECT_EQ(start.status, 409);
  EXPECT_EQ(start.body.at("error"), "DeviceOffline");
}

TEST(StackHttp, LeaseLifecycle) {
  stack::LocalStack s;
  HttpJson http(s.http_endpoint());
  auto a = http.post("/leases", json{{"researcher", "alice"}, {"scene_id", "lab"}, {"ttl_seconds", 60}});
  ASSERT_EQ(a.status, 201);
  EXPECT_EQ(a.body.at("holder"), "alice");

  auto b = http.post("/leases", json{{"researcher", "bob"}, {"scene_id", "lab"}});
  EXPECT_EQ(b.status, 409);
  EXPECT_EQ(b.body.at("error"), "SceneBusy");
  EXPECT_EQ(b.body.at("holder"), "alice");
  EXPECT_EQ(b.body.at("expires_at"), a.body.at("expires_at"));

  EXPECT_EQ(http.post("/leases", json{{"researcher", "bob"}, {"scene_id", "nope"}}).status, 404);
  EXPECT_EQ(http.del("/leases/lab?researcher=bob").status, 403);
  EXPECT_EQ(http.del("/leases/lab?researcher=alice").status, 204);
  EXPECT_EQ(http.post("/leases", json{{"researcher", "bob"}, {"scene_id", "lab"}}).status, 201);
  auto scenes = http.get("/scenes");
  for (const auto& sc : scenes.body) {
    if (sc.at("scene_id") == "lab") {
      EXPECT_EQ(sc.at("lease").at("holder"), "bob");
    }
  }
}

TEST(StackHttp, CommandAckLandsInTheLogAndContainerVerifies) {
  stack::LocalStack s;
  auto agent = s.launch_agent(agent_config("lab", 1));
  HttpJson http(s.http_endpoint());
  ASSERT_EQ(http.post("/leases", json{{"researcher", "r1"}, {"scene_id", "lab"}}).status, 201);
  auto start = http.post("/sessions", json{{"researcher", "r1"}, {"scene_id", "lab"}, {"device_ids", {1}}});
  ASSERT_EQ(start.status, 201) << start.raw;
  const auto sid = sid_of(start);
  EXPECT_EQ(start.body["sessions"][0]["status"], "LIVE");

  std::this_thread::sleep_for(300ms);
  auto ack = http.post("/sessions/" + sid + "/commands",
                       json{{"researcher", "r1"}, {"kind", "SET_SPEED"}, {"value", 50}, {"client_seq", 7}});
  ASSERT_EQ(ack.status, 200) << ack.raw;
  EXPECT_EQ(ack.body.at("command").at("client_seq"), 7);
  const auto applied = ack.body.at("applied_frame_index").get<std::uint64_t>();

  auto intruder = http.post("/sessions/" + sid + "/commands",
                            json{{"researcher", "mallory"}, {"kind", "STOP"}, {"client_seq", 1}});
  EXPECT_EQ(intruder.status, 403);

  auto clamped = http.post("/sessions/" + sid + "/commands",
                           json{{"researcher", "r1"}, {"kind", "SET_STEERING"}, {"value", -80}, {"client_seq", 8}});
  ASSERT_EQ(clamped.status, 200);
  EXPECT_EQ(clamped.body.at("command").at("value"), -30);

  auto commands = events_of(s, sid, EventKind::Command);
  ASSERT_EQ(commands.size(), 2u);
  EXPECT_EQ(commands[0].frame_index, applied);
  EXPECT_EQ(commands[0].payload, R"({"kind":"SET_SPEED","value":50})");
  EXPECT_EQ(commands[0].seq, ack.body.at("event_seq").get<std::uint64_t>());

  auto events = http.get("/sessions/" + sid + "/events?from=2");
  ASSERT_EQ(events.status, 200);
  EXPECT_EQ(events.body.at(0).at("seq"), 2);

  auto stats = http.get("/sessions/" + sid + "/stats");
  EXPECT_GT(stats.body.at("delivered").get<std::uint64_t>(), 0u);

  auto stop = http.post("/sessions/" + sid + "/stop", json{{"researcher", "r1"}});
  ASSERT_EQ(stop.status, 200) << stop.raw;
  ASSERT_TRUE(wait_packed(s, sid));

  auto container = http.get("/sessions/" + sid + "/container?verify=1");
  ASSERT_EQ(container.status, 200);
  EXPECT_TRUE(container.body.at("verification").at("passed").get<bool>()) << container.raw;

  EXPECT_EQ(http.post("/sessions/" + sid + "/stop", json{{"researcher", "r1"}}).status, 409);
  EXPECT_EQ(http.post("/sessions/" + sid + "/commands",
                      json{{"researcher", "r1"}, {"kind", "STOP"}, {"client_seq", 9}})
                .status,
            409);
  auto late = http.post("/sessions/" + sid + "/processors", json{{"name", "marker-detector"}});
  EXPECT_EQ(late.status, 409);
  EXPECT_EQ(late.body.at("error"), "SessionNotLive");
}

TEST(StackHttp, ScriptedSessionPacksItselfWithMarkers) {
  stack::LocalStack s;
  auto cfg = agent_config("yard", 2);
  auto step = [](std::uint64_t at, CommandKind k, double v) {
    return agent::ScriptedCommand{at, ControlCommand{0, k, v, 0}};
  };
  cfg.script = {step(10, CommandKind::SetSpeed, 60), step(30, CommandKind::SetSteering, 15),
                step(50, CommandKind::SetSpeed, 90), step(100, CommandKind::SetCamPan, 20),
                step(120, CommandKind::Stop, 0)};
  cfg.max_frames = 150;
  auto agent = s.launch_agent(cfg);
  HttpJson http(s.http_endpoint());
  ASSERT_EQ(http.post("/leases", json{{"researcher", "r"}, {"scene_id", "yard"}}).status, 201);
  auto start = http.post("/sessions", json{{"researcher", "r"}, {"scene_id", "yard"}, {"device_ids", {2}}});
  ASSERT_EQ(start.status, 201);
  const auto sid = sid_of(start);
  auto marker = http.post("/sessions/" + sid + "/markers", json{{"frame_index", 60}, {"text", "rate it"}});
  ASSERT_EQ(marker.status, 201);

  ASSERT_TRUE(wait_packed(s, sid));
  auto commands = events_of(s, sid, EventKind::Command);
  ASSERT_EQ(commands.size(), 5u);
  for (std::size_t i = 0; i < 5; ++i) EXPECT_EQ(commands[i].frame_index, cfg.script[i].at_frame);

  const auto info = s.gateway().session_info(uuid(sid));
  const auto report = packer::verify_container(info.container_dir);
  for (const auto& c : report.checks) EXPECT_TRUE(c.passed) << c.name << ": " << c.detail;
  EXPECT_EQ(report.frames_checked, 150u);

  const auto srt = read_text_file(ContainerLayout{info.container_dir}.srt());
  EXPECT_NE(srt.find("00:00:02,000 --> 00:00:03,000\nMARKER {\"text\":\"rate it\"}"), std::string::npos)
      << srt;

  // Replay over HTTP: binary items with their covering cues.
  auto frames = http.get("/sessions/" + sid + "/frames?from=88&limit=3");
  ASSERT_EQ(frames.status, 200);
  ByteView rest(reinterpret_cast<const std::uint8_t*>(frames.raw.data()), frames.raw.size());
  std::vector<std::pair<std::uint64_t, bool>> seen;
  while (!rest.empty()) {
    auto item = stack::decode_replay_item(rest);
    bool has_marker = false;
    for (const auto& c : item.cues) has_marker = has_marker || c.at("text").get<std::string>().rfind("MARKER", 0) == 0;
    seen.emplace_back(item.frame.frame_index, has_marker);
    rest = rest.subspan(item.consumed);
  }
  ASSERT_EQ(seen.size(), 3u);
  EXPECT_EQ(seen[0], std::make_pair(std::uint64_t{88}, true));
  EXPECT_EQ(seen[1], std::make_pair(std::uint64_t{89}, true));
  EXPECT_EQ(seen[2], std::make_pair(std::uint64_t{90}, false));

  auto past = http.get("/sessions/" + sid + "/frames?from=150");
  EXPECT_EQ(past.status, 404);
  EXPECT_EQ(past.body.at("error"), "FrameOutOfRange");
}

TEST(StackHttp, RepackDetectsTamperedSegment) {
  stack::LocalStack s;
  auto cfg = agent_config("lab", 2);
  cfg.max_frames = 45;
  auto agent = s.launch_agent(cfg);
  HttpJson http(s.http_endpoint());
  http.post("/leases", json{{"researcher", "r"}, {"scene_id", "lab"}});
  const auto sid = sid_of(http.post("/sessions", json{{"researcher", "r"}, {"scene_id", "lab"}, {"device_ids", {2}}}));
  ASSERT_TRUE(wait_packed(s, sid));
  EXPECT_NO_THROW(packer::pack_session(s.gateway(), uuid(sid)));

  const auto info = s.gateway().session_info(uuid(sid));
  const auto seg = ContainerLayout{info.container_dir}.segment(info.state.manifest->segments[0].file);
  {
    std::fstream f(seg, std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(4096);
    f.put('\x01');
  }
  try {
    packer::pack_session(s.gateway(), uuid(sid));
    FAIL() << "expected ChecksumMismatch";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::ChecksumMismatch);
  }
}

TEST(StackHttp, ParallelCaptureAcrossTwoScenes) {
  stack::LocalStack s;
  std::vector<std::unique_ptr<stack::RunningAgent>> agents;
  for (std::uint16_t d : {1, 2}) {
    auto c = agent_config("yard", d);
    c.encoding = FrameEncoding::RleRgb24;
    agents.push_back(s.launch_agent(c));
  }
  for (std::uint16_t d : {1, 2, 3}) {
    auto c = agent_config("lab", d);
    c.encoding = FrameEncoding::RleRgb24;
    agents.push_back(s.launch_agent(c));
  }
  HttpJson http(s.http_endpoint());
  ASSERT_EQ(http.post("/leases", json{{"researcher", "ana"}, {"scene_id", "yard"}}).status, 201);
  ASSERT_EQ(http.post("/leases", json{{"researcher", "ben"}, {"scene_id", "lab"}}).status, 201);
  auto yard = http.post("/sessions", json{{"researcher", "ana"}, {"scene_id", "yard"}, {"device_ids", {1, 2}}});
  auto lab = http.post("/sessions", json{{"researcher", "ben"}, {"scene_id", "lab"}, {"device_ids", {1, 2, 3}}});
  ASSERT_EQ(yard.status, 201);
  ASSERT_EQ(lab.status, 201);
  std::vector<std::pair<std::string, std::string>> sessions;
  for (std::size_t i = 0; i < 2; ++i) sessions.emplace_back(sid_of(yard, i), "ana");
  for (std::size_t i = 0; i < 3; ++i) sessions.emplace_back(sid_of(lab, i), "ben");

  std::this_thread::sleep_for(1500ms);
  std::size_t live = 0;
  for (const auto& [sid, _] : sessions) {
    live += s.gateway().session(uuid(sid)).status == gateway::SessionStatus::Live;
    EXPECT_TRUE(s.gateway().relay().ingest_active(uuid(sid)));
  }
  EXPECT_EQ(live, 5u);

  // Devices under the other researcher's lease are off limits.
  EXPECT_EQ(http.post("/sessions/" + sessions[0].first + "/stop", json{{"researcher", "ben"}}).status, 403);

  for (const auto& [sid, who] : sessions) {
    ASSERT_EQ(http.post("/sessions/" + sid + "/stop", json{{"researcher", who}}).status, 200);
  }
  std::uint64_t total = 0;
  for (const auto& [sid, _] : sessions) {
    ASSERT_TRUE(wait_packed(s, sid));
    const auto info = s.gateway().session_info(uuid(sid));
    const auto report = packer::verify_container(info.container_dir);
    EXPECT_TRUE(report.passed()) << packer::to_json(report).dump();
    EXPECT_GT(report.frames_checked, 0u);
    total += info.state.manifest->delivered_frames();
  }
  std::uint64_t stats_total = 0;
  for (const auto& [sid, _] : sessions) stats_total += s.gateway().relay().stats(uuid(sid)).delivered;
  EXPECT_EQ(total, stats_total);
}

TEST(StackWs, HelloPingAndErrors) {
  stack::LocalStack s;
  WsClient ws(s.ws_endpoint());
  auto hello = ws.next_of("hello", 5s);
  ASSERT_TRUE(hello);
  ws.send("ping", json{{"nonce", 42}});
  auto pong = ws.next_of("pong", 5s);
  ASSERT_TRUE(pong);
  EXPECT_EQ((*pong)["payload"]["nonce"], 42);

  ws.send_raw("not json");
  auto err = ws.next_of("error", 5s);
  ASSERT_TRUE(err);
  EXPECT_EQ((*err)["payload"]["error"], "MalformedPayload");

  ws.send("subscribe_events", json{{"session_id", Uuid::random().str()}});
  err = ws.next_of("error", 5s);
  ASSERT_TRUE(err);
  EXPECT_EQ((*err)["payload"]["error"], "UnknownSession");
  EXPECT_EQ((*err)["payload"]["request"], "subscribe_events");
}

TEST(StackWs, LiveControlPath) {
  stack::LocalStack s;
  auto agent = s.launch_agent(agent_config("lab", 3));
  HttpJson http(s.http_endpoint());
  http.post("/leases", json{{"researcher", "r"}, {"scene_id", "lab"}});
  const auto sid = sid_of(http.post("/sessions", json{{"researcher", "r"}, {"scene_id", "lab"}, {"device_ids", {3}}}));

  WsClient ws(s.ws_endpoint());
  ASSERT_TRUE(ws.next_of("hello", 5s));
  ws.send("subscribe_events", json{{"session_id", sid}, {"from_seq", 1}});
  ws.send("subscribe_frames", json{{"session_id", sid}});

  // Backlog first: the "started" LIFECYCLE event has seq 1.
  auto first = ws.next_of("event", 5s);
  ASSERT_TRUE(first);
  EXPECT_EQ((*first)["payload"]["seq"], 1);
  EXPECT_EQ((*first)["payload"]["kind"], "LIFECYCLE");

  std::vector<std::uint64_t> indices;
  const auto deadline = std::chrono::steady_clock::now() + 5s;
  while (indices.size() < 10 && std::chrono::steady_clock::now() < deadline) {
    auto m = ws.next(1s);
    if (!m || !m->binary) continue;
    ByteView b(reinterpret_cast<const std::uint8_t*>(m->data.data()), m->data.size());
    auto f = decode_frame_record(b);
    EXPECT_EQ(extract_frame_index(f), f.frame_index);
    indices.push_back(f.frame_index);
  }
  ASSERT_EQ(indices.size(), 10u);
  for (std::size_t i = 1; i < indices.size(); ++i) EXPECT_GT(indices[i], indices[i - 1]);

  ws.send("command", json{{"session_id", sid}, {"researcher", "r"}, {"kind", "SET_SPEED"},
                          {"value", 40}, {"client_seq", 11}});
  // The ack and the matching COMMAND event may arrive in either order.
  std::optional<json> ack;
  std::vector<json> command_events;
  const auto until = std::chrono::steady_clock::now() + 5s;
  while ((!ack || command_events.empty()) && std::chrono::steady_clock::now() < until) {
    auto msg = ws.next(1s);
    if (!msg || msg->binary) continue;
    auto j = msg->json();
    if (j["type"] == "command_ack") ack = j;
    if (j["type"] == "event" && j["payload"]["kind"] == "COMMAND") command_events.push_back(j);
  }
  ASSERT_TRUE(ack);
  EXPECT_EQ((*ack)["payload"]["command"]["client_seq"], 11);
  ASSERT_EQ(command_events.size(), 1u);
  EXPECT_EQ(command_events[0]["payload"]["frame_index"], (*ack)["payload"]["applied_frame_index"]);
  EXPECT_EQ(command_events[0]["payload"]["seq"], (*ack)["payload"]["event_seq"]);

  ws.send("marker", json{{"session_id", sid}, {"frame_index", 5}, {"text", "look"}});
  auto mack = ws.next_of("marker_ack", 5s);
  ASSERT_TRUE(mack);
  EXPECT_EQ((*mack)["payload"]["frame_index"], 5);

  ws.send("command", json{{"session_id", sid}, {"researcher", "eve"}, {"kind", "STOP"}, {"client_seq", 12}});
  auto err = ws.next_of("error", 5s);
  ASSERT_TRUE(err);
  EXPECT_EQ((*err)["payload"]["error"], "LeaseInvalid");
  EXPECT_EQ((*err)["payload"]["client_seq"], 12);

  ws.send("unsubscribe", json{{"session_id", sid}});
  ASSERT_TRUE(ws.next_of("unsubscribed", 5s));
  ASSERT_EQ(http.post("/sessions/" + sid + "/stop", json{{"researcher", "r"}}).status, 200);
}

TEST(StackWs, AnnotatedFeedAndInferenceCues) {
  stack::LocalStack s;
  auto cfg = agent_config("lab", 1);
  cfg.max_frames = 60;
  cfg.script = {{0, ControlCommand{0, CommandKind::SetSpeed, 80, 0}}};
  auto agent = s.launch_agent(cfg);
  HttpJson http(s.http_endpoint());
  http.post("/leases", json{{"researcher", "r"}, {"scene_id", "lab"}});
  auto bad = http.post("/sessions", json{{"researcher", "r"}, {"scene_id", "lab"}, {"device_ids", {1}},
                                         {"processors", {"no-such"}}});
  EXPECT_EQ(bad.status, 400);
  auto start = http.post("/sessions", json{{"researcher", "r"}, {"scene_id", "lab"}, {"device_ids", {1}},
                                           {"processors", {"marker-detector"}}});
  ASSERT_EQ(start.status, 201) << start.raw;
  const auto sid = sid_of(start);

  WsClient ws(s.ws_endpoint());
  ws.send("subscribe_frames", json{{"session_id", sid}, {"annotated", true}});
  auto m = ws.next(5s);
  while (m && !m->binary) m = ws.next(5s);
  ASSERT_TRUE(m);
  ByteView b(reinterpret_cast<const std::uint8_t*>(m->data.data()), m->data.size());
  auto annotated = decode_frame_record(b);
  // The outline adds pixels the detector sees around the marker.
  const auto px = annotated.pixels();
  std::size_t red = 0;
  for (std::size_t i = 0; i + 2 < px.size(); i += 3) red += px[i] == 255 && px[i + 1] == 0 && px[i + 2] == 0;
  EXPECT_GT(red, 0u);

  ASSERT_TRUE(wait_packed(s, sid));
  const auto delivered = s.gateway().relay().stats(uuid(sid)).delivered;
  const auto inference = events_of(s, sid, EventKind::Inference);
  EXPECT_EQ(inference.size(), delivered);
  const auto info = s.gateway().session_info(uuid(sid));
  const auto srt = read_text_file(ContainerLayout{info.container_dir}.srt());
  std::size_t cues = 0;
  for (const auto& c : parse_srt(srt)) cues += c.text.rfind("INFERENCE ", 0) == 0;
  EXPECT_EQ(cues, delivered);
  EXPECT_TRUE(packer::verify_container(info.container_dir).passed());
}
