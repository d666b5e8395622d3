// SPDX-FileCopyrightText: Copyright (c) 2026 The remcap Authors
// SPDX-License-Identifier: Apache-2.0

#include "remcap/bench/bench.hpp"

#include <httplib.h>
#include <unistd.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

#include "remcap/agent/device_agent.hpp"
#include "remcap/agent/renderer.hpp"
#include "remcap/core/clock.hpp"
#include "remcap/core/error.hpp"
#include "remcap/stack/local_stack.hpp"

namespace remcap::bench {

namespace fs = std::filesystem;
using nlohmann::json;
using std::chrono::steady_clock;

namespace {

double ms_since(steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(steady_clock::now() - t0).count();
}

/// JSON over HTTP; transport failures become StackUnreachable.
class Api {
 public:
  explicit Api(const net::Endpoint& ep) : ep_(ep), client_(ep.host, ep.port) {
    client_.set_connection_timeout(5, 0);
    client_.set_read_timeout(60, 0);
    client_.set_keep_alive(true);
    client_.set_tcp_nodelay(true);
  }
  std::pair<int, json> get(const std::string& path) { return wrap(client_.Get(path)); }
  std::pair<int, json> post(const std::string& path, const json& body) {
    return wrap(client_.Post(path, body.dump(), "application/json"));
  }
  std::pair<int, json> del(const std::string& path) { return wrap(client_.Delete(path)); }

  /// Throws the server's error when the status is not `want`.
  json expect(std::pair<int, json> r, int want, const std::string& what) {
    if (r.first == want) return r.second;
    const auto msg = r.second.is_object() ? r.second.value("message", r.second.dump()) : "";
    throw Error(Errc::InvalidArgument,
                what + ": HTTP " + std::to_string(r.first) + (msg.empty() ? "" : " " + msg));
  }

 private:
  std::pair<int, json> wrap(const httplib::Result& r) {
    if (!r) {
      throw Error(Errc::StackUnreachable, ep_.str() + ": " + httplib::to_string(r.error()));
    }
    json body = r->body.empty() ? json() : json::parse(r->body, nullptr, false);
    return {r->status, body};
  }
  net::Endpoint ep_;
  httplib::Client client_;
};

bool device_online(Api& api, const std::string& scene, std::uint16_t device) {
  auto [status, body] = api.get("/scenes");
  if (status != 200) return false;
  for (const auto& s : body) {
    if (s.value("scene_id", "") != scene) continue;
    for (const auto& d : s.value("devices", json::array())) {
      if (d.value("device_id", 0) == device) return d.value("online", false);
    }
  }
  return false;
}

void wait_online(Api& api, const std::string& scene, std::uint16_t device) {
  const auto deadline = steady_clock::now() + std::chrono::seconds(10);
  while (!device_online(api, scene, device)) {
    if (steady_clock::now() > deadline) {
      throw Error(Errc::AgentTimeout, "device " + std::to_string(device) + " never came online");
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(10));
  }
}

std::string wait_for_end(Api& api, const std::string& sid, std::chrono::seconds limit) {
  const auto deadline = steady_clock::now() + limit;
  for (;;) {
    auto [status, body] = api.get("/sessions/" + sid);
    const auto st = status == 200 ? body.value("status", "") : "";
    if (st == "STOPPING" || st == "PACKED") return st;
    if (steady_clock::now() > deadline) {
      throw Error(Errc::AgentTimeout, "session " + sid + " did not end");
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(50));
  }
}

/// Holds the scene lease for one measurement.
class LeaseGuard {
 public:
  LeaseGuard(Api& api, const StackTarget& t) : api_(api), t_(t) {
    api_.expect(api_.post("/leases", json{{"researcher", t.researcher},
                                          {"scene_id", t.scene_id},
                                          {"ttl_seconds", 3600}}),
                201, "acquire lease on " + t.scene_id);
  }
  ~LeaseGuard() {
    try {
      api_.del("/leases/" + t_.scene_id + "?researcher=" + t_.researcher);
    } catch (const Error&) {
    }
  }

 private:
  Api& api_;
  const StackTarget& t_;
};

agent::AgentConfig agent_config(StackHandle& stack, std::uint16_t device) {
  agent::AgentConfig c;
  c.scene_id = stack.target().scene_id;
  c.device_id = device;
  c.deterministic_clock = true;
  c.gateway = stack.control();
  c.relay = stack.relay();
  return c;
}

}  // namespace

// ---------------------------------------------------------------- stack

StackHandle::StackHandle(const StackTarget& target) : target_(target) {
  const bool external = target.http || target.control || target.relay;
  if (external && !(target.http && target.control && target.relay)) {
    throw Error(Errc::InvalidArgument, "an external stack needs http, control and relay endpoints");
  }
  if (!external) {
    local_ = std::make_unique<stack::LocalStack>();
    target_.http = local_->http_endpoint();
    target_.control = local_->control_endpoint();
    target_.relay = local_->relay_endpoint();
  }
  Api api(*target_.http);
  if (api.get("/ping").first != 200) {
    throw Error(Errc::StackUnreachable, target_.http->str() + ": /ping failed");
  }
}

StackHandle::~StackHandle() = default;

net::Endpoint StackHandle::http() const { return *target_.http; }
net::Endpoint StackHandle::control() const { return *target_.control; }
net::Endpoint StackHandle::relay() const { return *target_.relay; }

void StackHandle::discard_session(const std::string& session_id) {
  if (!local_) return;
  auto id = Uuid::parse(session_id);
  if (!id) return;
  auto& gw = local_->gateway();
  gw.wait_for_status(*id, gateway::SessionStatus::Packed, std::chrono::seconds(60));
  std::error_code ec;
  fs::remove_all(gw.session_info(*id).container_dir, ec);
}

// ---------------------------------------------------------------- fps

double expected_fps(Preset preset, std::optional<std::uint64_t> budget, std::uint8_t source_fps) {
  if (!budget) return source_fps;
  const double frame = static_cast<double>(agent::raw_frame_size(preset));
  return std::min(static_cast<double>(source_fps), static_cast<double>(*budget) / frame);
}

json to_json(const FpsReport& r) {
  return {{"resolution", preset_name(r.resolution)},
          {"budget_bytes_per_sec", r.budget_bytes_per_sec ? json(*r.budget_bytes_per_sec) : json(nullptr)},
          {"source_fps", r.source_fps},
          {"achieved_fps", r.achieved_fps},
          {"expected_fps", r.expected_fps},
          {"duration_s", r.duration_s},
          {"captured", r.captured},
          {"delivered", r.delivered},
          {"dropped", r.dropped}};
}

FpsReport measure_fps(StackHandle& stack, Preset preset, std::optional<std::uint64_t> budget,
                      double duration_s, std::uint8_t source_fps) {
  if (!(duration_s >= 5.0)) throw Error(Errc::InvalidArgument, "duration must be at least 5 s");
  if (source_fps == 0) throw Error(Errc::InvalidArgument, "source fps must be positive");
  const auto& t = stack.target();
  Api api(stack.http());
  LeaseGuard lease(api, t);

  auto cfg = agent_config(stack, t.device_id);
  cfg.preset = preset;
  cfg.fps = source_fps;
  cfg.send_budget_bytes_per_sec = budget;
  cfg.max_frames = static_cast<std::uint64_t>(std::llround(duration_s * source_fps));
  stack::RunningAgent agent(cfg);
  wait_online(api, t.scene_id, t.device_id);

  auto started = api.expect(api.post("/sessions", json{{"researcher", t.researcher},
                                                        {"scene_id", t.scene_id},
                                                        {"device_ids", {t.device_id}}}),
                            201, "start session");
  const auto sid = started.at("sessions").at(0).at("session_id").get<std::string>();
  wait_for_end(api, sid, std::chrono::seconds(static_cast<int>(duration_s) + 60));
  auto stats = api.expect(api.get("/sessions/" + sid + "/stats"), 200, "read stats");

  FpsReport r;
  r.resolution = preset;
  r.budget_bytes_per_sec = budget;
  r.source_fps = source_fps;
  r.achieved_fps = stats.value("achieved_fps", 0.0);
  r.expected_fps = expected_fps(preset, budget, source_fps);
  r.duration_s = duration_s;
  r.delivered = stats.value("delivered", std::uint64_t{0});
  r.captured = std::max(*cfg.max_frames, stats.value("captured_hint", std::uint64_t{0}));
  r.dropped = r.captured - std::min(r.captured, r.delivered);
  stack.discard_session(sid);
  return r;
}

// ---------------------------------------------------------------- latency

const std::vector<std::string>& latency_task_names() {
  static const std::vector<std::string> names{"Loading the system", "Setting up the device",
                                              "Client-server latency", "Executing control command"};
  return names;
}

std::pair<double, double> mean_std(const std::vector<double>& samples) {
  if (samples.empty()) return {0.0, 0.0};
  double sum = 0.0;
  for (double s : samples) sum += s;
  const double mean = sum / static_cast<double>(samples.size());
  double sq = 0.0;
  for (double s : samples) sq += (s - mean) * (s - mean);
  return {mean, std::sqrt(sq / static_cast<double>(samples.size()))};
}

json to_json(const LatencyReport& r) {
  json tasks = json::array();
  for (const auto& t : r.tasks) {
    tasks.push_back({{"name", t.name},
                     {"mean_ms", t.mean_ms},
                     {"std_ms", t.std_ms},
                     {"runs", t.runs},
                     {"samples_ms", t.samples_ms}});
  }
  return {{"unit", "ms"}, {"tasks", tasks}};
}

LatencyReport measure_task_latencies(StackHandle& stack, std::uint32_t runs) {
  if (runs == 0) throw Error(Errc::InvalidArgument, "runs must be positive");
  const auto& t = stack.target();
  if (t.spare_device_id == t.device_id) {
    throw Error(Errc::InvalidArgument, "the spare device must differ from the capture device");
  }
  Api api(stack.http());
  LeaseGuard lease(api, t);

  auto cfg = agent_config(stack, t.device_id);
  cfg.encoding = FrameEncoding::RleRgb24;
  stack::RunningAgent agent(cfg);
  wait_online(api, t.scene_id, t.device_id);
  auto started = api.expect(api.post("/sessions", json{{"researcher", t.researcher},
                                                        {"scene_id", t.scene_id},
                                                        {"device_ids", {t.device_id}}}),
                            201, "start session");
  const auto sid = started.at("sessions").at(0).at("session_id").get<std::string>();

  std::vector<std::vector<double>> samples(4);
  for (std::uint32_t i = 0; i < runs; ++i) {
    {
      // (i) a fresh client's first event-log read.
      const auto t0 = steady_clock::now();
      Api fresh(stack.http());
      fresh.expect(fresh.get("/sessions/" + sid + "/events?from=1"), 200, "read events");
      samples[0].push_back(ms_since(t0));
    }
    {
      // (ii) registering a device with the gateway.
      agent::DeviceAgent spare(agent_config(stack, t.spare_device_id));
      const auto t0 = steady_clock::now();
      spare.connect();
      samples[1].push_back(ms_since(t0));
      spare.shutdown();
    }
    // (iii) ping round trip, then (iv) command round trip less that ping.
    auto t0 = steady_clock::now();
    api.expect(api.get("/ping"), 200, "ping");
    const double ping = ms_since(t0);
    samples[2].push_back(ping);
    t0 = steady_clock::now();
    api.expect(api.post("/sessions/" + sid + "/commands",
                        json{{"researcher", t.researcher},
                             {"kind", "SET_CAM_PAN"},
                             {"value", (i % 2) ? 10 : -10},
                             {"client_seq", i + 1},
                             {"issued_ts_micros", wall_micros()}}),
               200, "submit command");
    samples[3].push_back(std::max(0.0, ms_since(t0) - ping));
  }
  api.post("/sessions/" + sid + "/stop", json{{"researcher", t.researcher}});
  stack.discard_session(sid);

  LatencyReport report;
  const auto& names = latency_task_names();
  for (std::size_t k = 0; k < names.size(); ++k) {
    auto [mean, sd] = mean_std(samples[k]);
    report.tasks.push_back({names[k], mean, sd, runs, samples[k]});
  }
  return report;
}

// ---------------------------------------------------------------- resources

namespace {

std::optional<std::string> read_small(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Usage {
  std::uint64_t ticks = 0;
  std::uint64_t rss = 0;
};

std::optional<Usage> read_usage(int pid) {
  const fs::path dir = fs::path("/proc") / std::to_string(pid);
  auto stat = read_small(dir / "stat");
  auto statm = read_small(dir / "statm");
  if (!stat || !statm) return std::nullopt;
  // Fields after the parenthesised command name; utime and stime are 14th and 15th overall.
  const auto close = stat->rfind(')');
  if (close == std::string::npos) return std::nullopt;
  std::istringstream fields(stat->substr(close + 2));
  std::string skip;
  for (int i = 3; i < 14; ++i) fields >> skip;
  std::uint64_t utime = 0, stime = 0;
  fields >> utime >> stime;
  std::istringstream pages(*statm);
  std::uint64_t size = 0, resident = 0;
  pages >> size >> resident;
  return Usage{utime + stime, resident * static_cast<std::uint64_t>(sysconf(_SC_PAGESIZE))};
}

}  // namespace

std::vector<int> find_processes(const std::string& name) {
  std::vector<int> pids;
  std::error_code ec;
  for (const auto& entry : fs::directory_iterator("/proc", ec)) {
    const auto base = entry.path().filename().string();
    if (base.empty() || base.find_first_not_of("0123456789") != std::string::npos) continue;
    auto comm = read_small(entry.path() / "comm");
    if (comm && !comm->empty() && comm->back() == '\n') comm->pop_back();
    bool match = comm && *comm == name;
    if (!match) {
      auto cmdline = read_small(entry.path() / "cmdline");
      if (cmdline && !cmdline->empty()) {
        const std::string argv0 = cmdline->substr(0, cmdline->find('\0'));
        match = fs::path(argv0).filename().string() == name;
      }
    }
    if (match) pids.push_back(std::stoi(base));
  }
  return pids;
}

std::string sample_resources(const std::vector<std::string>& names,
                             std::chrono::milliseconds interval, double duration_s) {
  if (names.empty()) throw Error(Errc::InvalidArgument, "no process names");
  if (interval.count() <= 0 || !(duration_s > 0)) {
    throw Error(Errc::InvalidArgument, "interval and duration must be positive");
  }
  std::map<std::string, std::vector<int>> pids;
  for (const auto& n : names) {
    auto found = find_processes(n);
    if (found.empty()) throw Error(Errc::ProcessNotFound, n);
    pids[n] = std::move(found);
  }
  const double hz = static_cast<double>(sysconf(_SC_CLK_TCK));
  auto totals = [&](const std::string& n) {
    Usage sum;
    for (int pid : pids[n]) {
      if (auto u = read_usage(pid)) {
        sum.ticks += u->ticks;
        sum.rss += u->rss;
      }
    }
    return sum;
  };

  std::map<std::string, std::uint64_t> prev;
  for (const auto& n : names) prev[n] = totals(n).ticks;
  const auto samples = static_cast<std::uint64_t>(
      std::floor(duration_s * 1000.0 / static_cast<double>(interval.count()) + 1e-9));
  const auto t0 = steady_clock::now();
  auto last = t0;

  std::string csv = "ts,process,cpu,rss\n";
  for (std::uint64_t k = 1; k <= samples; ++k) {
    std::this_thread::sleep_until(t0 + k * interval);
    const auto now = steady_clock::now();
    const double dt = std::chrono::duration<double>(now - last).count();
    last = now;
    const auto ts = wall_micros();
    for (const auto& n : names) {
      const auto u = totals(n);
      const double used = u.ticks >= prev[n] ? static_cast<double>(u.ticks - prev[n]) : 0.0;
      prev[n] = u.ticks;
      char line[256];
      std::snprintf(line, sizeof line, "%llu,%s,%.2f,%llu\n", static_cast<unsigned long long>(ts),
                    n.c_str(), dt > 0 ? 100.0 * used / hz / dt : 0.0,
                    static_cast<unsigned long long>(u.rss));
      csv += line;
    }
  }
  return csv;
}

}  // namespace remcap::bench
