// Copyright 2026 The TraceGrid Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command line front end: serve, replay, generate and matrix.

#include <csignal>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"
#include "tracegrid/api_json.h"
#include "tracegrid/error.h"
#include "tracegrid/http_server.h"
#include "tracegrid/service.h"
#include "tracegrid/synth.h"

namespace tg = tracegrid;

namespace {

struct ServeArgs {
  tg::ServiceConfig config;
  std::string clock = "wall";
  std::string host = "0.0.0.0";
  int64_t tick_period_ms = 1000;
};

struct ReplayArgs {
  std::string input;
  double speed = 0;
  std::string target;
  std::string data_dir = "./data";
  int64_t interval_ms = 60'000;
  std::string instance_tag = std::string(tg::kDefaultInstanceTagKey);
};

struct GenerateArgs {
  std::string scenario = "demo";
  std::string config_file;
  double hours = 2;
  std::optional<uint64_t> seed;
  int64_t start_ms = 1'700'002'800'000;
  std::string out;
  std::string data_dir;
  int64_t interval_ms = 60'000;
  bool dump_scenario = false;
};

struct MatrixArgs {
  std::string data_dir = "./data";
  std::string view = "datacenter_services";
  std::string metric = "call_volume";
  std::string codes;
  std::string mode = "absolute";
  std::string lo;
  std::string hi;
  std::optional<int64_t> from;
  std::optional<int64_t> to;
  std::optional<int64_t> step;
  int frame = 0;
  bool json = false;
};

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw tg::Error(tg::ErrorKind::kStorageFailure, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void PrintReplay(const tg::ReplayStats& stats) {
  std::cerr << "batches=" << stats.batches << " accepted=" << stats.ingest.accepted
            << " skipped=" << stats.ingest.skipped << " dropped_late=" << stats.ingest.dropped_late
            << " snapshots=" << stats.snapshots_written << "\n";
}

int RunServe(ServeArgs args) {
  const auto clock = tg::ParseClockMode(args.clock);
  if (!clock) throw tg::Error(tg::ErrorKind::kInvalidSpec, "clock: expected wall or manual");
  args.config.clock_mode = *clock;

  // Signals are taken synchronously by a watcher thread.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  tg::TelemetryService service(args.config);
  tg::HttpApiServer server(service);
  const int port = server.Bind(args.host, args.config.listen_port);
  if (port < 0) {
    std::cerr << "cannot bind " << args.host << ":" << args.config.listen_port << "\n";
    return 1;
  }

  std::unique_ptr<tg::WallClockSealer> sealer;
  if (*clock == tg::ClockMode::kWall) {
    sealer = std::make_unique<tg::WallClockSealer>(
        service, args.tick_period_ms,
        [](const std::exception& e) { std::cerr << "seal failed: " << e.what() << "\n"; });
  }

  std::thread watcher([&] {
    int sig = 0;
    sigwait(&signals, &sig);
    server.Stop();
  });

  std::cerr << "listening on " << args.host << ":" << port << " (clock "
            << tg::ClockModeName(*clock) << ", data " << args.config.data_dir << ")\n";
  server.ListenAfterBind();
  pthread_kill(watcher.native_handle(), SIGTERM);
  watcher.join();
  return 0;
}

std::pair<std::string, int> SplitHostPort(const std::string& target) {
  const auto colon = target.rfind(':');
  if (colon == std::string::npos) return {target, 9411};
  return {target.substr(0, colon), std::stoi(target.substr(colon + 1))};
}

tg::IngestSummary SummaryFrom(const tg::HttpApiClient::Response& res) {
  if (res.status != 200) {
    throw tg::Error(tg::ErrorKind::kStorageFailure,
                    "server answered " + std::to_string(res.status) + ": " + res.body);
  }
  const auto doc = nlohmann::json::parse(res.body);
  tg::IngestSummary s;
  s.accepted = doc.at("accepted").get<uint64_t>();
  s.skipped = doc.at("skipped").get<uint64_t>();
  s.dropped_late = doc.at("dropped_late").get<uint64_t>();
  return s;
}

tg::ReplayStats ReplayOverHttp(const std::string& target, int64_t interval_ms, std::istream& in,
                               double speed) {
  const auto [host, port] = SplitHostPort(target);
  tg::HttpApiClient client(host, port);
  tg::ReplayHooks hooks;
  hooks.ingest = [&](std::string_view line) {
    return SummaryFrom(client.Post("/api/v1/spans", std::string(line)));
  };
  hooks.tick = [&](int64_t now) -> size_t {
    const auto res = client.Post("/api/v1/tick?now=" + std::to_string(now), "");
    if (res.status == 409) return 0;  // wall clock server seals on its own
    if (res.status != 200) {
      throw tg::Error(tg::ErrorKind::kStorageFailure,
                      "tick answered " + std::to_string(res.status) + ": " + res.body);
    }
    return nlohmann::json::parse(res.body).at("sealed").size();
  };
  return tg::Replay(in, interval_ms, hooks, speed);
}

tg::ReplayStats ReplayLocal(const std::string& data_dir, int64_t interval_ms,
                            const std::string& instance_tag, std::istream& in, double speed) {
  tg::ServiceConfig config;
  config.data_dir = data_dir;
  config.base_interval_ms = interval_ms;
  config.instance_tag_key = instance_tag;
  config.clock_mode = tg::ClockMode::kManual;
  tg::TelemetryService service(config);
  return tg::ReplayInto(service, in, speed);
}

int RunReplay(const ReplayArgs& args) {
  std::ifstream file;
  std::istream* in = &std::cin;
  if (args.input != "-") {
    file.open(args.input);
    if (!file) throw tg::Error(tg::ErrorKind::kStorageFailure, "cannot open " + args.input);
    in = &file;
  }
  const auto stats = args.target.empty()
                         ? ReplayLocal(args.data_dir, args.interval_ms, args.instance_tag, *in,
                                       args.speed)
                         : ReplayOverHttp(args.target, args.interval_ms, *in, args.speed);
  PrintReplay(stats);
  return 0;
}

int RunGenerate(const GenerateArgs& args) {
  tg::synth::ScenarioSpec spec;
  if (!args.config_file.empty()) {
    spec = tg::synth::ScenarioFromJson(ReadFile(args.config_file));
    if (args.seed) spec.seed = *args.seed;
  } else {
    auto named = tg::synth::NamedScenario(args.scenario, args.start_ms, args.hours, args.seed);
    if (!named) {
      std::string known;
      for (const auto& n : tg::synth::NamedScenarios()) known += " " + n;
      throw tg::Error(tg::ErrorKind::kInvalidSpec, "scenario: unknown, expected one of" + known);
    }
    spec = std::move(*named);
  }
  spec.Validate();

  if (args.dump_scenario) {
    std::cout << tg::synth::ScenarioToJson(spec) << "\n";
    return 0;
  }

  std::stringstream ndjson;
  tg::synth::WriteBatches(spec, ndjson);

  if (!args.out.empty() && args.out != "-") {
    std::ofstream out(args.out, std::ios::binary);
    if (!out) throw tg::Error(tg::ErrorKind::kStorageFailure, "cannot write " + args.out);
    out << ndjson.str();
  } else if (args.data_dir.empty() || args.out == "-") {
    std::cout << ndjson.str();
  }

  if (!args.data_dir.empty()) {
    ndjson.clear();
    ndjson.seekg(0);
    PrintReplay(ReplayLocal(args.data_dir, args.interval_ms, spec.instance_tag_key, ndjson, 0));
  }
  return 0;
}

int RunMatrix(const MatrixArgs& args) {
  auto blobs = std::make_shared<tg::FilesystemBlobStore>(args.data_dir);
  tg::SnapshotStore::Options options;
  options.interval_length_ms = tg::StoredIntervalMs(*blobs).value_or(tg::kDefaultIntervalMs);
  tg::SnapshotStore store(blobs, options);

  const auto files = store.Files();
  if (files.empty()) {
    std::cerr << "store at " << args.data_dir << " is empty\n";
    return 1;
  }
  // Defaults cover the whole store, widened to the step grid.
  const int64_t step = args.step.value_or(options.interval_length_ms);
  if (step <= 0 || step % options.interval_length_ms != 0) {
    throw tg::Error(tg::ErrorKind::kInvalidSpec,
                    "step: must be a positive multiple of the base interval (" +
                        std::to_string(options.interval_length_ms) + " ms)");
  }
  const int64_t first = files.front().first_ts;
  const int64_t end = files.back().last_ts + options.interval_length_ms;
  const int64_t from = args.from.value_or(first - ((first % step) + step) % step);
  const int64_t to = args.to.value_or(end + (step - ((end % step) + step) % step) % step);

  std::map<std::string, std::string> params = {
      {"view", args.view}, {"metric", args.metric},          {"mode", args.mode},
      {"from", std::to_string(from)}, {"to", std::to_string(to)},
  };
  if (!args.codes.empty()) params["codes"] = args.codes;
  if (!args.lo.empty()) params["lo"] = args.lo;
  if (!args.hi.empty()) params["hi"] = args.hi;
  if (args.step) params["step"] = std::to_string(*args.step);
  const auto spec = tg::DecodeQuerySpec(
      [&](std::string_view name) -> std::optional<std::string> {
        const auto it = params.find(std::string(name));
        if (it == params.end()) return std::nullopt;
        return it->second;
      },
      options.interval_length_ms);

  const auto set = tg::BuildFrames(spec, store);
  if (args.json) {
    std::cout << tg::EncodeFrameSet(set) << "\n";
    return 0;
  }
  if (set.frames.empty()) {
    std::cerr << "no snapshots in [" << from << ", " << to << ")\n";
    return 1;
  }
  if (args.frame < 0 || static_cast<size_t>(args.frame) >= set.frames.size()) {
    throw tg::Error(tg::ErrorKind::kInvalidSpec,
                    "frame: must be below " + std::to_string(set.frames.size()));
  }
  std::cout << tg::FrameToCsv(set.frames[args.frame]);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tracegrid: call heat maps from distributed tracing spans"};
  app.require_subcommand(1);

  ServeArgs serve;
  auto* serve_cmd = app.add_subcommand("serve", "Run the ingestion and query service");
  serve_cmd->add_option("--port", serve.config.listen_port, "Listen port")
      ->envname("CHM_PORT")
      ->capture_default_str();
  serve_cmd->add_option("--host", serve.host, "Listen address")->capture_default_str();
  serve_cmd->add_option("--data-dir", serve.config.data_dir, "Snapshot directory")
      ->envname("CHM_DATA_DIR")
      ->capture_default_str();
  serve_cmd->add_option("--interval-ms", serve.config.base_interval_ms, "Aggregation interval")
      ->envname("CHM_INTERVAL_MS")
      ->capture_default_str();
  serve_cmd->add_option("--instance-tag", serve.config.instance_tag_key, "Span tag naming the data center")
      ->envname("CHM_INSTANCE_TAG")
      ->capture_default_str();
  serve_cmd->add_option("--clock", serve.clock, "wall or manual")
      ->envname("CHM_CLOCK")
      ->check(CLI::IsMember({"wall", "manual"}))
      ->capture_default_str();
  serve_cmd->add_option("--seal-delay-ms", serve.config.seal_delay_ms, "Wall clock grace period")
      ->envname("CHM_SEAL_DELAY_MS")
      ->capture_default_str();
  serve_cmd->add_option("--ui-dir", serve.config.ui_dir, "Static UI assets")->envname("CHM_UI_DIR");

  ReplayArgs replay;
  auto* replay_cmd = app.add_subcommand("replay", "Replay NDJSON span batches");
  replay_cmd->add_option("input", replay.input, "NDJSON file, or - for stdin")->required();
  replay_cmd->add_option("--speed", replay.speed, "Time compression; 0 replays without pauses")
      ->capture_default_str();
  replay_cmd->add_option("--target", replay.target, "host:port of a running service");
  replay_cmd->add_option("--data-dir", replay.data_dir, "Snapshot directory when replaying locally")
      ->envname("CHM_DATA_DIR")
      ->capture_default_str();
  replay_cmd->add_option("--interval-ms", replay.interval_ms, "Aggregation interval")
      ->envname("CHM_INTERVAL_MS")
      ->capture_default_str();
  replay_cmd->add_option("--instance-tag", replay.instance_tag, "Span tag naming the data center")
      ->envname("CHM_INSTANCE_TAG")
      ->capture_default_str();

  GenerateArgs gen;
  auto* gen_cmd = app.add_subcommand("generate", "Generate synthetic span traffic");
  auto* scenario_opt = gen_cmd->add_option("--scenario", gen.scenario, "Bundled scenario")
                           ->check(CLI::IsMember(tg::synth::NamedScenarios()))
                           ->capture_default_str();
  gen_cmd->add_option("--config", gen.config_file, "Scenario JSON file")->excludes(scenario_opt);
  gen_cmd->add_option("--hours", gen.hours, "Simulated duration")->capture_default_str();
  gen_cmd->add_option("--seed", gen.seed, "RNG seed override");
  gen_cmd->add_option("--start-ms", gen.start_ms, "Simulated start, minute aligned")
      ->capture_default_str();
  gen_cmd->add_option("--out", gen.out, "NDJSON output file, - for stdout");
  gen_cmd->add_option("--data-dir", gen.data_dir, "Also replay into this snapshot directory");
  gen_cmd->add_option("--interval-ms", gen.interval_ms, "Interval used with --data-dir")
      ->capture_default_str();
  gen_cmd->add_flag("--dump-scenario", gen.dump_scenario, "Print the scenario JSON and exit");

  MatrixArgs matrix;
  auto* matrix_cmd = app.add_subcommand("matrix", "Print one heat map frame as CSV");
  matrix_cmd->add_option("--data-dir", matrix.data_dir, "Snapshot directory")
      ->envname("CHM_DATA_DIR")
      ->capture_default_str();
  matrix_cmd->add_option("--view", matrix.view)->capture_default_str();
  matrix_cmd->add_option("--metric", matrix.metric)->capture_default_str();
  matrix_cmd->add_option("--codes", matrix.codes, "Comma separated; 5xx style classes allowed");
  matrix_cmd->add_option("--mode", matrix.mode, "absolute or percent")->capture_default_str();
  matrix_cmd->add_option("--lo", matrix.lo, "Lower bound of the value range");
  matrix_cmd->add_option("--hi", matrix.hi, "Upper bound of the value range");
  matrix_cmd->add_option("--from", matrix.from, "Window start, ms (default: store start, on the step grid)");
  matrix_cmd->add_option("--to", matrix.to, "Window end, ms (default: store end, on the step grid)");
  matrix_cmd->add_option("--step", matrix.step, "Frame step, ms");
  matrix_cmd->add_option("--frame", matrix.frame, "0 is the whole window aggregate")
      ->capture_default_str();
  matrix_cmd->add_flag("--json", matrix.json, "Print the full frame set as JSON");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*serve_cmd) return RunServe(serve);
    if (*replay_cmd) return RunReplay(replay);
    if (*gen_cmd) return RunGenerate(gen);
    if (*matrix_cmd) return RunMatrix(matrix);
  } catch (const tg::Error& e) {
    std::cerr << "error: " << tg::ErrorKindName(e.kind()) << ": " << e.detail() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
