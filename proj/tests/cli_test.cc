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

#include <gtest/gtest.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <array>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "support.h"
#include "tracegrid/http_server.h"

namespace tracegrid {
namespace {

struct Run {
  int exit_code = -1;
  std::string out;
};

// Runs the command line tool through the shell, capturing stdout.
Run Tool(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + " " + TRACEGRID_BIN + " " + args + " 2>/dev/null";
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  std::array<char, 4096> buf;
  size_t n = 0;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
  const int status = pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

size_t SnapshotFiles(const std::filesystem::path& dir) {
  if (!std::filesystem::exists(dir)) return 0;
  size_t n = 0;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    n += e.path().filename().string().starts_with("snapshots-");
  }
  return n;
}

std::vector<std::vector<std::string>> Csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> row;
    std::stringstream ls(line);
    std::string field;
    while (std::getline(ls, field, ',')) row.push_back(field);
    if (!line.empty() && line.back() == ',') row.push_back("");
    rows.push_back(row);
  }
  return rows;
}

TEST(Cli, ReplayOfEmptyFileIsClean) {
  testing::ScratchDir dir;
  std::ofstream(dir.path() / "empty.ndjson").close();
  const auto r = Tool("replay " + (dir.path() / "empty.ndjson").string() + " --data-dir " +
                      (dir.path() / "data").string());
  EXPECT_EQ(r.exit_code, 0);
  EXPECT_EQ(SnapshotFiles(dir.path() / "data"), 0u);
}

TEST(Cli, UsageErrorsExitNonZero) {
  EXPECT_NE(Tool("").exit_code, 0);
  EXPECT_NE(Tool("frobnicate").exit_code, 0);
  EXPECT_NE(Tool("replay /nonexistent/file.ndjson").exit_code, 0);
  EXPECT_NE(Tool("generate --scenario nope").exit_code, 0);
  testing::ScratchDir dir;
  EXPECT_NE(Tool("matrix --data-dir " + dir.str()).exit_code, 0);  // empty store
}

TEST(Cli, DumpScenarioIsConfigJson) {
  const auto r = Tool("generate --scenario slow-db --hours 1 --dump-scenario");
  ASSERT_EQ(r.exit_code, 0);
  const auto doc = nlohmann::json::parse(r.out);
  EXPECT_EQ(doc["seed"], 2500);
  EXPECT_EQ(doc["duration_ms"], 3'600'000);

  testing::ScratchDir dir;
  std::ofstream(dir.path() / "s.json") << r.out;
  const auto again = Tool("generate --config " + (dir.path() / "s.json").string() +
                          " --dump-scenario");
  EXPECT_EQ(again.out, r.out);
}

TEST(Cli, GenerateReplayAndMatrixAgree) {
  testing::ScratchDir dir;
  const auto file = (dir.path() / "spans.ndjson").string();
  const auto direct = (dir.path() / "direct").string();
  const auto replayed = (dir.path() / "replayed").string();

  ASSERT_EQ(Tool("generate --scenario dead-service --hours 0.1 --out " + file + " --data-dir " +
                 direct)
                .exit_code,
            0);
  ASSERT_EQ(Tool("replay " + file + " --data-dir " + replayed).exit_code, 0);
  for (const auto& e : std::filesystem::directory_iterator(direct)) {
    std::ifstream a(e.path()), b(std::filesystem::path(replayed) / e.path().filename());
    std::stringstream sa, sb;
    sa << a.rdbuf();
    sb << b.rdbuf();
    EXPECT_EQ(sa.str(), sb.str()) << e.path();
  }

  const auto m = Tool("matrix --view dc --codes 5xx --mode percent", "CHM_DATA_DIR=" + replayed);
  ASSERT_EQ(m.exit_code, 0);
  const auto rows = Csv(m.out);
  ASSERT_GE(rows.size(), 2u);
  const auto col = std::find(rows[0].begin(), rows[0].end(), "svcD") - rows[0].begin();
  ASSERT_LT(static_cast<size_t>(col), rows[0].size());
  for (size_t y = 1; y < rows.size(); ++y) EXPECT_EQ(rows[y][col], "100") << rows[y][0];

  const auto json = Tool("matrix --json --step 300000 --data-dir " + replayed);
  ASSERT_EQ(json.exit_code, 0);
  const auto doc = nlohmann::json::parse(json.out);
  EXPECT_EQ(doc["frames"].size(), 3u);  // aggregate + two 5-minute frames (6 minutes of data)
  EXPECT_NE(Tool("matrix --frame 9 --data-dir " + replayed).exit_code, 0);
}

TEST(Cli, ServeAnswersAndStopsOnSignal) {
  testing::ScratchDir dir;
  const int port = 20000 + static_cast<int>(getpid() % 20000);
  const pid_t pid = fork();
  ASSERT_GE(pid, 0);
  if (pid == 0) {
    setenv("CHM_CLOCK", "manual", 1);
    const std::string port_arg = std::to_string(port);
    const std::string data = dir.str();
    execl(TRACEGRID_BIN, TRACEGRID_BIN, "serve", "--host", "127.0.0.1", "--port",
          port_arg.c_str(), "--data-dir", data.c_str(), static_cast<char*>(nullptr));
    _exit(127);
  }
  HttpApiClient client("127.0.0.1", port);
  std::string status_body;
  for (int i = 0; i < 200; ++i) {
    try {
      const auto r = client.Get("/api/v1/status");
      if (r.status == 200) {
        status_body = r.body;
        break;
      }
    } catch (const std::exception&) {
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(20));
  }
  ASSERT_FALSE(status_body.empty());
  EXPECT_EQ(nlohmann::json::parse(status_body)["clock"], "manual");
  EXPECT_EQ(client.Post("/api/v1/tick?now=0", "").status, 200);

  kill(pid, SIGTERM);
  int status = 0;
  waitpid(pid, &status, 0);
  EXPECT_TRUE(WIFEXITED(status));
  EXPECT_EQ(WEXITSTATUS(status), 0);
}

}  // namespace
}  // namespace tracegrid
