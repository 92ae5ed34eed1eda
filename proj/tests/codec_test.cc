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

#include <cmath>
#include <random>

#include "json.hpp"
#include "support.h"
#include "tracegrid/error.h"
#include "tracegrid/snapshot_codec.h"

namespace tracegrid {
namespace {

constexpr int64_t kT0 = 1'700'002'800'000;

// The nested sample document as printed for the format, timestamp
// placeholder included.
constexpr const char* kFormatSample = R"({"timestamp": [
  {
    "datacenter_services": {
      "app_instance_id": {
        "microservice_id": {
          "return_code_1": { 
            "stats_name_1": 1.0, "stats_name_2": 0.1},
          "return_code_2": { 
            "stats_name_1": 5.0, "stats_name_2": 6.2}
    }}},
      "caller_callee_pairs": {
        "caller_microservice_id_1": {
          "callee_microservice_id_1": {
            "return_code_1": {
              "stats_name_1": 1.1, "stats_name_2": 0.1}},
          "callee_microservice_id_2": {
            "return_code_1": { 
              "stats_name_1": 1.5, "stats_name_2": 0.5}}
  }}}]})";

std::string WithTimestamp(std::string text, int64_t ts) {
  const std::string placeholder = "\"timestamp\"";
  text.replace(text.find(placeholder), placeholder.size(), "\"" + std::to_string(ts) + "\"");
  return text;
}

ErrorKind KindOf(const std::function<void()>& fn, std::string* message = nullptr) {
  try {
    fn();
  } catch (const Error& e) {
    if (message) *message = e.detail();
    return e.kind();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorKind::kInvalidSpec;
}

TEST(FormatNumber, Examples) {
  EXPECT_EQ(FormatNumber(5), "5");
  EXPECT_EQ(FormatNumber(1.0), "1");
  EXPECT_EQ(FormatNumber(0.1), "0.1");
  EXPECT_EQ(FormatNumber(6.2), "6.2");
  EXPECT_EQ(FormatNumber(1.0 / 3.0), "0.333333333");
  EXPECT_EQ(FormatNumber(2.0 / 3.0), "0.666666667");
  EXPECT_EQ(FormatNumber(1414.2135623730951), "1414.213562373");
  EXPECT_EQ(FormatNumber(4e-10), "0");
  EXPECT_EQ(FormatNumber(-4e-10), "0");
  EXPECT_EQ(FormatNumber(6e-10), "0.000000001");
  EXPECT_EQ(FormatNumber(123456789012.5), "123456789012.5");
  EXPECT_EQ(FormatNumber(1e20), "100000000000000000000");
}

TEST(FormatNumber, CanonicalIsAFixedPoint) {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 20000; ++i) {
    const double v = testing::RandomReal(rng);
    const double c = CanonicalNumber(v);
    EXPECT_EQ(CanonicalNumber(c), c);
    EXPECT_EQ(FormatNumber(c), FormatNumber(v));
    EXPECT_LE(std::abs(c - v), 5e-10 + 1e-15 * std::abs(v));
  }
}

TEST(SerializeSnapshot, OneCellPath) {
  IntervalSnapshot s;
  s.interval_start = kT0;
  s.interval_length_ms = 60'000;
  StatsBundle b;
  b.count = 5;
  b.mean_ms = b.min_ms = b.max_ms = 2.0;
  b.std_ms = 0.0;
  b.pct = 100;
  s.datacenter_services["dc1"]["svcA"]["200"] = b;
  const std::string text = SerializeSnapshot(s);
  const auto doc = nlohmann::json::parse(text);
  EXPECT_EQ(doc[std::to_string(kT0)][0]["datacenter_services"]["dc1"]["svcA"]["200"]["count"], 5);
  EXPECT_EQ(text,
            "{\"1700002800000\":[{\"caller_callee_pairs\":{},\"datacenter_services\":{\"dc1\":{"
            "\"svcA\":{\"200\":{\"count\":5,\"max_ms\":2,\"mean_ms\":2,\"min_ms\":2,\"pct\":100,"
            "\"std_ms\":0}}}}}]}");
}

TEST(SerializeSnapshot, EmptySnapshotKeepsBothMaps) {
  IntervalSnapshot s;
  s.interval_start = kT0;
  s.interval_length_ms = 60'000;
  EXPECT_EQ(SerializeSnapshot(s),
            "{\"1700002800000\":[{\"caller_callee_pairs\":{},\"datacenter_services\":{}}]}");
}

TEST(SerializeSnapshot, KeysSortedBytewise) {
  IntervalSnapshot s;
  s.interval_start = kT0;
  s.interval_length_ms = 60'000;
  StatsBundle b;
  b.count = 1;
  for (const char* y : {"b", "B", "a", "_"}) s.caller_callee_pairs[y]["x"]["200"] = b;
  const std::string text = SerializeSnapshot(s);
  EXPECT_LT(text.find("\"B\""), text.find("\"_\""));
  EXPECT_LT(text.find("\"_\""), text.find("\"a\""));
  EXPECT_LT(text.find("\"a\""), text.find("\"b\""));
}

TEST(ParseSnapshots, FormatSampleKeepsPlaceholderNames) {
  const auto snaps = ParseSnapshots(WithTimestamp(kFormatSample, kT0));
  ASSERT_EQ(snaps.size(), 1u);
  const auto& s = snaps[0];
  EXPECT_EQ(s.interval_start, kT0);
  const auto& dc = s.datacenter_services.at("app_instance_id").at("microservice_id");
  EXPECT_EQ(dc.at("return_code_1").extra.at("stats_name_1"), 1.0);
  EXPECT_EQ(dc.at("return_code_1").extra.at("stats_name_2"), 0.1);
  EXPECT_EQ(dc.at("return_code_2").extra.at("stats_name_1"), 5.0);
  EXPECT_EQ(dc.at("return_code_2").extra.at("stats_name_2"), 6.2);
  EXPECT_EQ(dc.at("return_code_1").count, 0u);
  const auto& cc = s.caller_callee_pairs.at("caller_microservice_id_1");
  EXPECT_EQ(cc.at("callee_microservice_id_1").at("return_code_1").extra.at("stats_name_1"), 1.1);
  EXPECT_EQ(cc.at("callee_microservice_id_2").at("return_code_1").extra.at("stats_name_2"), 0.5);

  // Re-serializing keeps the placeholder statistics and nothing else.
  const std::string again = SerializeSnapshot(s);
  EXPECT_NE(again.find("\"stats_name_1\":5"), std::string::npos);
  EXPECT_EQ(again.find("\"count\""), std::string::npos);
  EXPECT_EQ(ParseSnapshots(again), snaps);
}

TEST(ParseSnapshots, FormatSamplePlaceholderTimestampIsNotAnInstant) {
  std::string message;
  EXPECT_EQ(KindOf([] { ParseSnapshots(kFormatSample); }, &message), ErrorKind::kSchemaViolation);
  EXPECT_EQ(message.rfind("/timestamp:", 0), 0u) << message;
}

TEST(ParseSnapshots, EmptyObject) { EXPECT_TRUE(ParseSnapshots("{}").empty()); }

TEST(ParseSnapshots, ReportsPathOfFirstBadNode) {
  const std::vector<std::pair<std::string, std::string>> cases = {
      {"[]", "/:"},
      {"not json", "/:"},
      {R"({"12":{}})", "/12:"},
      {R"({"12":[]})", "/12:"},
      {R"({"12":[{},{}]})", "/12:"},
      {R"({"12":[{"datacenter_services":[]}]})", "/12/0/datacenter_services:"},
      {R"({"12":[{"datacenter_services":{"d/c":{"s":{"200":{"count":"5"}}}}}]})",
       "/12/0/datacenter_services/d~1c/s/200/count:"},
      {R"({"12":[{"caller_callee_pairs":{"a":{"b":{"200":{"count":-1}}}}}]})",
       "/12/0/caller_callee_pairs/a/b/200/count:"},
      {R"({"12":[{"caller_callee_pairs":{"a":{"b":{"200":{"count":1.5}}}}}]})",
       "/12/0/caller_callee_pairs/a/b/200/count:"},
      {R"({"12":[{"caller_callee_pairs":{"a":{"b":{"200":{"mean_ms":null}}}}}]})",
       "/12/0/caller_callee_pairs/a/b/200/mean_ms:"},
      {R"({"12":[{"caller_callee_pairs":{"a":{"b":[]}}}]})", "/12/0/caller_callee_pairs/a/b:"},
      {R"({"1.5":[{}]})", "/1.5:"},
  };
  for (const auto& [text, prefix] : cases) {
    std::string message;
    EXPECT_EQ(KindOf([&] { ParseSnapshots(text); }, &message), ErrorKind::kSchemaViolation)
        << text;
    EXPECT_EQ(message.rfind(prefix, 0), 0u) << text << " -> " << message;
  }
}

TEST(ParseSnapshots, SeveralTimestampsComeBackAscending) {
  const auto snaps = ParseSnapshots(
      R"({"180000":[{}],"60000":[{"datacenter_services":{}}],"120000":[{}]})", 60'000);
  ASSERT_EQ(snaps.size(), 3u);
  EXPECT_EQ(snaps[0].interval_start, 60'000);
  EXPECT_EQ(snaps[2].interval_start, 180'000);
  EXPECT_EQ(snaps[1].interval_length_ms, 60'000);
}

TEST(SerializeSnapshots, JoinEntriesMatches) {
  std::mt19937_64 rng(4);
  std::vector<IntervalSnapshot> snaps;
  std::vector<std::string> entries;
  for (int i = 0; i < 5; ++i) {
    snaps.push_back(testing::RandomSnapshot(rng, kT0 + i * 60'000));
    entries.push_back(SerializeSnapshotEntry(snaps.back()));
  }
  const std::string whole = SerializeSnapshots(snaps);
  EXPECT_EQ(JoinEntries(entries), whole);
  EXPECT_EQ(JoinedSize(entries), whole.size());
  EXPECT_EQ(JoinEntries({}), "{}");
  EXPECT_EQ(ParseSnapshots(whole), [&] {
    std::vector<IntervalSnapshot> c;
    for (const auto& s : snaps) c.push_back(Canonicalize(s));
    return c;
  }());
}

class CodecProperty : public ::testing::TestWithParam<uint64_t> {};

TEST_P(CodecProperty, RoundTrip) {
  std::mt19937_64 rng(GetParam());
  for (int i = 0; i < 20; ++i) {
    const auto s = testing::RandomSnapshot(rng, kT0 + static_cast<int64_t>(rng() % 100000) * 60'000);
    const std::string text = SerializeSnapshot(s);
    const auto parsed = ParseSnapshots(text);
    ASSERT_EQ(parsed.size(), 1u);
    EXPECT_EQ(parsed[0], Canonicalize(s));
    EXPECT_EQ(SerializeSnapshot(parsed[0]), text);
  }
}

INSTANTIATE_TEST_SUITE_P(Seeds, CodecProperty, ::testing::Range<uint64_t>(1, 21));

}  // namespace
}  // namespace tracegrid
