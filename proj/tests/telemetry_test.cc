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

#include <random>

#include "support.h"
#include "tracegrid/error.h"
#include "tracegrid/telemetry.h"

namespace tracegrid {
namespace {

constexpr const char* kThreeSpans = R"([
  {"traceId":"a1","id":"01","name":"get /users","timestamp":1700000000000123,"duration":1500,
   "localEndpoint":{"serviceName":"gateway"},"remoteEndpoint":{"serviceName":"users"},
   "tags":{"http.status_code":"200","app.instance":"us-south"}},
  {"traceId":"a1","id":"02","timestamp":1700000000001000,"duration":0,
   "localEndpoint":{"serviceName":"users"},"remoteEndpoint":{"serviceName":"db"},
   "tags":{"http.status_code":"429","app.instance":"eu-de"}},
  {"traceId":"b2","id":"03","name":"queue","timestamp":1700000000002000,"duration":42,
   "localEndpoint":{"serviceName":"worker"},
   "tags":{"status.code":"-1","app.instance":"jp-tok"}}
])";

TEST(ParseZipkinSpans, MapsFieldsOfWellFormedSpans) {
  const auto r = ParseZipkinSpans(kThreeSpans);
  ASSERT_EQ(r.spans.size(), 3u);
  EXPECT_EQ(r.skipped, 0u);

  const TraceSpan& a = r.spans[0];
  EXPECT_EQ(a.trace_id, "a1");
  EXPECT_EQ(a.span_id, "01");
  EXPECT_EQ(a.start_time_us, 1700000000000123);
  EXPECT_EQ(a.start_time_ms(), 1700000000000);
  EXPECT_EQ(a.duration_us, 1500);
  EXPECT_EQ(a.caller_id, "gateway");
  EXPECT_EQ(a.callee_id, "users");
  EXPECT_EQ(a.app_instance_id, "us-south");
  EXPECT_EQ(a.return_code, "200");

  EXPECT_EQ(r.spans[1].return_code, "429");
  EXPECT_EQ(r.spans[1].duration_us, 0);
  // No remote endpoint: the span name names the callee.
  EXPECT_EQ(r.spans[2].callee_id, "queue");
  EXPECT_EQ(r.spans[2].return_code, "-1");
}

TEST(ParseZipkinSpans, EmptyArray) {
  const auto r = ParseZipkinSpans("[]");
  EXPECT_TRUE(r.spans.empty());
  EXPECT_EQ(r.skipped, 0u);
}

TEST(ParseZipkinSpans, MissingDurationIsSkipped) {
  const auto r = ParseZipkinSpans(R"([{"traceId":"a","id":"b","timestamp":5,
      "localEndpoint":{"serviceName":"x"},"remoteEndpoint":{"serviceName":"y"}}])");
  EXPECT_TRUE(r.spans.empty());
  EXPECT_EQ(r.skipped, 1u);
}

TEST(ParseZipkinSpans, PerElementDefectsAreSkippedAndCounted) {
  const auto r = ParseZipkinSpans(R"([
    42,
    {"id":"b","traceId":"t","timestamp":1,"duration":1,"localEndpoint":{"serviceName":"x"}},
    {"id":"b","traceId":"t","timestamp":-1,"duration":1,
     "localEndpoint":{"serviceName":"x"},"remoteEndpoint":{"serviceName":"y"}},
    {"id":"b","traceId":"t","timestamp":1,"duration":1.5,
     "localEndpoint":{"serviceName":"x"},"remoteEndpoint":{"serviceName":"y"}},
    {"id":"b","traceId":"t","timestamp":1,"duration":"7",
     "localEndpoint":{"serviceName":"x"},"remoteEndpoint":{"serviceName":"y"}},
    {"traceId":"t","timestamp":1,"duration":1,
     "localEndpoint":{"serviceName":"x"},"remoteEndpoint":{"serviceName":"y"}},
    {"id":"b","traceId":"t","timestamp":1,"duration":1,
     "remoteEndpoint":{"serviceName":"y"}},
    {"id":"b","traceId":"t","timestamp":1,"duration":1,"tags":[],
     "localEndpoint":{"serviceName":"x"},"remoteEndpoint":{"serviceName":"y"}},
    {"id":"ok","traceId":"t","timestamp":1,"duration":2.0,
     "localEndpoint":{"serviceName":"x"},"remoteEndpoint":{"serviceName":"y"}}
  ])");
  ASSERT_EQ(r.spans.size(), 1u);
  EXPECT_EQ(r.skipped, 8u);
  EXPECT_EQ(r.spans[0].span_id, "ok");
  EXPECT_EQ(r.spans[0].duration_us, 2);
  EXPECT_EQ(r.spans[0].return_code, "unknown");
  EXPECT_EQ(r.spans[0].app_instance_id, "unknown");
}

TEST(ParseZipkinSpans, NonArrayDocumentIsMalformed) {
  for (const char* body : {"{}", "\"x\"", "12", "[", "", "null"}) {
    try {
      ParseZipkinSpans(body);
      ADD_FAILURE() << "accepted " << body;
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::kMalformedPayload) << body;
    }
  }
}

TEST(ParseZipkinSpans, InstanceTagKeyIsConfigurable) {
  const char* body = R"([{"traceId":"t","id":"1","timestamp":1,"duration":1,
      "localEndpoint":{"serviceName":"x"},"remoteEndpoint":{"serviceName":"y"},
      "tags":{"app.instance":"default-dc","region":"custom-dc"}}])";
  EXPECT_EQ(ParseZipkinSpans(body).spans.at(0).app_instance_id, "default-dc");
  ZipkinParseOptions opts;
  opts.instance_tag_key = "region";
  EXPECT_EQ(ParseZipkinSpans(body, opts).spans.at(0).app_instance_id, "custom-dc");
}

TEST(ParseZipkinSpans, HttpStatusTagWinsOverStatusCode) {
  const auto r = ParseZipkinSpans(R"([{"traceId":"t","id":"1","timestamp":1,"duration":1,
      "localEndpoint":{"serviceName":"x"},"remoteEndpoint":{"serviceName":"y"},
      "tags":{"http.status_code":" 503 ","status.code":"-1"}}])");
  EXPECT_EQ(r.spans.at(0).return_code, "503");
}

TEST(NormalizeReturnCode, Examples) {
  EXPECT_EQ(NormalizeReturnCode("429"), "429");
  EXPECT_EQ(NormalizeReturnCode("-1"), "-1");
  EXPECT_EQ(NormalizeReturnCode(std::nullopt), "unknown");
  EXPECT_EQ(NormalizeReturnCode(""), "unknown");
  EXPECT_EQ(NormalizeReturnCode("  \t"), "unknown");
  EXPECT_EQ(NormalizeReturnCode(" 200\n"), "200");
  EXPECT_EQ(NormalizeReturnCode("DEADLINE_EXCEEDED"), "DEADLINE_EXCEEDED");
}

TEST(ParseView, AcceptsNamesAndAliases) {
  EXPECT_EQ(ParseView("datacenter_services"), View::kDatacenterServices);
  EXPECT_EQ(ParseView("caller_callee_pairs"), View::kCallerCallee);
  EXPECT_EQ(ParseView("cc"), View::kCallerCallee);
  EXPECT_FALSE(ParseView("nope"));
  EXPECT_EQ(ViewName(View::kCallerCallee), "caller_callee_pairs");
}

TEST(TraceSpan, StartTimeMsFloorsTowardsNegativeInfinity) {
  TraceSpan s;
  s.start_time_us = 1999;
  EXPECT_EQ(s.start_time_ms(), 1);
  s.start_time_us = -1;
  EXPECT_EQ(s.start_time_ms(), -1);
}

// Property: serializing generated spans to Zipkin JSON and parsing them back
// is lossless, and output + skipped always equals the element count.
TEST(ParseZipkinSpansProperty, RoundTripIsLossless) {
  std::mt19937_64 rng(11);
  testing::RandomSpanOptions opt;
  opt.codes = {"200", "201", "429", "500", "-1", "unknown", "CANCELLED"};
  for (int round = 0; round < 50; ++round) {
    const auto spans = testing::RandomSpans(rng, rng() % 200, 1'700'000'000'000, 60'000, opt);
    for (const std::string key : {"app.instance", "dc"}) {
      ZipkinParseOptions po;
      po.instance_tag_key = key;
      const auto r = ParseZipkinSpans(SpansToZipkinJson(spans, key), po);
      EXPECT_EQ(r.skipped, 0u);
      ASSERT_EQ(r.spans, spans);
    }
  }
}

}  // namespace
}  // namespace tracegrid
