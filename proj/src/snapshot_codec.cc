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

#include "tracegrid/snapshot_codec.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <system_error>

#include "json.hpp"
#include "tracegrid/error.h"

namespace tracegrid {

using nlohmann::json;

namespace {

constexpr int kFractionDigits = 9;

std::string QuoteKey(const std::string& key) { return json(key).dump(); }

void WriteStats(std::string& out, const StatsBundle& b) {
  std::map<std::string, std::string> fields;
  for (const auto& [name, value] : b.extra) fields[name] = FormatNumber(value);
  if (b.count > 0 || b.extra.empty()) {
    fields[std::string(kStatCount)] = std::to_string(b.count);
    if (b.mean_ms) fields[std::string(kStatMean)] = FormatNumber(*b.mean_ms);
    if (b.min_ms) fields[std::string(kStatMin)] = FormatNumber(*b.min_ms);
    if (b.max_ms) fields[std::string(kStatMax)] = FormatNumber(*b.max_ms);
    if (b.std_ms) fields[std::string(kStatStd)] = FormatNumber(*b.std_ms);
    fields[std::string(kStatPct)] = FormatNumber(b.pct);
  }
  out += '{';
  bool first = true;
  for (const auto& [name, rendered] : fields) {
    if (!first) out += ',';
    first = false;
    out += QuoteKey(name);
    out += ':';
    out += rendered;
  }
  out += '}';
}

void WriteGrid(std::string& out, const CellGrid& grid) {
  out += '{';
  bool first_y = true;
  for (const auto& [y, row] : grid) {
    if (!first_y) out += ',';
    first_y = false;
    out += QuoteKey(y);
    out += ":{";
    bool first_x = true;
    for (const auto& [x, codes] : row) {
      if (!first_x) out += ',';
      first_x = false;
      out += QuoteKey(x);
      out += ":{";
      bool first_code = true;
      for (const auto& [code, bundle] : codes) {
        if (!first_code) out += ',';
        first_code = false;
        out += QuoteKey(code);
        out += ':';
        WriteStats(out, bundle);
      }
      out += '}';
    }
    out += '}';
  }
  out += '}';
}

std::string EscapePointerToken(const std::string& token) {
  std::string out;
  for (const char c : token) {
    if (c == '~') {
      out += "~0";
    } else if (c == '/') {
      out += "~1";
    } else {
      out += c;
    }
  }
  return out;
}

class PathBuilder {
 public:
  explicit PathBuilder(std::string base = "") : path_(std::move(base)) {}
  PathBuilder operator/(const std::string& token) const {
    return PathBuilder(path_ + "/" + EscapePointerToken(token));
  }
  [[noreturn]] void Fail(const std::string& what) const {
    throw Error(ErrorKind::kSchemaViolation, (path_.empty() ? "/" : path_) + ": " + what);
  }

 private:
  std::string path_;
};

double NumberAt(const json& node, const PathBuilder& path) {
  if (!node.is_number()) path.Fail("expected a number");
  return node.get<double>();
}

uint64_t CountAt(const json& node, const PathBuilder& path) {
  if (node.is_number_unsigned()) return node.get<uint64_t>();
  if (node.is_number_integer()) {
    const auto v = node.get<int64_t>();
    if (v < 0) path.Fail("count must be non-negative");
    return static_cast<uint64_t>(v);
  }
  if (node.is_number_float()) {
    const double v = node.get<double>();
    if (v >= 0 && v == std::floor(v) && v < 1.8e19) return static_cast<uint64_t>(v);
  }
  path.Fail("count must be a non-negative integer");
}

StatsBundle ParseStats(const json& node, const PathBuilder& path) {
  if (!node.is_object()) path.Fail("expected an object of named statistics");
  StatsBundle b;
  const bool canonical = node.contains(kStatCount);
  for (const auto& [name, value] : node.items()) {
    const auto at = path / name;
    if (!canonical) {
      b.extra[name] = NumberAt(value, at);
    } else if (name == kStatCount) {
      b.count = CountAt(value, at);
    } else if (value.is_null()) {
      continue;
    } else if (name == kStatMean) {
      b.mean_ms = NumberAt(value, at);
    } else if (name == kStatMin) {
      b.min_ms = NumberAt(value, at);
    } else if (name == kStatMax) {
      b.max_ms = NumberAt(value, at);
    } else if (name == kStatStd) {
      b.std_ms = NumberAt(value, at);
    } else if (name == kStatPct) {
      b.pct = NumberAt(value, at);
    } else {
      b.extra[name] = NumberAt(value, at);
    }
  }
  return b;
}

CellGrid ParseGrid(const json& node, const PathBuilder& path) {
  if (!node.is_object()) path.Fail("expected an object");
  CellGrid grid;
  for (const auto& [y, row] : node.items()) {
    const auto row_path = path / y;
    if (!row.is_object()) row_path.Fail("expected an object");
    auto& out_row = grid[y];
    for (const auto& [x, codes] : row.items()) {
      const auto cell_path = row_path / x;
      if (!codes.is_object()) cell_path.Fail("expected an object keyed by return code");
      auto& out_cell = out_row[x];
      for (const auto& [code, stats] : codes.items()) {
        out_cell.emplace(code, ParseStats(stats, cell_path / code));
      }
    }
  }
  return grid;
}

int64_t ParseTimestampKey(const std::string& key, const PathBuilder& path) {
  int64_t ts = 0;
  const auto* begin = key.data();
  const auto* end = key.data() + key.size();
  const auto [ptr, ec] = std::from_chars(begin, end, ts);
  if (key.empty() || ec != std::errc{} || ptr != end) {
    path.Fail("timestamp key is not a decimal integer");
  }
  return ts;
}

}  // namespace

std::string FormatNumber(double value) {
  if (!std::isfinite(value)) return "null";
  char buf[400];
  auto res = std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::fixed,
                           kFractionDigits);
  double rounded = 0;
  std::from_chars(buf, res.ptr, rounded);
  if (rounded == 0.0) rounded = 0.0;  // drop the sign of negative zero
  res = std::to_chars(buf, buf + sizeof(buf), rounded, std::chars_format::fixed);
  return std::string(buf, res.ptr);
}

double CanonicalNumber(double value) {
  if (!std::isfinite(value)) return value;
  const std::string text = FormatNumber(value);
  double out = 0;
  std::from_chars(text.data(), text.data() + text.size(), out);
  return out;
}

IntervalSnapshot Canonicalize(IntervalSnapshot snapshot) {
  auto fix = [](std::optional<double>& v) {
    if (v) v = CanonicalNumber(*v);
  };
  for (auto* grid : {&snapshot.datacenter_services, &snapshot.caller_callee_pairs}) {
    for (auto& [y, row] : *grid) {
      for (auto& [x, codes] : row) {
        for (auto& [code, b] : codes) {
          fix(b.mean_ms);
          fix(b.min_ms);
          fix(b.max_ms);
          fix(b.std_ms);
          b.pct = CanonicalNumber(b.pct);
          for (auto& [name, v] : b.extra) v = CanonicalNumber(v);
        }
      }
    }
  }
  return snapshot;
}

std::string SerializeSnapshotEntry(const IntervalSnapshot& snapshot) {
  std::string out;
  out += '"';
  out += std::to_string(snapshot.interval_start);
  out += "\":[{\"caller_callee_pairs\":";
  WriteGrid(out, snapshot.caller_callee_pairs);
  out += ",\"datacenter_services\":";
  WriteGrid(out, snapshot.datacenter_services);
  out += "}]";
  return out;
}

std::string SerializeSnapshot(const IntervalSnapshot& snapshot) {
  return "{" + SerializeSnapshotEntry(snapshot) + "}";
}

std::string SerializeSnapshots(std::span<const IntervalSnapshot> snapshots) {
  std::vector<std::string> entries;
  entries.reserve(snapshots.size());
  for (const auto& s : snapshots) entries.push_back(SerializeSnapshotEntry(s));
  return JoinEntries(entries);
}

size_t JoinedSize(std::span<const std::string> entries) {
  size_t size = 2;
  for (const auto& e : entries) size += e.size();
  if (!entries.empty()) size += entries.size() - 1;
  return size;
}

std::string JoinEntries(std::span<const std::string> entries) {
  std::string out;
  out.reserve(JoinedSize(entries));
  out += '{';
  for (size_t i = 0; i < entries.size(); ++i) {
    if (i > 0) out += ',';
    out += entries[i];
  }
  out += '}';
  return out;
}

std::vector<IntervalSnapshot> ParseSnapshots(std::string_view text, int64_t interval_length_ms) {
  const PathBuilder root;
  json doc = json::parse(text, nullptr, /*allow_exceptions=*/false);
  if (doc.is_discarded()) root.Fail("document is not valid JSON");
  if (!doc.is_object()) root.Fail("expected an object keyed by timestamp");

  std::vector<IntervalSnapshot> out;
  out.reserve(doc.size());
  for (const auto& [key, entry] : doc.items()) {
    const auto path = root / key;
    IntervalSnapshot snap;
    snap.interval_start = ParseTimestampKey(key, path);
    snap.interval_length_ms = interval_length_ms;
    if (!entry.is_array() || entry.size() != 1) {
      path.Fail("expected an array holding exactly one object");
    }
    const auto body_path = path / "0";
    const auto& body = entry.front();
    if (!body.is_object()) body_path.Fail("expected an object");
    if (const auto it = body.find("datacenter_services"); it != body.end()) {
      snap.datacenter_services = ParseGrid(*it, body_path / "datacenter_services");
    }
    if (const auto it = body.find("caller_callee_pairs"); it != body.end()) {
      snap.caller_callee_pairs = ParseGrid(*it, body_path / "caller_callee_pairs");
    }
    out.push_back(std::move(snap));
  }
  std::sort(out.begin(), out.end(), [](const IntervalSnapshot& a, const IntervalSnapshot& b) {
    return a.interval_start < b.interval_start;
  });
  for (size_t i = 1; i < out.size(); ++i) {
    if (out[i].interval_start == out[i - 1].interval_start) {
      (root / std::to_string(out[i].interval_start)).Fail("duplicate timestamp");
    }
  }
  return out;
}

}  // namespace tracegrid
