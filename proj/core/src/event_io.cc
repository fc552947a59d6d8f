// Copyright 2026 The CLTV Authors.
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

#include "cltv/event_io.h"

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "artifacts_internal.h"
#include "cltv/error.h"
#include <nlohmann/json.hpp>

namespace cltv {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

[[noreturn]] void Fail(size_t line, const std::string& what) {
  throw DataError("event log line " + std::to_string(line) + ": " + what);
}

Timestamp ParseTs(const std::string& text, size_t line) {
  auto ts = ParseTimestamp(text);
  if (!ts) Fail(line, "bad timestamp '" + text + "'");
  return *ts;
}

EventKind ParseKind(const std::string& text, size_t line) {
  auto kind = ParseEventKind(text);
  if (!kind) Fail(line, "unknown kind '" + text + "'");
  return *kind;
}

std::string FormatValue(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

// Splits one CSV record honoring double quotes.
std::vector<std::string> SplitCsv(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  fields.push_back(std::move(cur));
  return fields;
}

std::string QuoteCsv(const std::string& field) {
  if (field.find_first_of(",\"\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::map<std::string, std::string> ParseAttrs(const std::string& text,
                                              size_t line) {
  std::map<std::string, std::string> attrs;
  if (text.empty()) return attrs;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ';')) {
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos) Fail(line, "attrs entry without '=': " + item);
    attrs[item.substr(0, eq)] = item.substr(eq + 1);
  }
  return attrs;
}

}  // namespace

EventLog ReadEventsNdjson(std::istream& in) {
  EventLog events;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::parse_error& e) {
      Fail(line_no, std::string("invalid JSON: ") + e.what());
    }
    if (!obj.is_object()) Fail(line_no, "record is not an object");
    CustomerEvent e;
    try {
      if (!obj.contains("customer_id")) Fail(line_no, "missing customer_id");
      if (!obj.contains("ts")) Fail(line_no, "missing ts");
      if (!obj.contains("kind")) Fail(line_no, "missing kind");
      const json& id = obj["customer_id"];
      e.customer_id = id.is_string() ? id.get<std::string>() : id.dump();
      const json& ts = obj["ts"];
      if (ts.is_number_integer()) {
        e.ts = ts.get<Timestamp>();
      } else if (ts.is_string()) {
        e.ts = ParseTs(ts.get<std::string>(), line_no);
      } else {
        Fail(line_no, "ts must be an integer or string");
      }
      e.kind = ParseKind(obj["kind"].get<std::string>(), line_no);
      if (auto it = obj.find("product_id"); it != obj.end() && !it->is_null()) {
        e.product_id = it->is_string() ? it->get<std::string>() : it->dump();
      }
      if (auto it = obj.find("value"); it != obj.end() && !it->is_null()) {
        e.value = it->get<double>();
      }
      if (auto it = obj.find("attrs"); it != obj.end() && !it->is_null()) {
        for (const auto& [k, v] : it->items()) {
          e.attrs[k] = v.is_string() ? v.get<std::string>() : v.dump();
        }
      }
    } catch (const json::exception& ex) {
      Fail(line_no, ex.what());
    }
    events.push_back(std::move(e));
  }
  return events;
}

void WriteEventsNdjson(const EventLog& events, std::ostream& out) {
  for (const CustomerEvent& e : events) {
    ordered_json obj;
    obj["customer_id"] = e.customer_id;
    obj["ts"] = e.ts;
    obj["kind"] = EventKindName(e.kind);
    if (!e.product_id.empty()) obj["product_id"] = e.product_id;
    if (e.value != 0.0) obj["value"] = e.value;
    if (!e.attrs.empty()) {
      ordered_json attrs = ordered_json::object();
      for (const auto& [k, v] : e.attrs) attrs[k] = v;
      obj["attrs"] = std::move(attrs);
    }
    out << obj.dump() << '\n';
  }
}

EventLog ReadEventsCsv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) return {};
  const std::vector<std::string> header = SplitCsv(line);
  auto column = [&](const std::string& name) -> int {
    for (size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) return static_cast<int>(i);
    }
    return -1;
  };
  const int c_id = column("customer_id"), c_ts = column("ts"),
            c_kind = column("kind"), c_product = column("product_id"),
            c_value = column("value"), c_attrs = column("attrs");
  if (c_id < 0 || c_ts < 0 || c_kind < 0) {
    Fail(1, "CSV header must name customer_id, ts and kind");
  }
  EventLog events;
  size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::vector<std::string> f = SplitCsv(line);
    if (f.size() != header.size()) {
      Fail(line_no, "expected " + std::to_string(header.size()) + " fields");
    }
    CustomerEvent e;
    e.customer_id = f[c_id];
    e.ts = ParseTs(f[c_ts], line_no);
    e.kind = ParseKind(f[c_kind], line_no);
    if (c_product >= 0) e.product_id = f[c_product];
    if (c_value >= 0 && !f[c_value].empty()) {
      try {
        size_t used = 0;
        e.value = std::stod(f[c_value], &used);
        if (used != f[c_value].size()) throw std::invalid_argument("trailing");
      } catch (const std::exception&) {
        Fail(line_no, "bad value '" + f[c_value] + "'");
      }
    }
    if (c_attrs >= 0) e.attrs = ParseAttrs(f[c_attrs], line_no);
    events.push_back(std::move(e));
  }
  return events;
}

void WriteEventsCsv(const EventLog& events, std::ostream& out) {
  out << "customer_id,ts,kind,product_id,value,attrs\n";
  for (const CustomerEvent& e : events) {
    std::string attrs;
    for (const auto& [k, v] : e.attrs) {
      if (!attrs.empty()) attrs += ';';
      attrs += k + "=" + v;
    }
    out << QuoteCsv(e.customer_id) << ',' << e.ts << ','
        << EventKindName(e.kind) << ',' << QuoteCsv(e.product_id) << ','
        << (e.value != 0.0 ? FormatValue(e.value) : std::string()) << ','
        << QuoteCsv(attrs) << '\n';
  }
}

EventLog ReadEventsFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open event log " + path.string());
  return path.extension() == ".csv" ? ReadEventsCsv(in) : ReadEventsNdjson(in);
}

void WriteEventsFile(const EventLog& events, const std::filesystem::path& path) {
  internal::AtomicWrite(path, [&](std::ostream& out) {
    if (path.extension() == ".csv") {
      WriteEventsCsv(events, out);
    } else {
      WriteEventsNdjson(events, out);
    }
  });
}

}  // namespace cltv
