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

#ifndef CLTV_EVENT_IO_H_
#define CLTV_EVENT_IO_H_

#include <filesystem>
#include <iosfwd>

#include "cltv/events.h"

namespace cltv {

// Newline-delimited JSON, one object per event:
//   {"customer_id":..., "ts":..., "kind":..., "product_id":?, "value":?,
//    "attrs":?}
// `ts` is epoch seconds or an ISO-8601 UTC string. Malformed lines raise
// DataError carrying the 1-based line number.
EventLog ReadEventsNdjson(std::istream& in);
void WriteEventsNdjson(const EventLog& events, std::ostream& out);

// CSV with a header naming the same columns; `attrs` is "k=v;k=v".
EventLog ReadEventsCsv(std::istream& in);
void WriteEventsCsv(const EventLog& events, std::ostream& out);

// Dispatches on extension: ".csv" is CSV, anything else NDJSON.
EventLog ReadEventsFile(const std::filesystem::path& path);
void WriteEventsFile(const EventLog& events, const std::filesystem::path& path);

}  // namespace cltv

#endif  // CLTV_EVENT_IO_H_
