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

#ifndef CLTV_SRC_ARTIFACTS_INTERNAL_H_
#define CLTV_SRC_ARTIFACTS_INTERNAL_H_

#include <filesystem>
#include <functional>
#include <ostream>

namespace cltv::internal {

// Streams into `<path>.tmp` then renames; the target never holds a partial file.
void AtomicWrite(const std::filesystem::path& path,
                 const std::function<void(std::ostream&)>& write);

}  // namespace cltv::internal

#endif  // CLTV_SRC_ARTIFACTS_INTERNAL_H_
