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

#ifndef CLTV_RANKS_H_
#define CLTV_RANKS_H_

#include <span>
#include <vector>

namespace cltv {

// 1-based ranks with ties sharing the average of the positions they occupy.
std::vector<double> AverageRanks(std::span<const double> values);

// Fractional rank in (0, 1): (average rank - 0.5) / n.
std::vector<double> FractionalRanks(std::span<const double> values);

}  // namespace cltv

#endif  // CLTV_RANKS_H_
