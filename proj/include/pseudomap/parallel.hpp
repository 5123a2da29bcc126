// Copyright 2026 The PseudoMap Authors
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

#ifndef PSEUDOMAP__PARALLEL_HPP_
#define PSEUDOMAP__PARALLEL_HPP_

#include <cstddef>
#include <functional>

namespace pseudomap
{

/// Worker count used by parallel_for; 1 until set.
void set_thread_count(int n);
int thread_count();

/// Calls f(i) for i in [0, n). Indices are dealt round-robin to a fixed
/// number of workers; callers write results into per-index slots, so the
/// outcome does not depend on the worker count. The exception of the
/// smallest failing index is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)> & f);

}  // namespace pseudomap

#endif  // PSEUDOMAP__PARALLEL_HPP_
