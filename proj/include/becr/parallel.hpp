/* Copyright 2026 The BECR Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#ifndef BECR_PARALLEL_HPP_
#define BECR_PARALLEL_HPP_

#include <cstddef>
#include <functional>

namespace becr {

// Worker-thread budget: min(hardware threads, BECR_THREADS). At least 1.
// Read once per process.
int thread_budget();

// Runs fn(i) for i in [0, n). Work items must write only their own output
// slot; chunks are contiguous index ranges, so results are identical at any
// thread count. Falls back to a plain loop when the budget is 1.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace becr

#endif  // BECR_PARALLEL_HPP_
