// Copyright 2026 The mtesim Authors
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

// Shared fixtures for the unit tests.

#ifndef MTESIM_TESTS_TEST_UTIL_HPP_
#define MTESIM_TESTS_TEST_UTIL_HPP_

#include "mtesim/tagmem.hpp"

namespace mtesim::test {

inline constexpr Addr kUser = 0x10000;

// One taggable user page at kUser.
inline TaggedMemory user_memory() {
  TaggedMemory m;
  m.map(kUser, kPageBytes, PageAttrs{true, false});
  return m;
}

}  // namespace mtesim::test

#endif  // MTESIM_TESTS_TEST_UTIL_HPP_
