// Copyright 2026 The xfed Authors
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

#include <doctest.h>

#include "common/laws_core.hpp"

TEST_SUITE("algebra laws") {
  TEST_CASE("randomized law suite holds") {
    xfed::test::LawStats st = xfed::test::run_law_suite(20260816);
    CAPTURE(st.instances);
    for (const std::string& n : st.notes) MESSAGE(n);
    CHECK(st.instances >= 1000);
    CHECK(st.failures == 0);
  }

  TEST_CASE("a second seed holds too") {
    xfed::test::LawStats st = xfed::test::run_law_suite(98765);
    for (const std::string& n : st.notes) MESSAGE(n);
    CHECK(st.failures == 0);
  }
}
