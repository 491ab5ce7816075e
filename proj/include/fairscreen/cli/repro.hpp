// Copyright 2026 The fair-screen Authors
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

#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace fairscreen::cli {

struct ReproCheck {
  std::string name;
  std::string expected;
  double actual = 0.0;
  bool pass = false;
};

std::vector<std::string> repro_ids();

// Throws UnknownExample for unrecognised ids.
std::vector<ReproCheck> run_repro(std::string_view id);

}  // namespace fairscreen::cli
