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

#include <optional>
#include <string>

#include <json.hpp>

#include "fairscreen/model.hpp"
#include "fairscreen/report.hpp"

namespace fairscreen::cli {

struct PipelineSpec {
  Pipeline pipeline;
  std::optional<double> tolerance;
};

// Masses come either as raw "q"/"u" or as "weight" with "base_rate"; they are
// rescaled to total one. Throws ParseError naming the offending field.
PipelineSpec parse_pipeline(const nlohmann::json& doc);
PipelineSpec load_pipeline(const std::string& path);

// Reads {"groups": [{"id", "stages": [{"pi1", "pi0"}]}]}; other keys ignored.
Policy parse_policy(const nlohmann::json& doc);
Policy load_policy(const std::string& path);

nlohmann::json read_json(const std::string& path);

nlohmann::json to_json(const Pipeline& pipeline);
nlohmann::json to_json(const Policy& policy);
// Report document; its "groups" array doubles as a policy file.
nlohmann::json to_json(const Pipeline& pipeline, const SolverReport& report,
                       double tolerance);

std::string render_table(const Pipeline& pipeline, const SolverReport& report,
                         double tolerance);

}  // namespace fairscreen::cli
