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

#include <functional>
#include <optional>
#include <string>

#include "fairscreen/model.hpp"

namespace fairscreen {

enum class Sense { kMaximize, kMinimize };

// Scores a (recall, precision) pair. An undefined precision counts as 0.
class Objective {
 public:
  enum class Kind { kPrecision, kLinear, kReciprocal, kCustom };
  using Fn = std::function<double(double recall, double precision)>;

  Objective() : Objective(precision()) {}

  static Objective precision();
  static Objective recall();
  // (1 - alpha) * recall + alpha * precision, maximized.
  static Objective linear(double alpha);
  // (1 - alpha) / recall + alpha / precision, minimized.
  static Objective reciprocal(double alpha);
  static Objective custom(std::string name, Fn fn, Sense sense);

  Kind kind() const { return kind_; }
  Sense sense() const { return sense_; }
  double alpha() const { return alpha_; }
  const std::string& name() const { return name_; }

  // True for precision and linear objectives.
  bool is_linear() const { return kind_ == Kind::kPrecision || kind_ == Kind::kLinear; }

  double score(double recall, std::optional<double> precision) const;
  double score(const Evaluation& evaluation) const {
    return score(evaluation.recall, evaluation.precision);
  }

  bool better(double a, double b) const {
    return sense_ == Sense::kMaximize ? a > b : a < b;
  }
  double worst() const;

 private:
  Objective(Kind kind, Sense sense, double alpha, std::string name, Fn fn);

  Kind kind_;
  Sense sense_;
  double alpha_;
  std::string name_;
  Fn fn_;
};

}  // namespace fairscreen
