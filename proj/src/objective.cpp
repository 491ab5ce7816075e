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

#include "fairscreen/objective.hpp"

#include <cmath>
#include <limits>

#include "fairscreen/errors.hpp"

namespace fairscreen {

namespace {

void check_alpha(double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw Error(ErrorCode::kInvalidParams, "alpha must lie in [0,1]");
  }
}

}  // namespace

Objective::Objective(Kind kind, Sense sense, double alpha, std::string name, Fn fn)
    : kind_(kind), sense_(sense), alpha_(alpha), name_(std::move(name)), fn_(std::move(fn)) {}

Objective Objective::precision() {
  return Objective(Kind::kPrecision, Sense::kMaximize, 1.0, "precision", {});
}

Objective Objective::recall() {
  return Objective(Kind::kLinear, Sense::kMaximize, 0.0, "linear", {});
}

Objective Objective::linear(double alpha) {
  check_alpha(alpha);
  return Objective(Kind::kLinear, Sense::kMaximize, alpha, "linear", {});
}

Objective Objective::reciprocal(double alpha) {
  check_alpha(alpha);
  return Objective(Kind::kReciprocal, Sense::kMinimize, alpha, "reciprocal", {});
}

Objective Objective::custom(std::string name, Fn fn, Sense sense) {
  if (!fn) throw Error(ErrorCode::kInvalidParams, "custom objective needs a function");
  return Objective(Kind::kCustom, sense, 0.0, std::move(name), std::move(fn));
}

double Objective::worst() const {
  return sense_ == Sense::kMaximize ? -std::numeric_limits<double>::infinity()
                                    : std::numeric_limits<double>::infinity();
}

double Objective::score(double recall, std::optional<double> precision) const {
  const double p = precision.value_or(0.0);
  switch (kind_) {
    case Kind::kPrecision:
    case Kind::kLinear:
      return (1.0 - alpha_) * recall + alpha_ * p;
    case Kind::kReciprocal: {
      constexpr double kInf = std::numeric_limits<double>::infinity();
      double s = 0.0;
      if (alpha_ < 1.0) s += recall > 0.0 ? (1.0 - alpha_) / recall : kInf;
      if (alpha_ > 0.0) s += p > 0.0 ? alpha_ / p : kInf;
      return s;
    }
    case Kind::kCustom:
      return fn_(recall, p);
  }
  return worst();
}

}  // namespace fairscreen
