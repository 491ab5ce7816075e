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

#include <cmath>
#include <limits>

#include "fairscreen/kernels.hpp"

namespace fairscreen::kernels::scalar {

void shift_or(std::uint64_t* out, const std::uint64_t* in, std::size_t nwords,
              std::size_t shift) {
  const std::size_t ws = shift / 64;
  const unsigned bs = static_cast<unsigned>(shift % 64);
  for (std::size_t w = 0; w < nwords; ++w) {
    std::uint64_t v = in[w];
    if (w >= ws) {
      v |= in[w - ws] << bs;
      if (bs != 0 && w >= ws + 1) v |= in[w - ws - 1] >> (64 - bs);
    }
    out[w] = v;
  }
}

void or_into(std::uint64_t* dst, const std::uint64_t* src, std::size_t nwords) {
  for (std::size_t w = 0; w < nwords; ++w) dst[w] |= src[w];
}

ScanResult scan_objective(const ScanParams& p, double t0, double step, std::size_t n) {
  const double w_recall = 1.0 - p.alpha;
  ScanResult best{p.reciprocal ? std::numeric_limits<double>::infinity()
                               : -std::numeric_limits<double>::infinity(),
                  0};
  for (std::size_t i = 0; i < n; ++i) {
    const double t = t0 + static_cast<double>(i) * step;
    const double denom = p.c * t + p.d;
    double v;
    if (p.reciprocal) {
      v = w_recall / t + p.alpha * (denom / (p.q * t));
      if (v < best.value) best = {v, i};
    } else {
      v = w_recall * t + p.alpha * (p.q * t / denom);
      if (v > best.value) best = {v, i};
    }
  }
  return best;
}

}  // namespace fairscreen::kernels::scalar
