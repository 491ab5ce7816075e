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

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace fairscreen::kernels {

enum class Isa { kScalar, kAvx2 };

bool isa_supported(Isa isa);
// Selected on first use: the best supported ISA unless FAIR_SCREEN_ISA=scalar.
Isa active_isa();
// Throws InvalidParams if `isa` is not supported on this machine.
void set_isa(Isa isa);
std::string_view isa_name(Isa isa);

// Treating `in` as one little-endian bit string, writes in | (in << shift)
// to `out`. Bits shifted past the end are dropped. `out` must not alias `in`.
void shift_or(std::span<std::uint64_t> out, std::span<const std::uint64_t> in,
              std::size_t shift);

void or_into(std::span<std::uint64_t> dst, std::span<const std::uint64_t> src);

// Linear or reciprocal objective of the common-tpr parametrisation
// precision(t) = q t / (c t + d).
struct ScanParams {
  double alpha = 0.0;
  double q = 1.0;
  double c = 1.0;
  double d = 0.0;
  bool reciprocal = false;  // minimize (1-a)/t + a/precision instead
};

struct ScanResult {
  double value;
  std::size_t index;
};

// Best value over t_i = t0 + i * step, i < n (maximum for linear, minimum for
// reciprocal). The first index wins ties; NaN values never win.
ScanResult scan_objective(const ScanParams& params, double t0, double step,
                          std::size_t n);

namespace scalar {
void shift_or(std::uint64_t* out, const std::uint64_t* in, std::size_t nwords,
              std::size_t shift);
void or_into(std::uint64_t* dst, const std::uint64_t* src, std::size_t nwords);
ScanResult scan_objective(const ScanParams& params, double t0, double step,
                          std::size_t n);
}  // namespace scalar

#if defined(FAIRSCREEN_HAVE_AVX2)
namespace avx2 {
void shift_or(std::uint64_t* out, const std::uint64_t* in, std::size_t nwords,
              std::size_t shift);
void or_into(std::uint64_t* dst, const std::uint64_t* src, std::size_t nwords);
ScanResult scan_objective(const ScanParams& params, double t0, double step,
                          std::size_t n);
}  // namespace avx2
#endif

}  // namespace fairscreen::kernels
