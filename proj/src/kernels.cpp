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

#include "fairscreen/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>

#include "fairscreen/errors.hpp"

namespace fairscreen::kernels {

namespace {

Isa detect() {
  const char* env = std::getenv("FAIR_SCREEN_ISA");
  if (env != nullptr && std::strcmp(env, "scalar") == 0) return Isa::kScalar;
  return isa_supported(Isa::kAvx2) ? Isa::kAvx2 : Isa::kScalar;
}

std::atomic<Isa>& current() {
  static std::atomic<Isa> isa{detect()};
  return isa;
}

}  // namespace

bool isa_supported(Isa isa) {
  switch (isa) {
    case Isa::kScalar:
      return true;
    case Isa::kAvx2:
#if defined(FAIRSCREEN_HAVE_AVX2)
      return __builtin_cpu_supports("avx2");
#else
      return false;
#endif
  }
  return false;
}

Isa active_isa() { return current().load(std::memory_order_relaxed); }

void set_isa(Isa isa) {
  if (!isa_supported(isa)) {
    throw Error(ErrorCode::kInvalidParams,
                std::string("instruction set not available: ") + std::string(isa_name(isa)));
  }
  current().store(isa, std::memory_order_relaxed);
}

std::string_view isa_name(Isa isa) {
  return isa == Isa::kAvx2 ? "avx2" : "scalar";
}

void shift_or(std::span<std::uint64_t> out, std::span<const std::uint64_t> in,
              std::size_t shift) {
#if defined(FAIRSCREEN_HAVE_AVX2)
  if (active_isa() == Isa::kAvx2) return avx2::shift_or(out.data(), in.data(), in.size(), shift);
#endif
  scalar::shift_or(out.data(), in.data(), in.size(), shift);
}

void or_into(std::span<std::uint64_t> dst, std::span<const std::uint64_t> src) {
#if defined(FAIRSCREEN_HAVE_AVX2)
  if (active_isa() == Isa::kAvx2) return avx2::or_into(dst.data(), src.data(), src.size());
#endif
  scalar::or_into(dst.data(), src.data(), src.size());
}

ScanResult scan_objective(const ScanParams& params, double t0, double step,
                          std::size_t n) {
#if defined(FAIRSCREEN_HAVE_AVX2)
  if (active_isa() == Isa::kAvx2) return avx2::scan_objective(params, t0, step, n);
#endif
  return scalar::scan_objective(params, t0, step, n);
}

}  // namespace fairscreen::kernels
