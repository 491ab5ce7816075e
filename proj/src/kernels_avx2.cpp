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

#include <immintrin.h>

#include <limits>

#include "fairscreen/kernels.hpp"

namespace fairscreen::kernels::avx2 {

void shift_or(std::uint64_t* out, const std::uint64_t* in, std::size_t nwords,
              std::size_t shift) {
  const std::size_t ws = shift / 64;
  const unsigned bs = static_cast<unsigned>(shift % 64);
  // Words below ws + 1 lack a full carry source; handle them scalar.
  const std::size_t head = ws + 1 < nwords ? ws + 1 : nwords;
  scalar::shift_or(out, in, head, shift);
  const __m128i lsh = _mm_cvtsi32_si128(static_cast<int>(bs));
  const __m128i rsh = _mm_cvtsi32_si128(static_cast<int>(64 - bs));
  std::size_t w = head;
  for (; w + 4 <= nwords; w += 4) {
    const __m256i self = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(in + w));
    const __m256i src = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(in + w - ws));
    const __m256i carry =
        _mm256_loadu_si256(reinterpret_cast<const __m256i*>(in + w - ws - 1));
    // A right shift by 64 yields zero, which covers bs == 0.
    const __m256i v = _mm256_or_si256(
        self, _mm256_or_si256(_mm256_sll_epi64(src, lsh), _mm256_srl_epi64(carry, rsh)));
    _mm256_storeu_si256(reinterpret_cast<__m256i*>(out + w), v);
  }
  for (; w < nwords; ++w) {
    std::uint64_t v = in[w] | (in[w - ws] << bs);
    if (bs != 0) v |= in[w - ws - 1] >> (64 - bs);
    out[w] = v;
  }
}

void or_into(std::uint64_t* dst, const std::uint64_t* src, std::size_t nwords) {
  std::size_t w = 0;
  for (; w + 4 <= nwords; w += 4) {
    const __m256i a = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(dst + w));
    const __m256i b = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(src + w));
    _mm256_storeu_si256(reinterpret_cast<__m256i*>(dst + w), _mm256_or_si256(a, b));
  }
  for (; w < nwords; ++w) dst[w] |= src[w];
}

ScanResult scan_objective(const ScanParams& p, double t0, double step, std::size_t n) {
  const double w_recall = 1.0 - p.alpha;
  const double init = p.reciprocal ? std::numeric_limits<double>::infinity()
                                   : -std::numeric_limits<double>::infinity();
  const __m256d vt0 = _mm256_set1_pd(t0);
  const __m256d vstep = _mm256_set1_pd(step);
  const __m256d vw = _mm256_set1_pd(w_recall);
  const __m256d va = _mm256_set1_pd(p.alpha);
  const __m256d vq = _mm256_set1_pd(p.q);
  const __m256d vc = _mm256_set1_pd(p.c);
  const __m256d vd = _mm256_set1_pd(p.d);
  const __m256d four = _mm256_set1_pd(4.0);
  __m256d best = _mm256_set1_pd(init);
  __m256d best_idx = _mm256_setr_pd(0.0, 1.0, 2.0, 3.0);
  __m256d idx = best_idx;

  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d t = _mm256_add_pd(vt0, _mm256_mul_pd(idx, vstep));
    const __m256d denom = _mm256_add_pd(_mm256_mul_pd(vc, t), vd);
    __m256d v;
    __m256d take;
    if (p.reciprocal) {
      v = _mm256_add_pd(_mm256_div_pd(vw, t),
                        _mm256_mul_pd(va, _mm256_div_pd(denom, _mm256_mul_pd(vq, t))));
      take = _mm256_cmp_pd(v, best, _CMP_LT_OQ);
    } else {
      v = _mm256_add_pd(_mm256_mul_pd(vw, t),
                        _mm256_mul_pd(va, _mm256_div_pd(_mm256_mul_pd(vq, t), denom)));
      take = _mm256_cmp_pd(v, best, _CMP_GT_OQ);
    }
    best = _mm256_blendv_pd(best, v, take);
    best_idx = _mm256_blendv_pd(best_idx, idx, take);
    idx = _mm256_add_pd(idx, four);
  }

  alignas(32) double vals[4];
  alignas(32) double idxs[4];
  _mm256_store_pd(vals, best);
  _mm256_store_pd(idxs, best_idx);
  ScanResult r{init, 0};
  bool have = false;
  for (int lane = 0; lane < 4; ++lane) {
    if (static_cast<std::size_t>(lane) >= n) break;
    const double v = vals[lane];
    const std::size_t at = static_cast<std::size_t>(idxs[lane]);
    const bool wins = p.reciprocal ? v < r.value : v > r.value;
    if (wins || (have && v == r.value && at < r.index)) {
      r = {v, at};
      have = true;
    }
  }
  if (i < n) {
    for (std::size_t j = i; j < n; ++j) {
      const double t = t0 + static_cast<double>(j) * step;
      const double denom = p.c * t + p.d;
      const double v = p.reciprocal ? w_recall / t + p.alpha * (denom / (p.q * t))
                                    : w_recall * t + p.alpha * (p.q * t / denom);
      if (p.reciprocal ? v < r.value : v > r.value) r = {v, j};
    }
  }
  return r;
}

}  // namespace fairscreen::kernels::avx2
