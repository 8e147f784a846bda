// Copyright 2026 The mecast Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// AVX2 variants. This translation unit is the only one compiled with -mavx2;
// nothing here may be called unless cpu_supports_avx2() returned true.

#include <immintrin.h>

#include <cmath>

#include "mecast/kernels.hpp"

namespace mecast::kernels {

namespace {

inline double take_max(double v, double m) { return v > m ? v : m; }

void accumulate_task_bandwidth_avx2(std::int32_t task, const std::int32_t* requests,
                                    int num_devices, std::size_t num_samples,
                                    const TaskStreamWeights& w, double* totals) {
  const __m128i wanted = _mm_set1_epi32(task);
  const __m256d out_rate = _mm256_set1_pd(w.output_rate);
  std::size_t n = 0;
  for (; n + 4 <= num_samples; n += 4) {
    __m256d spread_in = _mm256_setzero_pd();
    __m256d rate_in = _mm256_setzero_pd();
    __m256d spread_out = _mm256_setzero_pd();
    for (int k = 0; k < num_devices; ++k) {
      const auto* row = requests + static_cast<std::size_t>(k) * num_samples + n;
      const __m128i req = _mm_loadu_si128(reinterpret_cast<const __m128i*>(row));
      const __m256d mask =
          _mm256_castsi256_pd(_mm256_cvtepi32_epi64(_mm_cmpeq_epi32(req, wanted)));
      spread_in = _mm256_max_pd(_mm256_and_pd(mask, _mm256_set1_pd(w.input_spread[k])),
                                spread_in);
      rate_in = _mm256_max_pd(_mm256_and_pd(mask, _mm256_set1_pd(w.input_rate[k])),
                              rate_in);
      spread_out = _mm256_max_pd(_mm256_and_pd(mask, _mm256_set1_pd(w.output_spread[k])),
                                 spread_out);
    }
    const __m256d input_bw = _mm256_mul_pd(spread_in, rate_in);
    const __m256d output_bw = _mm256_mul_pd(out_rate, spread_out);
    const __m256d acc = _mm256_loadu_pd(totals + n);
    _mm256_storeu_pd(totals + n, _mm256_add_pd(acc, _mm256_add_pd(input_bw, output_bw)));
  }
  for (; n < num_samples; ++n) {
    double si = 0.0, ri = 0.0, so = 0.0;
    for (int k = 0; k < num_devices; ++k) {
      if (requests[static_cast<std::size_t>(k) * num_samples + n] != task) continue;
      si = take_max(w.input_spread[k], si);
      ri = take_max(w.input_rate[k], ri);
      so = take_max(w.output_spread[k], so);
    }
    const double input_bw = si * ri;
    const double output_bw = w.output_rate * so;
    totals[n] += input_bw + output_bw;
  }
}

void dual_ascent_avx2(double* dual, const double* local, const double* global,
                      std::size_t n, double step) {
  const __m256d s = _mm256_set1_pd(step);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d diff = _mm256_sub_pd(_mm256_loadu_pd(local + i), _mm256_loadu_pd(global + i));
    _mm256_storeu_pd(dual + i, _mm256_add_pd(_mm256_loadu_pd(dual + i), _mm256_mul_pd(s, diff)));
  }
  for (; i < n; ++i) dual[i] += step * (local[i] - global[i]);
}

double max_abs_diff_avx2(const double* a, const double* b, std::size_t n) {
  const __m256d sign = _mm256_set1_pd(-0.0);
  __m256d m = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    m = _mm256_max_pd(_mm256_andnot_pd(sign, d), m);
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, m);
  double out = 0.0;
  for (double v : lanes) out = take_max(v, out);
  for (; i < n; ++i) out = take_max(std::abs(a[i] - b[i]), out);
  return out;
}

void accumulate_shifted_avx2(double* acc, const double* local, const double* dual,
                             std::size_t n, double step) {
  const __m256d s = _mm256_set1_pd(step);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d shifted =
        _mm256_add_pd(_mm256_loadu_pd(local + i), _mm256_div_pd(_mm256_loadu_pd(dual + i), s));
    _mm256_storeu_pd(acc + i, _mm256_add_pd(_mm256_loadu_pd(acc + i), shifted));
  }
  for (; i < n; ++i) acc[i] += local[i] + dual[i] / step;
}

}  // namespace

const KernelTable* avx2_kernels() {
  static const KernelTable table{
      accumulate_task_bandwidth_avx2,
      dual_ascent_avx2,
      max_abs_diff_avx2,
      accumulate_shifted_avx2,
  };
  return &table;
}

}  // namespace mecast::kernels
