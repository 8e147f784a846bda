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

// Data-parallel inner loops with a scalar reference implementation and
// vector variants picked at runtime.
//
// Every variant performs the same IEEE operations per element in the same
// order as the scalar reference (no FMA contraction, no reassociation), so
// results are bit-identical across backends. The equivalence tests rely on
// that.

#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>

namespace mecast::kernels {

enum class Backend { kScalar, kAvx2 };

std::string_view backend_name(Backend b);

// Per-device stream weights of one task, each an array of length K:
//   input_spread[k]  = s_k   * x[k, f, route 3]
//   input_rate[k]    = R3_kf * x[k, f, route 3]
//   output_spread[k] = s_k   * x[k, f, route 4]
struct TaskStreamWeights {
  const double* input_spread;
  const double* input_rate;
  const double* output_spread;
  double output_rate;  // O_f / tau
};

struct KernelTable {
  // For every sample n in [0, N):
  //   totals[n] += max_k{input_spread[k] : req(k,n)==task} *
  //                max_k{input_rate[k]   : req(k,n)==task} +
  //                output_rate * max_k{output_spread[k] : req(k,n)==task}
  // with empty maxima equal to 0. `requests` is device-major, K rows of N.
  void (*accumulate_task_bandwidth)(std::int32_t task, const std::int32_t* requests,
                                    int num_devices, std::size_t num_samples,
                                    const TaskStreamWeights& weights, double* totals);

  // dual[i] += step * (local[i] - global[i])
  void (*dual_ascent)(double* dual, const double* local, const double* global,
                      std::size_t n, double step);

  // max_i |a[i] - b[i]|
  double (*max_abs_diff)(const double* a, const double* b, std::size_t n);

  // acc[i] += local[i] + dual[i] / step
  void (*accumulate_shifted)(double* acc, const double* local, const double* dual,
                             std::size_t n, double step);
};

const KernelTable& scalar_kernels();
// nullptr when the vector variant was not compiled in.
const KernelTable* avx2_kernels();

bool cpu_supports_avx2();

// Widest backend compiled in and supported by the CPU, unless overridden by
// set_backend() or the MECAST_KERNELS=scalar environment variable.
Backend active_backend();
// Throws std::invalid_argument if the backend is unavailable.
void set_backend(Backend backend);
const KernelTable& active();
const KernelTable& table(Backend backend);
bool available(Backend backend);

}  // namespace mecast::kernels
