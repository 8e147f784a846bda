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

#include <cmath>

#include "mecast/kernels.hpp"

namespace mecast::kernels {

namespace {

// v > m ? v : m, written to match MAXPD operand semantics exactly.
inline double take_max(double v, double m) { return v > m ? v : m; }

void accumulate_task_bandwidth_scalar(std::int32_t task, const std::int32_t* requests,
                                      int num_devices, std::size_t num_samples,
                                      const TaskStreamWeights& w, double* totals) {
  for (std::size_t n = 0; n < num_samples; ++n) {
    double spread_in = 0.0;
    double rate_in = 0.0;
    double spread_out = 0.0;
    for (int k = 0; k < num_devices; ++k) {
      if (requests[static_cast<std::size_t>(k) * num_samples + n] != task) continue;
      spread_in = take_max(w.input_spread[k], spread_in);
      rate_in = take_max(w.input_rate[k], rate_in);
      spread_out = take_max(w.output_spread[k], spread_out);
    }
    const double input_bw = spread_in * rate_in;
    const double output_bw = w.output_rate * spread_out;
    totals[n] += input_bw + output_bw;
  }
}

void dual_ascent_scalar(double* dual, const double* local, const double* global,
                        std::size_t n, double step) {
  for (std::size_t i = 0; i < n; ++i) dual[i] += step * (local[i] - global[i]);
}

double max_abs_diff_scalar(const double* a, const double* b, std::size_t n) {
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i) m = take_max(std::abs(a[i] - b[i]), m);
  return m;
}

void accumulate_shifted_scalar(double* acc, const double* local, const double* dual,
                               std::size_t n, double step) {
  for (std::size_t i = 0; i < n; ++i) acc[i] += local[i] + dual[i] / step;
}

}  // namespace

const KernelTable& scalar_kernels() {
  static const KernelTable table{
      accumulate_task_bandwidth_scalar,
      dual_ascent_scalar,
      max_abs_diff_scalar,
      accumulate_shifted_scalar,
  };
  return table;
}

}  // namespace mecast::kernels
