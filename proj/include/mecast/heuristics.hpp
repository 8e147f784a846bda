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

// Baseline policies and the output-caching path for alpha <= 1.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "mecast/bandwidth.hpp"
#include "mecast/instance.hpp"

namespace mecast {

struct GreedyStep {
  int device = 0;
  int task = 0;
  Route route = Route::kEdgeCompute;
  double score = 0.0;
  double cumulative_cache = 0.0;   // bits used on this device so far
  double cumulative_energy = 0.0;  // J used on this device so far
};

struct GreedyTrace {
  std::vector<GreedyStep> steps;
};

void write_trace_csv(std::ostream& out, const GreedyTrace& trace);

// Route 4 everywhere.
ServicePolicy mec_computing_policy(const Instance& instance);

// Per device, output-caches the longest prefix of tasks ordered by
// P R4 / O (descending, ties by task index) that fits the cache.
ServicePolicy greedy_caching_policy(const Instance& instance, GreedyTrace* trace = nullptr);

// Per device:
//  1. route 2 for the longest prefix, ordered by P R4 / (O + P mu I w f^2),
//     that fits both the cache (on I) and the energy budget;
//  2. if cache is left, output-cache the longest fitting prefix of the
//     remaining tasks in greedy-caching order;
//  3. otherwise, if energy is left, route 3 for the longest fitting prefix
//     ordered by P (R4 - R3) / (P mu I w f^2), skipping scores <= 0;
//  4. route 4 for the rest.
ServicePolicy greedy_caching_computing_policy(const Instance& instance,
                                              GreedyTrace* trace = nullptr);

// Output-caching objective restricted to routes 1 and 4:
// (1/N) sum_n sum_f (O_f / tau) max{s_k : A_nk = f, (k, f) not cached}.
// `cached` is device-major K x F.
double output_caching_objective(const Instance& instance, const SampleBatch& samples,
                                const std::vector<std::uint8_t>& cached);

// Greedy over (k, f) output-cache bits, largest objective decrease per
// output bit first, while the decrease is positive and the bit fits.
// Ties by task index, then device index. Throws mecast::Error if alpha > 1.
ServicePolicy alpha_le1_greedy(const Instance& instance, const SampleBatch& samples,
                               GreedyTrace* trace = nullptr);

struct SubmodularityReport {
  std::uint64_t trials = 0;
  std::uint64_t monotonicity_violations = 0;
  std::uint64_t diminishing_violations = 0;
  double full_set_value = 0.0;  // objective with every bit cached
  std::vector<std::string> counterexamples;  // first few, human readable

  bool passed() const {
    return monotonicity_violations == 0 && diminishing_violations == 0 && full_set_value == 0.0;
  }
};

// Random S subset of T, e outside T over the (k, f) output-cache bits. Checks
//   g(S + e) <= g(S)                          (nonincreasing)
//   g(S + e) - g(S) >= g(T + e) - g(T)        (diminishing returns)
// up to a relative 1e-12 of g(empty set). Throws mecast::Error if alpha > 1.
SubmodularityReport submodularity_check(const Instance& instance, const SampleBatch& samples,
                                        std::uint64_t trials, std::uint64_t seed);

}  // namespace mecast
