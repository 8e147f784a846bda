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

// Seeded instance generators shared by the unit tests and the acceptance
// binary.

#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <vector>

#include "mecast/bandwidth.hpp"
#include "mecast/instance.hpp"
#include "mecast/symmetric.hpp"

namespace mecast::testing {

// Random heterogeneous instance. Budgets are drawn as fractions of what
// caching or computing everything would need, so every route can matter.
inline Instance random_instance(std::uint64_t seed, int K, int F, double alpha) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Instance inst;
  inst.catalog.alpha = alpha;
  for (int f = 0; f < F; ++f) {
    const double I = 1e6 * (1.0 + 4.0 * u(rng));
    inst.catalog.tasks.push_back({I, 5.0 + 10.0 * u(rng), alpha * I});
  }
  inst.params.energy_coeff = 1e-27;
  double worst_time = 0.0;
  for (int k = 0; k < K; ++k) {
    DeviceSpec d;
    d.cpu_freq = 1e9 * (1.0 + 2.0 * u(rng));
    d.inv_spectral_eff = 0.1 + 0.4 * u(rng);
    std::vector<double> w(F);
    double total = 0.0;
    for (auto& x : w) {
      x = 0.1 + u(rng);
      total += x;
    }
    for (auto& x : w) x /= total;
    d.demand = w;
    inst.devices.push_back(d);
  }
  for (int k = 0; k < K; ++k) {
    for (int f = 0; f < F; ++f) worst_time = std::max(worst_time, inst.compute_time(k, f));
  }
  inst.params.deadline = worst_time * (1.2 + 2.0 * u(rng));
  for (int k = 0; k < K; ++k) {
    double all_out = 0.0, all_energy = 0.0;
    for (int f = 0; f < F; ++f) {
      all_out += inst.task(f).output_bits;
      all_energy += inst.compute_energy(k, f);
    }
    inst.devices[k].cache_bits = all_out * 0.6 * u(rng);
    inst.devices[k].avg_energy = all_energy * u(rng);
  }
  return inst;
}

// Two devices, two tasks: I = 5e5, O = 1e6, tau = 0.1 so R4 = 1e7, and
// s = (0.1, 0.2). Uniform demand, generous deadline.
inline Instance hand_instance(double cache_bits = 0.0, double avg_energy = 0.0) {
  Instance inst;
  inst.catalog.alpha = 2.0;
  inst.catalog.tasks = {{5e5, 10.0, 1e6}, {5e5, 10.0, 1e6}};
  inst.params.deadline = 0.1;
  inst.params.energy_coeff = 1e-27;
  for (double s : {0.1, 0.2}) {
    DeviceSpec d;
    d.cache_bits = cache_bits;
    d.avg_energy = avg_energy;
    d.cpu_freq = 1e9;
    d.inv_spectral_eff = s;
    d.demand = {0.5, 0.5};
    inst.devices.push_back(d);
  }
  return inst;
}

// Straight transcription of the per-sample bandwidth for a relaxed policy,
// used as an independent reference for the engine.
inline double naive_sample_bandwidth(const Instance& inst, const ServicePolicy& x,
                                     const std::vector<int>& request) {
  const double tau = inst.params.deadline;
  double total = 0.0;
  for (int f = 0; f < inst.num_tasks(); ++f) {
    double spread_in = 0.0, rate_in = 0.0, spread_out = 0.0;
    for (int k = 0; k < inst.num_devices(); ++k) {
      if (request[k] != f) continue;
      const double r3 = inst.task(f).input_bits / (tau - inst.compute_time(k, f));
      const double s = inst.device(k).inv_spectral_eff;
      spread_in = std::max(spread_in, s * x(k, f, 2));
      rate_in = std::max(rate_in, r3 * x(k, f, 2));
      spread_out = std::max(spread_out, s * x(k, f, 3));
    }
    total += spread_in * rate_in + inst.task(f).output_bits / tau * spread_out;
  }
  return total;
}

// Expectation by enumerating every joint request with its probability.
inline double naive_expected_bandwidth(const Instance& inst, const ServicePolicy& x) {
  const int K = inst.num_devices();
  const int F = inst.num_tasks();
  std::vector<int> a(K, 0);
  double total = 0.0;
  for (;;) {
    double p = 1.0;
    for (int k = 0; k < K; ++k) p *= inst.device(k).demand[a[k]];
    total += p * naive_sample_bandwidth(inst, x, a);
    int k = 0;
    while (k < K && ++a[k] == F) a[k++] = 0;
    if (k == K) break;
  }
  return total;
}

// Every binary policy, feasible or not, in encoding order.
inline std::vector<ServicePolicy> all_binary_policies(int K, int F) {
  const int rows = K * F;
  std::vector<ServicePolicy> out;
  std::vector<Route> routes(rows, Route::kOutputCache);
  std::vector<int> digit(rows, 0);
  for (;;) {
    for (int i = 0; i < rows; ++i) routes[i] = kAllRoutes[digit[i]];
    out.push_back(ServicePolicy::from_routes(K, F, routes));
    int i = rows - 1;
    while (i >= 0 && ++digit[i] == kNumRoutes) digit[i--] = 0;
    if (i < 0) break;
  }
  return out;
}

}  // namespace mecast::testing
