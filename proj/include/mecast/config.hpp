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

// Instance recipes and their INI form.
//
//   [system]   deadline, energy_coeff
//   [tasks]    either input_bits (list) with compute_load and output_bits or
//              alpha, or count/input_min/input_max/alpha/compute_load/seed
//   [devices]  count, cache_bits | cache_fraction, avg_energy, cpu_freq,
//              inv_spectral_eff | inv_spectral_eff_step,
//              popularity = uniform | zipf | explicit, zipf_gamma,
//              demand_0 .. demand_{K-1}
//
// Per-device keys take one value (broadcast) or K comma separated values.
// cache_fraction sets C_k = fraction * sum_f I_f. inv_spectral_eff_step sets
// s_k = step * (k + 1).

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "mecast/instance.hpp"

namespace mecast {

struct TaskRecipe {
  // Explicit catalog when non-empty.
  std::vector<double> input_bits;
  std::vector<double> output_bits;  // empty: alpha * input_bits
  // Generated catalog: I_f uniform in [input_min, input_max].
  int count = 0;
  double input_min = 0.0;
  double input_max = 0.0;
  std::uint64_t seed = 1;
  // Shared.
  std::vector<double> compute_load{10.0};
  std::optional<double> alpha;
};

struct DeviceRecipe {
  int count = 1;
  std::vector<double> cache_bits{0.0};
  std::optional<double> cache_fraction;
  std::vector<double> avg_energy{0.0};
  std::vector<double> cpu_freq{1e9};
  std::vector<double> inv_spectral_eff{1.0};
  std::optional<double> inv_spectral_eff_step;
  std::string popularity = "uniform";
  double zipf_gamma = 1.0;
  std::vector<std::vector<double>> demand;  // explicit rows
};

struct InstanceRecipe {
  SystemParams system;
  TaskRecipe tasks;
  DeviceRecipe devices;
};

// Throws mecast::Error on inconsistent recipes. The result is not
// validated; call validate_instance.
Instance build_instance(const InstanceRecipe& recipe);

InstanceRecipe parse_instance_ini(std::istream& in);
InstanceRecipe load_instance_recipe(const std::string& path);
void write_instance_ini(std::ostream& out, const InstanceRecipe& recipe);

// Heterogeneous reference scenario: F = 50, K = 4, I_f uniform in
// [10, 15] Mbit, alpha = 3, w = 10, mu = 1e-27, f_k = 1.1e11, E_k = 1.7e3,
// s_k = 0.1 (k + 1), Zipf(1) demand. Deadline and cache fraction are
// parameters.
InstanceRecipe reference_recipe(double deadline, double cache_fraction);

// Comma or whitespace separated doubles.
std::vector<double> parse_list(const std::string& text);

}  // namespace mecast
