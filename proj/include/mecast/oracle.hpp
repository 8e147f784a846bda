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

// Exhaustive ground truth for small instances.
//
// Budgets are per device and the objective is a sum of per-task terms, each
// depending only on that task's route column across devices. The search
// therefore enumerates budget-feasible route vectors per device, combines
// them with an odometer, and prices each combination from per-task tables
// indexed by the route column.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "mecast/bandwidth.hpp"
#include "mecast/instance.hpp"

namespace mecast {

struct Objective {
  enum class Kind { kExact, kSaa };
  Kind kind = Kind::kExact;
  const SampleBatch* samples = nullptr;  // kSaa only; not owned

  static Objective exact() { return {}; }
  static Objective saa(const SampleBatch& s) { return {Kind::kSaa, &s}; }
  const char* name() const { return kind == Kind::kExact ? "exact" : "saa"; }
};

// Objective value of a policy under the chosen objective.
double evaluate(const Instance& instance, const ServicePolicy& policy, const Objective& objective);

struct OracleResult {
  ServicePolicy best_policy;
  double best_value = 0.0;
  std::uint64_t policies_examined = 0;
};

inline constexpr std::uint64_t kDefaultSearchCap = std::uint64_t{1} << 26;

// Globally minimal feasible binary policy. Among policies whose values agree
// to a relative 1e-12, the lexicographically smallest encoding wins. Throws
// CapExceededError when the number of combined per-device assignments
// exceeds search_cap.
OracleResult enumerate_optimal(const Instance& instance, const Objective& objective,
                               std::uint64_t search_cap = kDefaultSearchCap);

struct KnapsackItem {
  int task = 0;
  Route route = Route::kEdgeCompute;
  double value = 0.0;          // bandwidth saved against route 4, Hz
  double cache_weight = 0.0;   // bits
  double energy_weight = 0.0;  // J
};

// Four items per task, in task then route order.
std::vector<KnapsackItem> single_user_knapsack_items(const Instance& instance, int k);

struct KnapsackSolution {
  std::vector<Route> routes;  // one per task
  double profit = 0.0;
  std::uint64_t states_examined = 0;

  ServicePolicy policy() const;
};

// Exact maximum-profit choice of one item per task under both budgets, by a
// Pareto-front sweep over (cache, energy, profit). Ties keep the
// lexicographically smallest route vector. Throws std::invalid_argument for
// negative budgets.
KnapsackSolution solve_single_user(const std::vector<KnapsackItem>& items, double cache_budget,
                                   double energy_budget);

// FNV-1a over every numeric field of the instance.
std::uint64_t instance_hash(const Instance& instance);

struct OracleFixture {
  std::uint64_t instance_hash = 0;
  std::string objective;
  double best_value = 0.0;
  std::string policy;
};

void write_fixtures(std::ostream& out, const std::vector<OracleFixture>& fixtures);
std::vector<OracleFixture> read_fixtures(std::istream& in);

}  // namespace mecast
