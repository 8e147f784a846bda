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

// Experiment plans: a base instance, a solver set and a one-dimensional sweep.
//
// Plan files are INI:
//
//   [plan]
//   instance = reference | <path to instance ini>
//   deadline = 0.0025            ; reference instance only
//   cache_fraction = 0.175       ; reference instance only
//   solvers = cccp_admm, greedy_cache_compute, greedy_cache, mec
//   sweep = cache_fraction       ; cache_fraction | f1 | K | beta_c | beta_e
//   values = 0.05, 0.1, 0.175
//   samples = 200
//   seed = 1
//   exact = auto                 ; auto | yes | no
//
//   [solver]
//   delta, residual_tol, max_outer, max_inner, rho_initial,
//   rho_multiplier, rho_cap, gamma, rounding_threshold, adapt_gamma, polish

#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mecast/cccp_admm.hpp"
#include "mecast/config.hpp"
#include "mecast/symmetric.hpp"

namespace mecast {

enum class SolverKind { kOracle, kCccpAdmm, kGreedyCache, kGreedyCacheCompute, kMec, kAlphaLe1Greedy };

std::string solver_name(SolverKind s);
SolverKind parse_solver(const std::string& name);

enum class SweepVariable { kNone, kCacheFraction, kCpuFreq, kDevices, kBetaC, kBetaE };

std::string sweep_name(SweepVariable v);
SweepVariable parse_sweep(const std::string& name);

enum class ExactMode { kAuto, kAlways, kNever };

struct ExperimentPlan {
  InstanceRecipe recipe;
  std::string instance_source = "reference";
  std::vector<SolverKind> solvers;
  SweepVariable sweep = SweepVariable::kNone;
  std::vector<double> values;
  std::size_t num_samples = 200;
  std::uint64_t seed = 1;
  ExactMode exact = ExactMode::kAuto;
  SolverConfig solver;
  std::string output;
};

// Throws mecast::Error on unknown keys or values. Paths inside the plan are
// resolved relative to base_dir.
ExperimentPlan parse_plan_ini(std::istream& in, const std::string& base_dir = ".");
ExperimentPlan load_plan(const std::string& path);
void validate_plan(const ExperimentPlan& plan);

// Reads [solver] keys into config; unknown keys throw.
void apply_solver_keys(const std::map<std::string, std::string>& keys, SolverConfig& config);

// Recipe with the sweep variable set to value.
InstanceRecipe recipe_at(const ExperimentPlan& plan, double value);

struct ExperimentRow {
  std::string sweep;
  double value = 0.0;
  SolverKind solver = SolverKind::kMec;
  int num_devices = 0;
  int num_tasks = 0;
  std::size_t num_samples = 0;
  std::uint64_t seed = 0;
  double saa_bandwidth = 0.0;               // Hz
  std::optional<double> exact_bandwidth;    // Hz
  double reduction_vs_mec = 0.0;            // percent
  bool feasible = false;
  int iterations = 0;
  std::string status;
  std::string policy;
  double wall_seconds = 0.0;  // manifest only
};

struct ExperimentResult {
  std::vector<ExperimentRow> rows;  // plan order: sweep point, then solver
  double wall_seconds = 0.0;
  int worker_threads = 1;
  std::string kernel_backend;
};

// Deterministic given the plan. Points and solvers run on the worker pool.
ExperimentResult run_plan(const ExperimentPlan& plan);

// Wall times are left out so that reruns are byte-identical.
void write_experiment_csv(std::ostream& out, const ExperimentResult& result);
void write_manifest_json(std::ostream& out, const ExperimentPlan& plan,
                         const ExperimentResult& result, const std::string& command);
// gnuplot script plotting saa_bandwidth_hz against the sweep value per solver.
void write_plot_script(std::ostream& out, const std::string& csv_path,
                       const std::string& sweep_label);

enum class SymmetricSweep { kBetaC, kBetaE, kCpuFreq, kDevices, kAlpha };

SymmetricSweep parse_symmetric_sweep(const std::string& name);
std::string symmetric_sweep_name(SymmetricSweep s);

struct SymmetricPlan {
  SymmetricInstance base;
  SymmetricSweep sweep = SymmetricSweep::kBetaC;
  std::vector<double> values;
  std::size_t mc_samples = 0;  // 0 skips the Monte-Carlo columns
  std::uint64_t seed = 1;
};

struct SymmetricRow {
  SymmetricGridPoint point;
  int num_tasks = 0;
  int num_devices = 0;
  RouteCounts counts;
  double lp_ratio = 0.0;
  std::optional<double> mc_ratio_unicast;
};

// beta_c and beta_e sweeps rescale C and E; f1 sweeps keep C and E fixed.
std::vector<SymmetricRow> symmetric_report(const SymmetricPlan& plan);
void write_symmetric_report_csv(std::ostream& out, const std::vector<SymmetricRow>& rows);

}  // namespace mecast
