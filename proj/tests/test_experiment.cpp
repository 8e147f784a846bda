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


#include <gtest/gtest.h>

#include <sstream>

#include "mecast/config.hpp"
#include "mecast/csv.hpp"
#include "mecast/errors.hpp"
#include "mecast/experiment.hpp"
#include "mecast/parallel.hpp"

namespace mecast {
namespace {

InstanceRecipe tiny_recipe() {
  InstanceRecipe r;
  r.system.deadline = 0.03;
  r.system.energy_coeff = 1e-27;
  r.tasks.input_bits = {2e6, 3e6};
  r.tasks.alpha = 3.0;
  r.tasks.compute_load = {10.0};
  r.devices.count = 2;
  r.devices.cache_bits = {4e6};
  r.devices.avg_energy = {0.05};
  r.devices.cpu_freq = {2e9};
  r.devices.inv_spectral_eff = {0.2, 0.4};
  r.devices.popularity = "zipf";
  r.devices.zipf_gamma = 0.8;
  return r;
}

ExperimentPlan tiny_plan() {
  ExperimentPlan plan;
  plan.recipe = tiny_recipe();
  plan.instance_source = "tiny";
  plan.solvers = {SolverKind::kOracle, SolverKind::kCccpAdmm, SolverKind::kGreedyCacheCompute,
                  SolverKind::kGreedyCache, SolverKind::kMec};
  plan.sweep = SweepVariable::kNone;
  plan.values = {0.0};
  plan.num_samples = 16;
  plan.seed = 3;
  return plan;
}

std::string csv_of(const ExperimentResult& r) {
  std::ostringstream os;
  write_experiment_csv(os, r);
  return os.str();
}

TEST(SolverNames, RoundTrip) {
  for (auto s : {SolverKind::kOracle, SolverKind::kCccpAdmm, SolverKind::kGreedyCache,
                 SolverKind::kGreedyCacheCompute, SolverKind::kMec, SolverKind::kAlphaLe1Greedy}) {
    EXPECT_EQ(parse_solver(solver_name(s)), s);
  }
  EXPECT_THROW(parse_solver("simplex"), Error);
  EXPECT_EQ(parse_sweep("cache_fraction"), SweepVariable::kCacheFraction);
  EXPECT_THROW(parse_sweep("tau"), Error);
}

TEST(PlanIni, ParsesReferencePlan) {
  std::istringstream in(
      "[plan]\n"
      "instance = reference\n"
      "deadline = 0.0015\n"
      "solvers = cccp_admm, greedy_cache_compute, greedy_cache, mec\n"
      "sweep = cache_fraction\n"
      "values = 0.05, 0.1, 0.175\n"
      "samples = 50\n"
      "seed = 4\n"
      "[solver]\n"
      "max_outer = 7\n"
      "polish = 0\n");
  const ExperimentPlan plan = parse_plan_ini(in);
  EXPECT_EQ(plan.solvers.size(), 4u);
  EXPECT_EQ(plan.values, (std::vector<double>{0.05, 0.1, 0.175}));
  EXPECT_EQ(plan.num_samples, 50u);
  EXPECT_EQ(plan.seed, 4u);
  EXPECT_EQ(plan.solver.max_outer, 7);
  EXPECT_FALSE(plan.solver.polish);
  EXPECT_DOUBLE_EQ(plan.recipe.system.deadline, 0.0015);
  const Instance inst = build_instance(recipe_at(plan, 0.1));
  EXPECT_NEAR(inst.device(0).cache_bits, 0.1 * inst.catalog.total_input_bits(), 1e-6);
}

TEST(PlanIni, RejectsUnknownKeys) {
  std::istringstream a("[plan]\nsolvers = mec\nvalues = 1\ncolour = red\n");
  EXPECT_THROW(parse_plan_ini(a), Error);
  std::istringstream b("[plan]\nsolvers = mec\n[solver]\nrho = 3\n");
  EXPECT_THROW(parse_plan_ini(b), Error);
  std::istringstream c("[extras]\nx = 1\n");
  EXPECT_THROW(parse_plan_ini(c), Error);
}

TEST(RecipeAt, SweepsEachVariable) {
  ExperimentPlan plan;
  plan.recipe = reference_recipe(1.5e-3, 0.175);
  plan.sweep = SweepVariable::kDevices;
  EXPECT_EQ(build_instance(recipe_at(plan, 6)).num_devices(), 6);
  plan.sweep = SweepVariable::kCpuFreq;
  EXPECT_EQ(build_instance(recipe_at(plan, 2e11)).device(2).cpu_freq, 2e11);
  plan.sweep = SweepVariable::kBetaC;
  const Instance c = build_instance(recipe_at(plan, 0.1));
  EXPECT_NEAR(c.device(0).cache_bits, 0.1 * c.catalog.total_output_bits(), 1e-3);
}

TEST(RunPlan, SinglePointOracleLowest) {
  const ExperimentResult r = run_plan(tiny_plan());
  ASSERT_EQ(r.rows.size(), 5u);
  const double oracle = r.rows[0].saa_bandwidth;
  EXPECT_EQ(r.rows[0].solver, SolverKind::kOracle);
  for (const auto& row : r.rows) {
    EXPECT_GE(row.saa_bandwidth, oracle * (1 - 1e-12)) << solver_name(row.solver);
    EXPECT_TRUE(row.feasible);
    EXPECT_TRUE(row.exact_bandwidth.has_value());
  }
  EXPECT_EQ(r.rows[4].solver, SolverKind::kMec);
  EXPECT_EQ(r.rows[4].reduction_vs_mec, 0.0);
}

TEST(RunPlan, CsvIdenticalAcrossThreadCounts) {
  ExperimentPlan plan = tiny_plan();
  plan.sweep = SweepVariable::kCpuFreq;
  plan.values = {2e9, 4e9};
  std::string one, eight;
  {
    ScopedWorkerThreads t(1);
    one = csv_of(run_plan(plan));
  }
  {
    ScopedWorkerThreads t(8);
    eight = csv_of(run_plan(plan));
  }
  EXPECT_EQ(one, eight);
  std::istringstream in(one);
  const csv::Table table = csv::read(in);
  EXPECT_EQ(table.kind, "experiment");
  EXPECT_EQ(table.rows.size(), 10u);
  EXPECT_NO_THROW(table.column("reduction_vs_mec_pct"));
}

TEST(RunPlan, BandwidthRisesWithDevices) {
  ExperimentPlan plan;
  plan.recipe = tiny_recipe();
  plan.recipe.devices.inv_spectral_eff = {0.3};
  plan.solvers = {SolverKind::kGreedyCacheCompute, SolverKind::kMec};
  plan.sweep = SweepVariable::kDevices;
  plan.values = {1, 2, 4, 8};
  plan.num_samples = 400;
  const ExperimentResult r = run_plan(plan);
  for (std::size_t i = 2; i < r.rows.size(); ++i) {
    EXPECT_GE(r.rows[i].saa_bandwidth, r.rows[i - 2].saa_bandwidth);
  }
}

TEST(Manifest, MentionsPlanAndVersion) {
  const ExperimentPlan plan = tiny_plan();
  const ExperimentResult r = run_plan(plan);
  std::ostringstream os;
  write_manifest_json(os, plan, r, "mecast sweep tiny.ini");
  const std::string text = os.str();
  EXPECT_NE(text.find("\"version\""), std::string::npos);
  EXPECT_NE(text.find("wall_seconds"), std::string::npos);
  EXPECT_NE(text.find("mecast sweep tiny.ini"), std::string::npos);
}

TEST(PlotScript, ReferencesCsv) {
  std::ostringstream os;
  write_plot_script(os, "out.csv", "cache fraction");
  EXPECT_NE(os.str().find("out.csv"), std::string::npos);
}

TEST(SymmetricReport, BetaCSweepLowersRatio) {
  SymmetricPlan plan;
  plan.base = SymmetricInstance::from_betas(10, 4, 1e7, 10.0, 3.0, 0.1, 0.3, 1.1e11, 1e-27, 0.02, 0.1);
  plan.sweep = SymmetricSweep::kBetaC;
  plan.values = {0.0, 0.05, 0.1, 0.2, 0.3};
  const auto rows = symmetric_report(plan);
  ASSERT_EQ(rows.size(), 5u);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    EXPECT_LE(rows[i].point.ratio_mec, rows[i - 1].point.ratio_mec);
    EXPECT_NEAR(rows[i].lp_ratio, rows[i].point.ratio_mec, 1e-9);
  }
  std::ostringstream os;
  write_symmetric_report_csv(os, rows);
  EXPECT_NE(os.str().find("symmetric-report"), std::string::npos);
}

TEST(SymmetricReport, KSweepImprovesMulticastGain) {
  SymmetricPlan plan;
  plan.base = SymmetricInstance::from_betas(10, 2, 1e7, 10.0, 3.0, 0.1, 0.3, 1.1e11, 1e-27, 0.02, 0.1);
  plan.sweep = SymmetricSweep::kDevices;
  plan.values = {1, 2, 4, 8, 16};
  const auto rows = symmetric_report(plan);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    EXPECT_LT(rows[i].point.ratio_unicast, rows[i - 1].point.ratio_unicast);
  }
}

TEST(SymmetricReport, FrequencySweepRisesThenFalls) {
  // Limited energy: more frequency lets route 3 in, then energy per task
  // grows and the gain fades.
  SymmetricPlan plan;
  plan.base = SymmetricInstance::from_betas(10, 4, 1e7, 10.0, 3.0, 0.05, 0.5, 1e10, 1e-27, 0.02, 0.1);
  plan.sweep = SymmetricSweep::kCpuFreq;
  plan.values = {6e9, 8e9, 1e10, 1.5e10, 2e10, 4e10, 8e10, 1.6e11};
  const auto rows = symmetric_report(plan);
  double best = 2.0;
  std::size_t arg = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].point.ratio_mec < best) {
      best = rows[i].point.ratio_mec;
      arg = i;
    }
  }
  EXPECT_GT(arg, 0u);
  EXPECT_LT(arg, rows.size() - 1);
}

}  // namespace
}  // namespace mecast
