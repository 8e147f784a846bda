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

#include <cmath>
#include <limits>
#include <random>

#include "fixtures.hpp"
#include "reference_solvers.hpp"
#include "mecast/admm_steps.hpp"
#include "mecast/bandwidth.hpp"
#include "mecast/cccp_admm.hpp"
#include "mecast/sampling.hpp"

namespace mecast {
namespace {

using testing::global_step_by_dual_gradient;
using testing::local_step_by_active_sets;
using testing::project_row_bisect;
using testing::QpPoint;
using testing::random_local;
using testing::random_projection;

// ---------------------------------------------------------------------------
// Local step.

TEST(LocalStep, MatchesActiveSetSolve) {
  std::mt19937_64 rng(2026);
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    const int K = 1 + static_cast<int>(seed % 3);
    const Instance inst = testing::random_instance(seed, K, 3, 3.0);
    const LocalSubproblem p = random_local(rng, inst, K);
    const LocalSolution s = solve_local_subproblem(p);
    const QpPoint ref = local_step_by_active_sets(p);
    ASSERT_TRUE(std::isfinite(ref.value));
    EXPECT_NEAR(s.a, ref.z(0), 1e-6) << "seed " << seed;
    EXPECT_NEAR(s.b, ref.z(1), 1e-6) << "seed " << seed;
    EXPECT_NEAR(s.ao, ref.z(2), 1e-6) << "seed " << seed;
    for (int k = 0; k < K; ++k) {
      EXPECT_NEAR(s.x3[k], ref.z(3 + k), 1e-6);
      EXPECT_NEAR(s.x4[k], ref.z(3 + K + k), 1e-6);
    }
    double constant = 0.0;
    for (int k = 0; k < K; ++k) constant += p.gamma / 2.0 * (p.v3[k] * p.v3[k] + p.v4[k] * p.v4[k]);
    EXPECT_NEAR(local_subproblem_objective(p, s.a, s.b, s.ao, s.x3, s.x4), ref.value + constant,
                1e-9 * std::max(1.0, std::abs(ref.value)));
  }
}

TEST(LocalStep, SingleDeviceCorners) {
  LocalSubproblem p;
  p.d = 0.3;
  p.out_coef = 0.5;
  p.gamma = 2.0;
  p.e = {0.4};
  p.r = {0.9};
  p.o = {1.0};
  p.v3 = {0.0};
  p.v4 = {0.0};
  // Nothing requested on either route: auxiliaries only follow d.
  LocalSolution s = solve_local_subproblem(p);
  EXPECT_NEAR(s.x3[0], 0.0, 1e-12);
  EXPECT_NEAR(s.ao, 0.0, 1e-12);
  EXPECT_NEAR(s.a - s.b, 0.3, 1e-9);
  // Output coefficient pays for ao only while x4 is wanted.
  p.v4 = {0.8};
  s = solve_local_subproblem(p);
  EXPECT_NEAR(s.x4[0], 0.8 - p.out_coef * p.o[0] / p.gamma, 1e-9);
  EXPECT_NEAR(s.ao, s.x4[0] * p.o[0], 1e-9);
}

TEST(BestAuxiliaries, Cases) {
  double a = 0, b = 0;
  best_auxiliaries(0.0, 0.2, 0.3, a, b);
  EXPECT_EQ(a, 0.2);
  EXPECT_EQ(b, 0.3);
  best_auxiliaries(1.0, 0.2, 0.3, a, b);
  EXPECT_DOUBLE_EQ(a, 0.7);
  EXPECT_EQ(b, 0.3);
  best_auxiliaries(-1.0, 0.2, 0.3, a, b);
  EXPECT_EQ(a, 0.2);
  EXPECT_DOUBLE_EQ(b, 0.8);
}

// ---------------------------------------------------------------------------
// Global step.

TEST(GlobalStep, MatchesDualGradientSolve) {
  std::mt19937_64 rng(99);
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    const Instance inst = testing::random_instance(seed, 2, 1 + static_cast<int>(seed % 3), 3.0);
    const ProjectionProblem p = random_projection(rng, inst, static_cast<int>(seed % 2));
    const ProjectionResult r = project_device(p);
    const std::vector<double> ref = global_step_by_dual_gradient(p);
    for (std::size_t i = 0; i < ref.size(); ++i) {
      EXPECT_NEAR(r.x[i], ref[i], 1e-6) << "seed " << seed << " entry " << i;
    }
  }
}

TEST(GlobalStep, SlackBudgetsReduceToRowProjection) {
  ProjectionProblem p;
  p.num_tasks = 2;
  p.target = {0.1, 0.2, 0.3, 0.4, -0.2, 0.5, 0.9, 0.1};
  p.cache_weight = {1, 1, 0, 0, 1, 1, 0, 0};
  p.energy_weight = {0, 1, 1, 0, 0, 1, 1, 0};
  p.cache_budget = 100.0;
  p.energy_budget = 100.0;
  const ProjectionResult r = project_device(p);
  EXPECT_EQ(r.lambda_cache, 0.0);
  EXPECT_EQ(r.lambda_energy, 0.0);
  for (int j = 0; j < 4; ++j) EXPECT_NEAR(r.x[j], p.target[j], 1e-15);
  double row[4];
  project_row(&p.target[4], row);
  for (int j = 0; j < 4; ++j) EXPECT_DOUBLE_EQ(r.x[4 + j], row[j]);
}

TEST(ProjectRow, AgreesWithBisection) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g(0.3, 0.8);
  for (int t = 0; t < 200; ++t) {
    double y[4], a[4], b[4];
    for (double& v : y) v = g(rng);
    project_row(y, a);
    project_row_bisect(y, b);
    double sum = 0.0;
    for (int j = 0; j < 4; ++j) {
      EXPECT_NEAR(a[j], b[j], 1e-12);
      sum += a[j];
    }
    EXPECT_NEAR(sum, 1.0, 1e-12);
  }
}

// ---------------------------------------------------------------------------
// DC reformulation.

ServicePolicy random_feasible_binary(std::mt19937_64& rng, const Instance& inst) {
  const int K = inst.num_devices(), F = inst.num_tasks();
  ServicePolicy x = ServicePolicy::uniform(K, F, Route::kEdgeCompute);
  for (int k = 0; k < K; ++k) {
    for (int f = 0; f < F; ++f) {
      x.assign(k, f, kAllRoutes[rng() % kNumRoutes]);
      if (!within_budget(cache_usage(inst, x, k), inst.device(k).cache_bits) ||
          !within_budget(energy_usage(inst, x, k), inst.device(k).avg_energy)) {
        x.assign(k, f, Route::kEdgeCompute);
      }
    }
  }
  return x;
}

ServicePolicy random_relaxed(std::mt19937_64& rng, int K, int F) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  ServicePolicy x(K, F);
  for (int k = 0; k < K; ++k) {
    for (int f = 0; f < F; ++f) {
      double s = 0.0;
      for (int j = 0; j < kNumRoutes; ++j) s += (x.at(k, f, j) = u(rng));
      for (int j = 0; j < kNumRoutes; ++j) x.at(k, f, j) /= s;
    }
  }
  return x;
}

TEST(DcObjective, EqualsSaaOnBinaryPolicies) {
  std::mt19937_64 rng(8);
  for (std::uint64_t seed = 1; seed <= 25; ++seed) {
    const Instance inst = testing::random_instance(seed, 3, 4, 3.0);
    const SampleBatch batch = draw_samples(inst, 30, seed);
    const RateTable rates(inst);
    const DcScaling sc(inst, rates);
    const ServicePolicy x = random_feasible_binary(rng, inst);
    const DcState st = definition_consistent_state(inst, rates, sc, batch, x);
    const double saa = saa_objective(inst, x, batch);
    EXPECT_NEAR(dc_objective(inst, sc, st), saa, 1e-12 * saa) << "seed " << seed;
    EXPECT_EQ(penalized_objective(inst, sc, st, 1e6), dc_objective(inst, sc, st));
  }
}

TEST(DcObjective, EdgeComputeOnHandInstance) {
  const Instance inst = testing::hand_instance();
  const SampleBatch batch = SampleBatch::from_samples(2, {{{0, 0}}, {{1, 0}}});
  const RateTable rates(inst);
  const DcScaling sc(inst, rates);
  const auto x = ServicePolicy::uniform(2, 2, Route::kEdgeCompute);
  const DcState st = definition_consistent_state(inst, rates, sc, batch, x);
  EXPECT_NEAR(dc_objective(inst, sc, st), saa_objective(inst, x, batch), 1e-12 * 3e6);
  for (double v : st.a_in) EXPECT_EQ(v, 0.0);
}

TEST(DcObjective, ProductIdentityAndOutputOnly) {
  const Instance inst = testing::random_instance(3, 2, 2, 3.0);
  const RateTable rates(inst);
  const DcScaling sc(inst, rates);
  DcState st;
  st.num_samples = 1;
  st.num_tasks = 2;
  st.a_in = {0.3, 0.0};
  st.b_in = {0.3, 0.0};
  st.a_out = {0.0, 0.0};
  st.x = ServicePolicy::uniform(2, 2, Route::kEdgeCompute);
  EXPECT_NEAR(dc_objective(inst, sc, st), 0.09 * sc.unit, 1e-12 * sc.unit);
  st.a_in = {0.0, 0.0};
  st.b_in = {0.0, 0.0};
  st.a_out = {0.5, 0.25};
  const double out = (0.5 * sc.out_coef[0] + 0.25 * sc.out_coef[1]) * sc.unit;
  EXPECT_NEAR(dc_objective(inst, sc, st), out, 1e-12 * out);
}

TEST(PenalizedObjective, HalfEverywhere) {
  const Instance inst = testing::random_instance(4, 2, 3, 3.0);
  const SampleBatch batch = draw_samples(inst, 5, 4);
  const RateTable rates(inst);
  const DcScaling sc(inst, rates);
  ServicePolicy x(2, 3);
  for (auto& v : x.values()) v = 0.5;
  const DcState st = definition_consistent_state(inst, rates, sc, batch, x);
  const double rho = 1e4;
  EXPECT_NEAR(penalized_objective(inst, sc, st, rho) - dc_objective(inst, sc, st),
              rho * 2 * 3 * 4 * 0.25, 1e-6);
}

TEST(Surrogate, TouchesAtAnchorAndMajorizes) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const Instance inst = testing::random_instance(seed, 3, 3, 3.0);
    const SampleBatch batch = draw_samples(inst, 20, seed);
    const RateTable rates(inst);
    const DcScaling sc(inst, rates);
    const double rho = 1e4 * (1 + seed);
    const DcState anchor =
        definition_consistent_state(inst, rates, sc, batch, random_relaxed(rng, 3, 3));
    const double c = linearization_constant(sc, anchor, rho);
    EXPECT_NEAR(cccp_subproblem_objective(inst, sc, anchor, anchor, rho) + c,
                penalized_objective(inst, sc, anchor, rho),
                1e-9 * std::abs(penalized_objective(inst, sc, anchor, rho)));
    for (int t = 0; t < 20; ++t) {
      DcState other = anchor;
      for (auto* vec : {&other.a_in, &other.b_in, &other.a_out}) {
        for (double& v : *vec) v = u(rng);
      }
      other.x = random_relaxed(rng, 3, 3);
      const double pen = penalized_objective(inst, sc, other, rho);
      EXPECT_GE(cccp_subproblem_objective(inst, sc, other, anchor, rho) + c,
                pen - 1e-9 * std::abs(pen));
    }
  }
}

// ---------------------------------------------------------------------------
// ADMM bookkeeping.

TEST(AdmmSteps, DualsUnchangedAtConsensus) {
  const Instance inst = testing::random_instance(2, 2, 2, 3.0);
  const SampleBatch batch = draw_samples(inst, 8, 2);
  const SolverContext ctx(inst, batch);
  AdmmState st = make_admm_state(ctx, ServicePolicy::uniform(2, 2, Route::kEdgeCompute), 1.0, 1e4);
  EXPECT_EQ(consensus_residual(st), 0.0);
  const auto before = st.duals;
  admm_update_duals(st);
  EXPECT_EQ(st.duals, before);
}

TEST(AdmmSteps, GlobalStepAtConsensusIsProjection) {
  std::mt19937_64 rng(3);
  const Instance inst = testing::random_instance(6, 2, 2, 3.0);
  const SampleBatch batch = draw_samples(inst, 8, 6);
  const SolverContext ctx(inst, batch);
  AdmmState st = make_admm_state(ctx, ServicePolicy::uniform(2, 2, Route::kEdgeCompute), 1.0, 1e4);
  const ServicePolicy common = random_relaxed(rng, 2, 2);
  const auto cv = common.values();
  for (std::size_t n = 0; n < st.num_samples; ++n) {
    std::copy(cv.begin(), cv.end(), st.locals.begin() + n * st.block());
  }
  std::fill(st.duals.begin(), st.duals.end(), 0.0);
  admm_update_global_x(ctx, st);
  for (int k = 0; k < 2; ++k) {
    ProjectionProblem p = random_projection(rng, inst, k);
    for (int f = 0; f < 2; ++f) {
      for (int j = 0; j < kNumRoutes; ++j) p.target[f * kNumRoutes + j] = common(k, f, j);
    }
    const std::vector<double> ref = global_step_by_dual_gradient(p);
    for (int f = 0; f < 2; ++f) {
      for (int j = 0; j < kNumRoutes; ++j) EXPECT_NEAR(st.x(k, f, j), ref[f * kNumRoutes + j], 1e-6);
    }
  }
}

TEST(AdmmSteps, ResidualShrinksOnFixture) {
  const Instance inst = testing::random_instance(1, 2, 2, 3.0);
  const SampleBatch batch = draw_samples(inst, 16, 1);
  const SolverContext ctx(inst, batch);
  AdmmState st = make_admm_state(ctx, ServicePolicy::uniform(2, 2, Route::kEdgeCompute), 1.0, 1e6);
  double first = -1.0, last = 0.0;
  for (int q = 0; q < 400; ++q) {
    admm_update_locals(ctx, st);
    admm_update_global_x(ctx, st);
    admm_update_duals(st);
    last = consensus_residual(st);
    if (q == 0) first = last;
  }
  EXPECT_LE(last, first);
  EXPECT_LT(last, 1e-3);
}

}  // namespace
}  // namespace mecast
