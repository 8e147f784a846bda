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

#include "fixtures.hpp"
#include "mecast/bandwidth.hpp"
#include "mecast/config.hpp"
#include "mecast/errors.hpp"
#include "mecast/heuristics.hpp"
#include "mecast/oracle.hpp"
#include "mecast/sampling.hpp"

namespace mecast {
namespace {

Instance toy_single_user(double cache_bits, double avg_energy) {
  Instance inst;
  inst.catalog.alpha = 1.0;
  inst.catalog.tasks = {{4.0, 1.0, 4.0}, {4.0, 1.0, 4.0}};
  inst.params.deadline = 1.0;
  inst.params.energy_coeff = 1e-27;
  DeviceSpec d;
  d.cache_bits = cache_bits;
  d.avg_energy = avg_energy;
  d.cpu_freq = 100.0;
  d.demand = {0.8, 0.2};
  inst.devices = {d};
  return inst;
}

TEST(MecPolicy, EdgeComputeEverywhere) {
  const Instance inst = testing::random_instance(1, 3, 4, 3.0);
  const ServicePolicy x = mec_computing_policy(inst);
  EXPECT_EQ(x, ServicePolicy::uniform(3, 4, Route::kEdgeCompute));
  for (int k = 0; k < 3; ++k) {
    EXPECT_EQ(cache_usage(inst, x, k), 0.0);
    EXPECT_EQ(energy_usage(inst, x, k), 0.0);
  }
}

TEST(GreedyCaching, ToyCachesPopularTask) {
  GreedyTrace trace;
  const ServicePolicy x = greedy_caching_policy(toy_single_user(4.0, 0.0), &trace);
  EXPECT_EQ(x.encode(), "14");
  ASSERT_EQ(trace.steps.size(), 1u);
  EXPECT_EQ(trace.steps[0].task, 0);
  EXPECT_DOUBLE_EQ(trace.steps[0].cumulative_cache, 4.0);
}

TEST(GreedyCaching, BudgetExtremes) {
  Instance inst = testing::random_instance(4, 2, 5, 3.0);
  for (auto& d : inst.devices) d.cache_bits = 0.0;
  EXPECT_EQ(greedy_caching_policy(inst), mec_computing_policy(inst));
  for (auto& d : inst.devices) d.cache_bits = inst.catalog.total_output_bits();
  EXPECT_EQ(greedy_caching_policy(inst), ServicePolicy::uniform(2, 5, Route::kOutputCache));
}

TEST(GreedyCachingComputing, NoEnergyFallsBackToCaching) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    Instance inst = testing::random_instance(seed, 2, 5, 3.0);
    for (auto& d : inst.devices) d.avg_energy = 0.0;
    EXPECT_EQ(greedy_caching_computing_policy(inst), greedy_caching_policy(inst));
  }
}

TEST(GreedyCachingComputing, NoLocalComputeWhenOutputIsSmall) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    Instance inst = testing::random_instance(seed, 2, 5, 0.7);
    for (auto& d : inst.devices) d.cache_bits = 0.0;
    const ServicePolicy x = greedy_caching_computing_policy(inst);
    for (int k = 0; k < 2; ++k) {
      for (int f = 0; f < 5; ++f) EXPECT_NE(x.route(k, f), Route::kLocalCompute);
    }
  }
}

TEST(Heuristics, AlwaysFeasible) {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    const Instance inst = testing::random_instance(seed, 3, 6, seed % 2 ? 3.0 : 0.8);
    EXPECT_TRUE(is_feasible(inst, mec_computing_policy(inst)).ok);
    EXPECT_TRUE(is_feasible(inst, greedy_caching_policy(inst)).ok);
    EXPECT_TRUE(is_feasible(inst, greedy_caching_computing_policy(inst)).ok);
  }
}

TEST(Heuristics, ReferenceOrderingAtThirtyPercentCache) {
  const Instance inst = build_instance(reference_recipe(1.5e-3, 0.3));
  const SampleBatch batch = draw_samples(inst, 200, 1);
  const double mec = saa_objective(inst, mec_computing_policy(inst), batch);
  const double gc = saa_objective(inst, greedy_caching_policy(inst), batch);
  const double gcc = saa_objective(inst, greedy_caching_computing_policy(inst), batch);
  EXPECT_LE(gcc, gc);
  EXPECT_LE(gc, mec);
}

TEST(GreedyTrace, CsvHeader) {
  GreedyTrace trace;
  greedy_caching_computing_policy(testing::random_instance(2, 2, 4, 3.0), &trace);
  std::ostringstream os;
  write_trace_csv(os, trace);
  EXPECT_NE(os.str().find("device"), std::string::npos);
}

Instance alpha_le1_instance(std::uint64_t seed, int K, int F) {
  Instance inst = testing::random_instance(seed, K, F, 0.8);
  return inst;
}

TEST(AlphaLe1Greedy, RejectsAlphaAboveOne) {
  const Instance inst = testing::random_instance(1, 2, 2, 3.0);
  const SampleBatch batch = draw_samples(inst, 10, 1);
  EXPECT_THROW(alpha_le1_greedy(inst, batch), Error);
}

TEST(AlphaLe1Greedy, ZeroCacheIsMec) {
  Instance inst = alpha_le1_instance(2, 2, 3);
  for (auto& d : inst.devices) d.cache_bits = 0.0;
  const SampleBatch batch = draw_samples(inst, 10, 1);
  EXPECT_EQ(alpha_le1_greedy(inst, batch), mec_computing_policy(inst));
}

TEST(AlphaLe1Greedy, SingleSampleSingleDevice) {
  // One request, one device: caching the requested output removes the whole
  // bandwidth, nothing else matters.
  Instance inst = alpha_le1_instance(3, 1, 3);
  inst.devices[0].cache_bits = inst.task(1).output_bits;
  const SampleBatch batch = SampleBatch::from_samples(1, {{{1}}});
  const ServicePolicy x = alpha_le1_greedy(inst, batch);
  EXPECT_EQ(x.encode(), "414");
  EXPECT_EQ(saa_objective(inst, x, batch), 0.0);
}

TEST(AlphaLe1Greedy, NeverBeatsOracle) {
  for (std::uint64_t seed = 1; seed <= 15; ++seed) {
    const Instance inst = alpha_le1_instance(seed, 2, 2);
    const SampleBatch batch = draw_samples(inst, 12, seed);
    const ServicePolicy g = alpha_le1_greedy(inst, batch);
    EXPECT_TRUE(is_feasible(inst, g).ok);
    const double greedy = saa_objective(inst, g, batch);
    const double best = enumerate_optimal(inst, Objective::saa(batch)).best_value;
    EXPECT_GE(greedy, best * (1.0 - 1e-12));
  }
}

TEST(OutputCachingObjective, MatchesSaaOnRoutesOneAndFour) {
  const Instance inst = alpha_le1_instance(5, 3, 4);
  const SampleBatch batch = draw_samples(inst, 40, 5);
  std::vector<std::uint8_t> cached(12, 0);
  std::vector<Route> routes(12, Route::kEdgeCompute);
  for (int i : {0, 5, 7, 10}) {
    cached[i] = 1;
    routes[i] = Route::kOutputCache;
  }
  const ServicePolicy x = ServicePolicy::from_routes(3, 4, routes);
  EXPECT_NEAR(output_caching_objective(inst, batch, cached), saa_objective(inst, x, batch),
              1e-12 * saa_objective(inst, x, batch));
}

TEST(Submodularity, HoldsOnRandomInstances) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const Instance inst = alpha_le1_instance(seed, 3, 4);
    const SampleBatch batch = draw_samples(inst, 30, seed);
    const auto report = submodularity_check(inst, batch, 500, seed);
    EXPECT_TRUE(report.passed()) << (report.counterexamples.empty() ? "" : report.counterexamples[0]);
    EXPECT_EQ(report.trials, 500u);
    EXPECT_EQ(report.full_set_value, 0.0);
  }
}

}  // namespace
}  // namespace mecast
