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
#include "mecast/errors.hpp"
#include "mecast/parallel.hpp"
#include "mecast/sampling.hpp"

namespace mecast {
namespace {

TEST(Zipf, HandValues) {
  const auto p = zipf_popularity(2, 1.0);
  ASSERT_EQ(p.size(), 2u);
  EXPECT_NEAR(p[0], 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(p[1], 1.0 / 3.0, 1e-15);
  for (double q : zipf_popularity(7, 0.0)) EXPECT_NEAR(q, 1.0 / 7.0, 1e-15);
  EXPECT_EQ(zipf_popularity(1, 0.8), std::vector<double>{1.0});
  EXPECT_THROW(zipf_popularity(0, 1.0), std::invalid_argument);
  EXPECT_THROW(zipf_popularity(3, -1.0), std::invalid_argument);
}

TEST(Popularity, ExplicitRowsValidated) {
  EXPECT_THROW(PopularityProfile::explicit_rows({{0.5, 0.4}}), std::invalid_argument);
  Instance inst = testing::hand_instance();
  PopularityProfile::explicit_rows({{0.9, 0.1}, {0.2, 0.8}}).apply(inst);
  EXPECT_EQ(inst.device(1).demand, (std::vector<double>{0.2, 0.8}));
  PopularityProfile::zipf(2, 2, 1.0).apply(inst);
  EXPECT_NEAR(inst.device(0).demand[0], 2.0 / 3.0, 1e-15);
}

TEST(CounterUniform, RangeAndPurity) {
  for (std::uint64_t i = 0; i < 1000; ++i) {
    const double u = counter_uniform(5, 2, i);
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
    EXPECT_EQ(u, counter_uniform(5, 2, i));
  }
  EXPECT_NE(counter_uniform(5, 2, 0), counter_uniform(6, 2, 0));
  EXPECT_NE(counter_uniform(5, 2, 0), counter_uniform(5, 3, 0));
}

TEST(DrawSamples, PointMass) {
  Instance inst = testing::random_instance(2, 3, 4, 3.0);
  for (auto& d : inst.devices) d.demand = {0.0, 0.0, 1.0, 0.0};
  const SampleBatch b = draw_samples(inst, 100, 9);
  for (std::size_t n = 0; n < b.size(); ++n) {
    for (int k = 0; k < 3; ++k) EXPECT_EQ(b.task(k, n), 2);
  }
}

TEST(DrawSamples, SameSeedSameBatchAnyThreadCount) {
  const Instance inst = testing::random_instance(4, 4, 6, 3.0);
  SampleBatch a, b;
  {
    ScopedWorkerThreads one(1);
    a = draw_samples(inst, 1000, 42);
  }
  {
    ScopedWorkerThreads eight(8);
    b = draw_samples(inst, 1000, 42);
  }
  EXPECT_EQ(a, b);
  EXPECT_NE(a, draw_samples(inst, 1000, 43));
}

TEST(DrawSamples, EmpiricalFrequency) {
  Instance inst = testing::random_instance(1, 1, 2, 3.0);
  inst.devices[0].demand = {0.8, 0.2};
  const SampleBatch b = draw_samples(inst, 100000, 2026);
  std::size_t hits = 0;
  for (std::size_t n = 0; n < b.size(); ++n) hits += b.task(0, n) == 0;
  EXPECT_NEAR(static_cast<double>(hits) / b.size(), 0.8, 0.01);
}

TEST(DrawSamples, ZeroProbabilityNeverDrawn) {
  Instance inst = testing::random_instance(1, 2, 3, 3.0);
  for (auto& d : inst.devices) d.demand = {0.5, 0.0, 0.5};
  const SampleBatch b = draw_samples(inst, 5000, 3);
  for (std::size_t n = 0; n < b.size(); ++n) {
    EXPECT_NE(b.task(0, n), 1);
    EXPECT_NE(b.task(1, n), 1);
  }
}

TEST(SamplesCsv, RoundTrip) {
  const Instance inst = testing::random_instance(8, 3, 5, 3.0);
  const SampleBatch b = draw_samples(inst, 37, 1);
  std::stringstream ss;
  write_samples_csv(ss, b);
  EXPECT_EQ(read_samples_csv(ss), b);
}

TEST(SamplesCsv, RejectsGarbage) {
  std::stringstream ss("not,a,sample\n1,2\n");
  EXPECT_THROW(read_samples_csv(ss), Error);
}

TEST(SampleBatch, FromSamples) {
  const std::vector<RequestSample> s = {{{0, 1}}, {{1, 1}}, {{1, 0}}};
  const SampleBatch b = SampleBatch::from_samples(2, s);
  EXPECT_EQ(b.size(), 3u);
  EXPECT_EQ(b.task(0, 2), 1);
  EXPECT_EQ(b.task(1, 2), 0);
  EXPECT_EQ(b.sample(1).a, (std::vector<int>{1, 1}));
}

}  // namespace
}  // namespace mecast
