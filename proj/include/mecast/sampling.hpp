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

// Popularity profiles and independent-reference request draws.
//
// Every draw is a pure function of (seed, device, sample index), so batches
// come out identical whatever the thread count or generation order.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "mecast/bandwidth.hpp"
#include "mecast/instance.hpp"

namespace mecast {

// p[f] proportional to (f + 1)^-gamma. Throws std::invalid_argument for
// F < 1 or gamma < 0.
std::vector<double> zipf_popularity(int num_tasks, double gamma);

struct PopularityProfile {
  enum class Kind { kUniform, kZipf, kExplicit };

  Kind kind = Kind::kUniform;
  double gamma = 0.0;
  std::vector<std::vector<double>> rows;  // one probability vector per device

  static PopularityProfile uniform(int num_devices, int num_tasks);
  static PopularityProfile zipf(int num_devices, int num_tasks, double gamma);
  // Throws std::invalid_argument unless every row is a probability vector.
  static PopularityProfile explicit_rows(std::vector<std::vector<double>> rows);

  // Copies the rows into the instance's demand vectors.
  void apply(Instance& instance) const;
};

// Uniform double in [0, 1) with 53 random bits, determined by the triple.
double counter_uniform(std::uint64_t seed, std::uint64_t stream, std::uint64_t index);

// N draws; device k's request in sample n follows its demand vector.
SampleBatch draw_samples(const Instance& instance, std::size_t num_samples,
                         std::uint64_t seed);

// Rows sample_id, device_id, task_id.
void write_samples_csv(std::ostream& out, const SampleBatch& batch);
SampleBatch read_samples_csv(std::istream& in);

}  // namespace mecast
