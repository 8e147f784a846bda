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

#include "mecast/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <stdexcept>

#include "mecast/csv.hpp"
#include "mecast/errors.hpp"
#include "mecast/parallel.hpp"

namespace mecast {

namespace {

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

void check_row(const std::vector<double>& row) {
  if (row.empty()) throw std::invalid_argument("popularity row is empty");
  double sum = 0.0;
  for (double p : row) {
    if (!(p >= 0.0)) throw std::invalid_argument("popularity entry is negative");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-12) throw std::invalid_argument("popularity row not normalized");
}

}  // namespace

std::vector<double> zipf_popularity(int num_tasks, double gamma) {
  if (num_tasks < 1) throw std::invalid_argument("zipf_popularity: F must be >= 1");
  if (!(gamma >= 0.0)) throw std::invalid_argument("zipf_popularity: gamma must be >= 0");
  std::vector<double> p(num_tasks);
  double sum = 0.0;
  for (int f = 0; f < num_tasks; ++f) {
    p[f] = std::pow(static_cast<double>(f + 1), -gamma);
    sum += p[f];
  }
  for (double& v : p) v /= sum;
  return p;
}

PopularityProfile PopularityProfile::uniform(int num_devices, int num_tasks) {
  PopularityProfile out;
  out.kind = Kind::kUniform;
  out.rows.assign(num_devices, zipf_popularity(num_tasks, 0.0));
  return out;
}

PopularityProfile PopularityProfile::zipf(int num_devices, int num_tasks, double gamma) {
  PopularityProfile out;
  out.kind = Kind::kZipf;
  out.gamma = gamma;
  out.rows.assign(num_devices, zipf_popularity(num_tasks, gamma));
  return out;
}

PopularityProfile PopularityProfile::explicit_rows(std::vector<std::vector<double>> rows) {
  for (const auto& r : rows) check_row(r);
  PopularityProfile out;
  out.kind = Kind::kExplicit;
  out.rows = std::move(rows);
  return out;
}

void PopularityProfile::apply(Instance& instance) const {
  if (static_cast<int>(rows.size()) != instance.num_devices()) {
    throw Error("popularity profile does not match device count");
  }
  for (int k = 0; k < instance.num_devices(); ++k) {
    if (static_cast<int>(rows[k].size()) != instance.num_tasks()) {
      throw Error("popularity profile does not match task count");
    }
    instance.devices[k].demand = rows[k];
  }
}

double counter_uniform(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
  std::uint64_t h = mix64(seed + kGolden);
  h = mix64(h ^ (stream + 1) * kGolden);
  h = mix64(h ^ (index + 1) * 0xd1b54a32d192ed03ULL);
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

SampleBatch draw_samples(const Instance& instance, std::size_t num_samples,
                         std::uint64_t seed) {
  if (num_samples == 0) throw Error("draw_samples: N must be >= 1");
  const int K = instance.num_devices();
  const int F = instance.num_tasks();
  std::vector<std::vector<double>> cdf(K, std::vector<double>(F));
  for (int k = 0; k < K; ++k) {
    double acc = 0.0;
    for (int f = 0; f < F; ++f) {
      acc += instance.device(k).demand[f];
      cdf[k][f] = acc;
    }
  }
  SampleBatch batch(K, num_samples);
  parallel_for(static_cast<std::size_t>(K), [&](std::size_t k) {
    const auto& c = cdf[k];
    // Last task with positive mass absorbs rounding in the cumulative sum.
    int last = F - 1;
    while (last > 0 && instance.device(static_cast<int>(k)).demand[last] <= 0.0) --last;
    for (std::size_t n = 0; n < num_samples; ++n) {
      const double u = counter_uniform(seed, k, n) * c[F - 1];
      int f = static_cast<int>(std::upper_bound(c.begin(), c.end(), u) - c.begin());
      batch.set_task(static_cast<int>(k), n, std::min(f, last));
    }
  });
  return batch;
}

void write_samples_csv(std::ostream& out, const SampleBatch& batch) {
  csv::Writer w(out, "request-samples", {"sample_id", "device_id", "task_id"});
  for (std::size_t n = 0; n < batch.size(); ++n) {
    for (int k = 0; k < batch.num_devices(); ++k) w.row(n, k, static_cast<int>(batch.task(k, n)));
  }
}

SampleBatch read_samples_csv(std::istream& in) {
  const auto table = csv::read(in);
  const auto cs = table.column("sample_id");
  const auto cd = table.column("device_id");
  const auto ct = table.column("task_id");
  std::int64_t max_n = -1, max_k = -1;
  for (const auto& r : table.rows) {
    max_n = std::max(max_n, csv::to_int(r[cs]));
    max_k = std::max(max_k, csv::to_int(r[cd]));
  }
  if (max_n < 0) throw Error("sample file holds no rows");
  SampleBatch batch(static_cast<int>(max_k + 1), static_cast<std::size_t>(max_n + 1));
  std::vector<char> seen(static_cast<std::size_t>((max_k + 1) * (max_n + 1)), 0);
  for (const auto& r : table.rows) {
    const auto n = csv::to_int(r[cs]);
    const auto k = csv::to_int(r[cd]);
    if (n < 0 || k < 0) throw Error("sample file holds a negative index");
    batch.set_task(static_cast<int>(k), static_cast<std::size_t>(n),
                   static_cast<std::int32_t>(csv::to_int(r[ct])));
    seen[static_cast<std::size_t>(k * (max_n + 1) + n)] = 1;
  }
  if (std::find(seen.begin(), seen.end(), 0) != seen.end()) {
    throw Error("sample file is missing (sample, device) entries");
  }
  return batch;
}

}  // namespace mecast
