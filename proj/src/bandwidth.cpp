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

#include "mecast/bandwidth.hpp"

#include <ostream>
#include <sstream>

#include "mecast/csv.hpp"
#include "mecast/errors.hpp"
#include "mecast/kernels.hpp"

namespace mecast {

namespace {

constexpr int kRoute3 = index_of(Route::kLocalCompute);
constexpr int kRoute4 = index_of(Route::kEdgeCompute);

inline double take_max(double v, double m) { return v > m ? v : m; }

void check_shapes(const Instance& instance, const ServicePolicy& policy) {
  if (policy.num_devices() != instance.num_devices() ||
      policy.num_tasks() != instance.num_tasks()) {
    throw Error("policy shape does not match instance");
  }
}

}  // namespace

double route_rate(const Instance& instance, int k, int f, int j) {
  const auto& t = instance.task(f);
  const double tau = instance.params.deadline;
  switch (j) {
    case 0:
    case 1:
      return 0.0;
    case 2: {
      const double slack = tau - instance.compute_time(k, f);
      if (!(slack > 0.0)) {
        std::ostringstream os;
        os << "route 3 infeasible: deadline " << tau << " s does not exceed compute time "
           << instance.compute_time(k, f) << " s (device " << k << ", task " << f << ")";
        throw Error(os.str());
      }
      return t.input_bits / slack;
    }
    case 3:
      return t.output_bits / tau;
    default:
      throw Error("route index out of range");
  }
}

RateTable::RateTable(const Instance& instance)
    : num_devices(instance.num_devices()),
      num_tasks(instance.num_tasks()),
      local(static_cast<std::size_t>(num_devices) * num_tasks),
      output(num_tasks) {
  for (int f = 0; f < num_tasks; ++f) output[f] = route_rate(instance, 0, f, kRoute4);
  for (int k = 0; k < num_devices; ++k) {
    for (int f = 0; f < num_tasks; ++f) {
      local[static_cast<std::size_t>(k) * num_tasks + f] = route_rate(instance, k, f, kRoute3);
    }
  }
}

SampleBatch::SampleBatch(int num_devices, std::size_t num_samples)
    : num_devices_(num_devices),
      num_samples_(num_samples),
      data_(static_cast<std::size_t>(num_devices) * num_samples, 0) {}

SampleBatch SampleBatch::from_samples(int num_devices,
                                      const std::vector<RequestSample>& samples) {
  SampleBatch batch(num_devices, samples.size());
  for (std::size_t n = 0; n < samples.size(); ++n) {
    if (static_cast<int>(samples[n].a.size()) != num_devices) {
      throw Error("request sample length does not match device count");
    }
    for (int k = 0; k < num_devices; ++k) batch.set_task(k, n, samples[n].a[k]);
  }
  return batch;
}

RequestSample SampleBatch::sample(std::size_t n) const {
  RequestSample s;
  s.a.resize(num_devices_);
  for (int k = 0; k < num_devices_; ++k) s.a[k] = task(k, n);
  return s;
}

std::vector<RequestSample> SampleBatch::samples() const {
  std::vector<RequestSample> out;
  out.reserve(num_samples_);
  for (std::size_t n = 0; n < num_samples_; ++n) out.push_back(sample(n));
  return out;
}

BandwidthBreakdown sample_bandwidth(const Instance& instance, const ServicePolicy& policy,
                                    const RequestSample& sample) {
  return sample_bandwidth(instance, policy, RateTable(instance), sample);
}

BandwidthBreakdown sample_bandwidth(const Instance& instance, const ServicePolicy& policy,
                                    const RateTable& rates, const RequestSample& sample) {
  check_shapes(instance, policy);
  const int K = instance.num_devices();
  const int F = instance.num_tasks();
  if (static_cast<int>(sample.a.size()) != K) {
    throw Error("request sample length does not match device count");
  }
  BandwidthBreakdown out;
  out.input.assign(F, 0.0);
  out.output.assign(F, 0.0);
  for (int f = 0; f < F; ++f) {
    double spread_in = 0.0;
    double rate_in = 0.0;
    double spread_out = 0.0;
    for (int k = 0; k < K; ++k) {
      if (sample.a[k] != f) continue;
      const double s = instance.device(k).inv_spectral_eff;
      const double x3 = policy(k, f, kRoute3);
      const double x4 = policy(k, f, kRoute4);
      spread_in = take_max(s * x3, spread_in);
      rate_in = take_max(rates.r3(k, f) * x3, rate_in);
      spread_out = take_max(s * x4, spread_out);
    }
    out.input[f] = spread_in * rate_in;
    out.output[f] = rates.r4(f) * spread_out;
    out.total += out.input[f] + out.output[f];
  }
  return out;
}

std::vector<double> sample_totals(const Instance& instance, const ServicePolicy& policy,
                                  const RateTable& rates, const SampleBatch& samples) {
  check_shapes(instance, policy);
  const int K = instance.num_devices();
  const int F = instance.num_tasks();
  if (samples.num_devices() != K) throw Error("sample batch does not match device count");
  const auto& kern = kernels::active();
  std::vector<double> totals(samples.size(), 0.0);
  std::vector<double> spread_in(K), rate_in(K), spread_out(K);
  for (int f = 0; f < F; ++f) {
    for (int k = 0; k < K; ++k) {
      const double s = instance.device(k).inv_spectral_eff;
      const double x3 = policy(k, f, kRoute3);
      spread_in[k] = s * x3;
      rate_in[k] = rates.r3(k, f) * x3;
      spread_out[k] = s * policy(k, f, kRoute4);
    }
    const kernels::TaskStreamWeights w{spread_in.data(), rate_in.data(), spread_out.data(),
                                       rates.r4(f)};
    kern.accumulate_task_bandwidth(f, samples.data(), K, samples.size(), w, totals.data());
  }
  return totals;
}

double saa_objective(const Instance& instance, const ServicePolicy& policy,
                     const SampleBatch& samples) {
  return saa_objective(instance, policy, RateTable(instance), samples);
}

double saa_objective(const Instance& instance, const ServicePolicy& policy,
                     const RateTable& rates, const SampleBatch& samples) {
  if (samples.empty()) throw Error("saa_objective: empty sample list");
  const auto totals = sample_totals(instance, policy, rates, samples);
  double sum = 0.0;
  for (double t : totals) sum += t;
  return sum / static_cast<double>(totals.size());
}

double saa_objective(const Instance& instance, const ServicePolicy& policy,
                     const std::vector<RequestSample>& samples) {
  if (samples.empty()) throw Error("saa_objective: empty sample list");
  return saa_objective(instance, policy,
                       SampleBatch::from_samples(instance.num_devices(), samples));
}

double exact_average_bandwidth(const Instance& instance, const ServicePolicy& policy,
                               std::uint64_t state_cap) {
  check_shapes(instance, policy);
  const int K = instance.num_devices();
  const int F = instance.num_tasks();
  std::uint64_t states = 1;
  for (int k = 0; k < K; ++k) {
    if (states > state_cap / static_cast<std::uint64_t>(F)) {
      throw CapExceededError("exact_average_bandwidth: F^K exceeds the state cap");
    }
    states *= static_cast<std::uint64_t>(F);
  }
  if (states > state_cap) {
    throw CapExceededError("exact_average_bandwidth: F^K exceeds the state cap");
  }
  const RateTable rates(instance);
  RequestSample a;
  a.a.assign(K, 0);
  double sum = 0.0;
  for (std::uint64_t s = 0; s < states; ++s) {
    double p = 1.0;
    for (int k = 0; k < K; ++k) p *= instance.device(k).demand[a.a[k]];
    if (p > 0.0) sum += p * sample_bandwidth(instance, policy, rates, a).total;
    for (int k = K - 1; k >= 0; --k) {
      if (++a.a[k] < F) break;
      a.a[k] = 0;
    }
  }
  return sum;
}

double unicast_bandwidth(const Instance& instance, const ServicePolicy& policy) {
  check_shapes(instance, policy);
  const RateTable rates(instance);
  double sum = 0.0;
  for (int k = 0; k < instance.num_devices(); ++k) {
    const auto& dev = instance.device(k);
    for (int f = 0; f < instance.num_tasks(); ++f) {
      const double per_request =
          rates.r3(k, f) * policy(k, f, kRoute3) + rates.r4(f) * policy(k, f, kRoute4);
      sum += dev.demand[f] * per_request * dev.inv_spectral_eff;
    }
  }
  return sum;
}

void write_breakdown_header(std::ostream& out) {
  out << "# " << csv::kSchemaTag << " bandwidth-breakdown\n"
      << "sample_id,task_id,b_input_hz,b_output_hz\n";
}

void write_breakdown_rows(std::ostream& out, std::size_t sample_id,
                          const BandwidthBreakdown& breakdown) {
  for (std::size_t f = 0; f < breakdown.input.size(); ++f) {
    out << sample_id << ',' << f << ',' << csv::format(breakdown.input[f]) << ','
        << csv::format(breakdown.output[f]) << '\n';
  }
}

}  // namespace mecast
