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

// Route rates and downlink multicast bandwidth.
//
// One multicast stream per task and sample: its input stream is sized by the
// worst channel among route-3 requesters times the largest route-3 rate, its
// output stream by the worst channel among route-4 requesters. The two
// maxima of the input stream may come from different devices.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "mecast/instance.hpp"

namespace mecast {

// Bits/s needed on device k's link for task f under route j (0-based):
// 0 for routes 1 and 2, I_f / (tau - I_f w_f / f_k) for route 3 and O_f / tau
// for route 4. Throws mecast::Error if tau <= I_f w_f / f_k for route 3.
double route_rate(const Instance& instance, int k, int f, int j);

// Route-3 and route-4 rates of every (k, f).
struct RateTable {
  int num_devices = 0;
  int num_tasks = 0;
  std::vector<double> local;   // R3, device-major K x F
  std::vector<double> output;  // R4 = O_f / tau, length F

  explicit RateTable(const Instance& instance);
  RateTable() = default;
  double r3(int k, int f) const { return local[static_cast<std::size_t>(k) * num_tasks + f]; }
  double r4(int f) const { return output[f]; }
};

// One joint request state: a[k] is the task requested by device k.
struct RequestSample {
  std::vector<int> a;
};

// N request states stored device-major (K rows of N task indices) so the
// bandwidth kernels can stream one device row at a time.
class SampleBatch {
 public:
  SampleBatch() = default;
  SampleBatch(int num_devices, std::size_t num_samples);
  static SampleBatch from_samples(int num_devices, const std::vector<RequestSample>& samples);

  int num_devices() const { return num_devices_; }
  std::size_t size() const { return num_samples_; }
  bool empty() const { return num_samples_ == 0; }

  std::int32_t task(int k, std::size_t n) const { return data_[index(k, n)]; }
  void set_task(int k, std::size_t n, std::int32_t f) { data_[index(k, n)] = f; }
  RequestSample sample(std::size_t n) const;
  std::vector<RequestSample> samples() const;
  const std::int32_t* data() const { return data_.data(); }

  friend bool operator==(const SampleBatch&, const SampleBatch&) = default;

 private:
  std::size_t index(int k, std::size_t n) const {
    return static_cast<std::size_t>(k) * num_samples_ + n;
  }

  int num_devices_ = 0;
  std::size_t num_samples_ = 0;
  std::vector<std::int32_t> data_;
};

struct BandwidthBreakdown {
  std::vector<double> input;   // B^I_f, Hz
  std::vector<double> output;  // B^O_f, Hz
  double total = 0.0;          // sum over f of input + output, in task order
};

BandwidthBreakdown sample_bandwidth(const Instance& instance, const ServicePolicy& policy,
                                    const RequestSample& sample);
BandwidthBreakdown sample_bandwidth(const Instance& instance, const ServicePolicy& policy,
                                    const RateTable& rates, const RequestSample& sample);

// Per-sample totals, bit-identical to sample_bandwidth(...).total.
std::vector<double> sample_totals(const Instance& instance, const ServicePolicy& policy,
                                  const RateTable& rates, const SampleBatch& samples);

// Mean of the per-sample totals. Throws mecast::Error on an empty batch.
double saa_objective(const Instance& instance, const ServicePolicy& policy,
                     const SampleBatch& samples);
double saa_objective(const Instance& instance, const ServicePolicy& policy,
                     const RateTable& rates, const SampleBatch& samples);
double saa_objective(const Instance& instance, const ServicePolicy& policy,
                     const std::vector<RequestSample>& samples);

inline constexpr std::uint64_t kDefaultStateCap = 1'000'000;

// Expectation over all F^K request states. Throws CapExceededError when
// F^K > state_cap.
double exact_average_bandwidth(const Instance& instance, const ServicePolicy& policy,
                               std::uint64_t state_cap = kDefaultStateCap);

// Every device served over its own stream.
double unicast_bandwidth(const Instance& instance, const ServicePolicy& policy);

// Rows sample_id, task_id, b_input_hz, b_output_hz. The header is written
// by write_breakdown_header.
void write_breakdown_header(std::ostream& out);
void write_breakdown_rows(std::ostream& out, std::size_t sample_id,
                          const BandwidthBreakdown& breakdown);

}  // namespace mecast
