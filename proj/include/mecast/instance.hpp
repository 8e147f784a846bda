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

// Problem instances, service policies and their feasibility.
//
// Indices are zero based throughout: devices k in [0, K), tasks f in [0, F).
// The four service routes are numbered 1..4 only in human-facing encodings
// (policy strings, CSV columns).

#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace mecast {

inline constexpr int kNumRoutes = 4;

enum class Route : int {
  kOutputCache = 0,         // output served from the local cache
  kCachedInputCompute = 1,  // cached input, computed on the device
  kLocalCompute = 2,        // input downloaded, computed on the device
  kEdgeCompute = 3,         // output downloaded from the edge server
};

inline constexpr std::array<Route, kNumRoutes> kAllRoutes = {
    Route::kOutputCache, Route::kCachedInputCompute, Route::kLocalCompute,
    Route::kEdgeCompute};

constexpr int index_of(Route r) { return static_cast<int>(r); }
constexpr int number_of(Route r) { return static_cast<int>(r) + 1; }

struct TaskSpec {
  double input_bits = 0.0;    // I_f
  double compute_load = 0.0;  // w_f, cycles per input bit
  double output_bits = 0.0;   // O_f
};

struct TaskCatalog {
  std::vector<TaskSpec> tasks;
  double alpha = 1.0;  // common output/input ratio

  int size() const { return static_cast<int>(tasks.size()); }
  double total_input_bits() const;
  double total_output_bits() const;
};

struct DeviceSpec {
  double cache_bits = 0.0;        // C_k
  double avg_energy = 0.0;        // average energy budget, J
  double cpu_freq = 1.0;          // f_k, cycles/s
  double inv_spectral_eff = 1.0;  // Hz needed per bit/s on this device's link
  std::vector<double> demand;     // request probability per task
};

// 1 / log2(1 + P h^2 / sigma^2).
double inv_spectral_efficiency(double tx_power, double channel_gain,
                               double noise_var);

struct SystemParams {
  double deadline = 0.0;      // tau, s
  double energy_coeff = 0.0;  // mu, J s^2 / cycle^3
};

struct Instance {
  TaskCatalog catalog;
  std::vector<DeviceSpec> devices;
  SystemParams params;

  int num_tasks() const { return catalog.size(); }
  int num_devices() const { return static_cast<int>(devices.size()); }
  const TaskSpec& task(int f) const { return catalog.tasks[f]; }
  const DeviceSpec& device(int k) const { return devices[k]; }

  // Average energy spent by device k when task f is computed locally:
  // P_{k,f} mu f_k^2 I_f w_f.
  double compute_energy(int k, int f) const;
  // I_f w_f / f_k.
  double compute_time(int k, int f) const;
};

struct ValidationReport {
  bool ok = true;
  std::string violation;  // first violated invariant, empty when ok

  explicit operator bool() const { return ok; }
};

// Checks every type invariant plus the local-computing deadline
// prerequisite I_f w_f / f_k <= tau. Never throws.
ValidationReport validate_instance(const Instance& instance);

enum class PolicyMode { kBinary, kRelaxed };

// Route weights x[k, f, j]. Rows (k, f) sum to one.
class ServicePolicy {
 public:
  ServicePolicy() = default;
  ServicePolicy(int num_devices, int num_tasks,
                PolicyMode mode = PolicyMode::kRelaxed);

  // Binary policy serving every (k, f) through `route`.
  static ServicePolicy uniform(int num_devices, int num_tasks, Route route);
  // Binary policy from a device-major route list of length K * F.
  static ServicePolicy from_routes(int num_devices, int num_tasks,
                                   std::span<const Route> routes);
  // Inverse of encode().
  static ServicePolicy decode(const std::string& encoded);

  int num_devices() const { return num_devices_; }
  int num_tasks() const { return num_tasks_; }
  PolicyMode mode() const { return mode_; }
  void set_mode(PolicyMode mode) { mode_ = mode; }

  double operator()(int k, int f, int j) const {
    return x_[offset(k, f) + j];
  }
  double& at(int k, int f, int j) { return x_[offset(k, f) + j]; }
  double weight(int k, int f, Route r) const { return (*this)(k, f, index_of(r)); }

  // Sets row (k, f) to the unit vector of `route`.
  void assign(int k, int f, Route route);
  // Route of a one-hot row; nullopt for fractional rows.
  std::optional<Route> route(int k, int f) const;

  bool is_binary() const;
  // Largest distance of any entry from {0, 1}.
  double binary_gap() const;

  // Route digits 1..4, device-major, devices separated by '.'.
  std::string encode() const;

  std::span<const double> values() const { return x_; }
  std::span<double> values() { return x_; }

  friend bool operator==(const ServicePolicy&, const ServicePolicy&) = default;

 private:
  std::size_t offset(int k, int f) const {
    return (static_cast<std::size_t>(k) * num_tasks_ + f) * kNumRoutes;
  }

  int num_devices_ = 0;
  int num_tasks_ = 0;
  PolicyMode mode_ = PolicyMode::kRelaxed;
  std::vector<double> x_;
};

// Caching and computing indicators c^I, c^O, d per (k, f).
struct CachingComputingDecision {
  int num_devices = 0;
  int num_tasks = 0;
  std::vector<std::uint8_t> cache_input;
  std::vector<std::uint8_t> cache_output;
  std::vector<std::uint8_t> compute_local;

  std::size_t index(int k, int f) const {
    return static_cast<std::size_t>(k) * num_tasks + f;
  }
};

// Maps a binary policy onto caching/computing indicators. Throws
// std::invalid_argument for non-binary input.
CachingComputingDecision policy_to_decision(const ServicePolicy& policy);
// Inverse mapping; throws std::invalid_argument for indicator combinations
// that correspond to no service route.
ServicePolicy decision_to_policy(const CachingComputingDecision& decision);

struct Violation {
  enum class Kind { kRowSum, kBox, kCache, kEnergy };
  Kind kind;
  int device;
  int task;      // -1 for per-device budgets
  double slack;  // budget minus usage; negative when violated

  std::string describe() const;
};

struct FeasibilityReport {
  bool ok = true;
  std::vector<Violation> violations;

  explicit operator bool() const { return ok; }
};

// Per-device cache and energy consumption of a policy.
double cache_usage(const Instance& instance, const ServicePolicy& policy, int k);
double energy_usage(const Instance& instance, const ServicePolicy& policy, int k);

inline constexpr double kBudgetRelTol = 1e-9;

// usage <= budget up to rel_tol * max(budget, 1).
inline bool within_budget(double usage, double budget, double rel_tol = kBudgetRelTol) {
  return budget - usage >= -rel_tol * std::max(budget, 1.0);
}

// Checks row sums, the [0, 1] box, and both per-device budgets. Budgets are
// compared with a relative tolerance `rel_tol` of the budget (absolute for a
// zero budget).
FeasibilityReport is_feasible(const Instance& instance,
                              const ServicePolicy& policy,
                              double rel_tol = kBudgetRelTol);

}  // namespace mecast
