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

#include "mecast/instance.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace mecast {

namespace {

constexpr double kAlphaRelTol = 1e-9;
constexpr double kDemandTol = 1e-12;

std::string at_task(const char* what, int f) {
  std::ostringstream os;
  os << what << " (task " << f << ")";
  return os.str();
}

std::string at_device(const char* what, int k) {
  std::ostringstream os;
  os << what << " (device " << k << ")";
  return os.str();
}

}  // namespace

double TaskCatalog::total_input_bits() const {
  double sum = 0.0;
  for (const auto& t : tasks) sum += t.input_bits;
  return sum;
}

double TaskCatalog::total_output_bits() const {
  double sum = 0.0;
  for (const auto& t : tasks) sum += t.output_bits;
  return sum;
}

double inv_spectral_efficiency(double tx_power, double channel_gain,
                               double noise_var) {
  if (!(tx_power > 0.0) || !(noise_var > 0.0) || channel_gain == 0.0) {
    throw std::invalid_argument("inv_spectral_efficiency: SNR must be positive");
  }
  const double snr = tx_power * channel_gain * channel_gain / noise_var;
  return 1.0 / std::log2(1.0 + snr);
}

double Instance::compute_energy(int k, int f) const {
  const auto& t = task(f);
  const auto& d = device(k);
  return d.demand[f] * params.energy_coeff * d.cpu_freq * d.cpu_freq *
         t.input_bits * t.compute_load;
}

double Instance::compute_time(int k, int f) const {
  const auto& t = task(f);
  return t.input_bits * t.compute_load / device(k).cpu_freq;
}

ValidationReport validate_instance(const Instance& instance) {
  auto fail = [](std::string why) { return ValidationReport{false, std::move(why)}; };

  const auto& cat = instance.catalog;
  if (cat.tasks.empty()) return fail("task catalog is empty");
  if (!(cat.alpha > 0.0)) return fail("alpha must be positive");
  for (int f = 0; f < cat.size(); ++f) {
    const auto& t = cat.tasks[f];
    if (!(t.input_bits > 0.0)) return fail(at_task("input size must be positive", f));
    if (!(t.compute_load > 0.0)) return fail(at_task("compute load must be positive", f));
    if (!(t.output_bits > 0.0)) return fail(at_task("output size must be positive", f));
    const double ratio = t.output_bits / t.input_bits;
    if (std::abs(ratio - cat.alpha) > kAlphaRelTol * cat.alpha) {
      return fail(at_task("output/input ratio differs from alpha", f));
    }
  }

  if (instance.devices.empty()) return fail("device fleet is empty");
  const int num_tasks = cat.size();
  for (int k = 0; k < instance.num_devices(); ++k) {
    const auto& d = instance.devices[k];
    if (!(d.cache_bits >= 0.0)) return fail(at_device("cache size must be nonnegative", k));
    if (!(d.avg_energy >= 0.0)) return fail(at_device("energy budget must be nonnegative", k));
    if (!(d.cpu_freq > 0.0)) return fail(at_device("cpu frequency must be positive", k));
    if (!(d.inv_spectral_eff > 0.0)) {
      return fail(at_device("inverse spectral efficiency must be positive", k));
    }
    if (static_cast<int>(d.demand.size()) != num_tasks) {
      return fail(at_device("demand vector length differs from task count", k));
    }
    double sum = 0.0;
    for (double p : d.demand) {
      if (!(p >= 0.0)) return fail(at_device("demand entries must be nonnegative", k));
      sum += p;
    }
    if (std::abs(sum - 1.0) > kDemandTol) return fail(at_device("demand not normalized", k));
  }

  if (!(instance.params.deadline > 0.0)) return fail("deadline must be positive");
  if (!(instance.params.energy_coeff > 0.0)) return fail("energy coefficient must be positive");

  for (int k = 0; k < instance.num_devices(); ++k) {
    for (int f = 0; f < num_tasks; ++f) {
      if (instance.compute_time(k, f) > instance.params.deadline) {
        std::ostringstream os;
        os << "deadline infeasible for local computing (device " << k
           << ", task " << f << ")";
        return fail(os.str());
      }
    }
  }
  return {};
}

ServicePolicy::ServicePolicy(int num_devices, int num_tasks, PolicyMode mode)
    : num_devices_(num_devices),
      num_tasks_(num_tasks),
      mode_(mode),
      x_(static_cast<std::size_t>(num_devices) * num_tasks * kNumRoutes, 0.0) {
  if (num_devices < 0 || num_tasks < 0) {
    throw std::invalid_argument("ServicePolicy: negative dimension");
  }
}

ServicePolicy ServicePolicy::uniform(int num_devices, int num_tasks, Route route) {
  ServicePolicy p(num_devices, num_tasks, PolicyMode::kBinary);
  for (int k = 0; k < num_devices; ++k) {
    for (int f = 0; f < num_tasks; ++f) p.assign(k, f, route);
  }
  return p;
}

ServicePolicy ServicePolicy::from_routes(int num_devices, int num_tasks,
                                         std::span<const Route> routes) {
  if (routes.size() != static_cast<std::size_t>(num_devices) * num_tasks) {
    throw std::invalid_argument("ServicePolicy::from_routes: wrong route count");
  }
  ServicePolicy p(num_devices, num_tasks, PolicyMode::kBinary);
  for (int k = 0; k < num_devices; ++k) {
    for (int f = 0; f < num_tasks; ++f) {
      p.assign(k, f, routes[static_cast<std::size_t>(k) * num_tasks + f]);
    }
  }
  return p;
}

ServicePolicy ServicePolicy::decode(const std::string& encoded) {
  std::vector<std::string> rows(1);
  for (char c : encoded) {
    if (c == '.') {
      rows.emplace_back();
    } else if (c >= '1' && c <= '4') {
      rows.back().push_back(c);
    } else {
      throw std::invalid_argument("ServicePolicy::decode: bad character");
    }
  }
  const int num_tasks = static_cast<int>(rows.front().size());
  for (const auto& r : rows) {
    if (static_cast<int>(r.size()) != num_tasks) {
      throw std::invalid_argument("ServicePolicy::decode: ragged rows");
    }
  }
  ServicePolicy p(static_cast<int>(rows.size()), num_tasks, PolicyMode::kBinary);
  for (int k = 0; k < p.num_devices(); ++k) {
    for (int f = 0; f < num_tasks; ++f) {
      p.assign(k, f, static_cast<Route>(rows[k][f] - '1'));
    }
  }
  return p;
}

void ServicePolicy::assign(int k, int f, Route route) {
  const auto o = offset(k, f);
  for (int j = 0; j < kNumRoutes; ++j) x_[o + j] = 0.0;
  x_[o + index_of(route)] = 1.0;
}

std::optional<Route> ServicePolicy::route(int k, int f) const {
  const auto o = offset(k, f);
  std::optional<Route> found;
  for (int j = 0; j < kNumRoutes; ++j) {
    const double v = x_[o + j];
    if (v == 1.0) {
      if (found) return std::nullopt;
      found = static_cast<Route>(j);
    } else if (v != 0.0) {
      return std::nullopt;
    }
  }
  return found;
}

bool ServicePolicy::is_binary() const {
  for (int k = 0; k < num_devices_; ++k) {
    for (int f = 0; f < num_tasks_; ++f) {
      if (!route(k, f)) return false;
    }
  }
  return true;
}

double ServicePolicy::binary_gap() const {
  double gap = 0.0;
  for (double v : x_) gap = std::max(gap, std::min(std::abs(v), std::abs(1.0 - v)));
  return gap;
}

std::string ServicePolicy::encode() const {
  std::string out;
  out.reserve(x_.size() / kNumRoutes + num_devices_);
  for (int k = 0; k < num_devices_; ++k) {
    if (k > 0) out.push_back('.');
    for (int f = 0; f < num_tasks_; ++f) {
      const auto r = route(k, f);
      if (!r) throw std::invalid_argument("ServicePolicy::encode: fractional row");
      out.push_back(static_cast<char>('0' + number_of(*r)));
    }
  }
  return out;
}

CachingComputingDecision policy_to_decision(const ServicePolicy& policy) {
  CachingComputingDecision d;
  d.num_devices = policy.num_devices();
  d.num_tasks = policy.num_tasks();
  const std::size_t n = static_cast<std::size_t>(d.num_devices) * d.num_tasks;
  d.cache_input.assign(n, 0);
  d.cache_output.assign(n, 0);
  d.compute_local.assign(n, 0);
  for (int k = 0; k < d.num_devices; ++k) {
    for (int f = 0; f < d.num_tasks; ++f) {
      const auto r = policy.route(k, f);
      if (!r) throw std::invalid_argument("policy_to_decision: policy is not binary");
      const auto i = d.index(k, f);
      switch (*r) {
        case Route::kOutputCache:
          d.cache_output[i] = 1;
          break;
        case Route::kCachedInputCompute:
          d.cache_input[i] = 1;
          d.compute_local[i] = 1;
          break;
        case Route::kLocalCompute:
          d.compute_local[i] = 1;
          break;
        case Route::kEdgeCompute:
          break;
      }
    }
  }
  return d;
}

ServicePolicy decision_to_policy(const CachingComputingDecision& decision) {
  ServicePolicy p(decision.num_devices, decision.num_tasks, PolicyMode::kBinary);
  for (int k = 0; k < decision.num_devices; ++k) {
    for (int f = 0; f < decision.num_tasks; ++f) {
      const auto i = decision.index(k, f);
      const int ci = decision.cache_input[i];
      const int co = decision.cache_output[i];
      const int dl = decision.compute_local[i];
      Route r;
      if (co == 1 && ci == 0 && dl == 0) {
        r = Route::kOutputCache;
      } else if (co == 0 && ci == 1 && dl == 1) {
        r = Route::kCachedInputCompute;
      } else if (co == 0 && ci == 0 && dl == 1) {
        r = Route::kLocalCompute;
      } else if (co == 0 && ci == 0 && dl == 0) {
        r = Route::kEdgeCompute;
      } else {
        throw std::invalid_argument("decision_to_policy: indicators match no route");
      }
      p.assign(k, f, r);
    }
  }
  return p;
}

std::string Violation::describe() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::kRowSum:
      os << "row sum (device " << device << ", task " << task << ")";
      break;
    case Kind::kBox:
      os << "entry outside [0,1] (device " << device << ", task " << task << ")";
      break;
    case Kind::kCache:
      os << "cache budget (device " << device << ")";
      break;
    case Kind::kEnergy:
      os << "energy budget (device " << device << ")";
      break;
  }
  os << ", slack " << slack;
  return os.str();
}

double cache_usage(const Instance& instance, const ServicePolicy& policy, int k) {
  double used = 0.0;
  for (int f = 0; f < instance.num_tasks(); ++f) {
    const auto& t = instance.task(f);
    used += t.input_bits * policy.weight(k, f, Route::kCachedInputCompute) +
            t.output_bits * policy.weight(k, f, Route::kOutputCache);
  }
  return used;
}

double energy_usage(const Instance& instance, const ServicePolicy& policy, int k) {
  double used = 0.0;
  for (int f = 0; f < instance.num_tasks(); ++f) {
    used += instance.compute_energy(k, f) *
            (policy.weight(k, f, Route::kCachedInputCompute) +
             policy.weight(k, f, Route::kLocalCompute));
  }
  return used;
}

FeasibilityReport is_feasible(const Instance& instance, const ServicePolicy& policy,
                              double rel_tol) {
  if (policy.num_devices() != instance.num_devices() ||
      policy.num_tasks() != instance.num_tasks()) {
    throw std::invalid_argument("is_feasible: policy shape does not match instance");
  }
  FeasibilityReport report;
  auto add = [&](Violation v) {
    report.ok = false;
    report.violations.push_back(v);
  };
  const int K = instance.num_devices();
  const int F = instance.num_tasks();
  for (int k = 0; k < K; ++k) {
    for (int f = 0; f < F; ++f) {
      double row = 0.0;
      for (int j = 0; j < kNumRoutes; ++j) {
        const double v = policy(k, f, j);
        row += v;
        if (v < -rel_tol || v > 1.0 + rel_tol) {
          add({Violation::Kind::kBox, k, f, v < 0.0 ? v : 1.0 - v});
        }
      }
      if (std::abs(row - 1.0) > rel_tol) add({Violation::Kind::kRowSum, k, f, 1.0 - row});
    }
    const auto& d = instance.device(k);
    const double cache_used = cache_usage(instance, policy, k);
    const double cache_slack = d.cache_bits - cache_used;
    if (!within_budget(cache_used, d.cache_bits, rel_tol)) {
      add({Violation::Kind::kCache, k, -1, cache_slack});
    }
    const double energy_used = energy_usage(instance, policy, k);
    const double energy_slack = d.avg_energy - energy_used;
    if (!within_budget(energy_used, d.avg_energy, rel_tol)) {
      add({Violation::Kind::kEnergy, k, -1, energy_slack});
    }
  }
  return report;
}

}  // namespace mecast
