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

#include "mecast/heuristics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>

#include "mecast/csv.hpp"
#include "mecast/errors.hpp"
#include "mecast/parallel.hpp"

namespace mecast {

namespace {

constexpr double kRelTol = 1e-12;

// Task indices sorted by descending score, ties by ascending index.
std::vector<int> order_by(const std::vector<double>& score) {
  std::vector<int> idx(score.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return score[a] > score[b]; });
  return idx;
}

double ratio_or_zero(double num, double den) { return den > 0.0 ? num / den : 0.0; }

struct DevicePlan {
  std::vector<Route> routes;
  std::vector<GreedyStep> steps;
};

void check_alpha_le1(const Instance& inst, const char* who) {
  if (inst.catalog.alpha > 1.0) throw Error(std::string(who) + ": requires alpha <= 1");
}

double task_output_term(const Instance& inst, const SampleBatch& samples, int f,
                        const std::vector<std::uint8_t>& cached) {
  const int K = inst.num_devices();
  const int F = inst.num_tasks();
  double sum = 0.0;
  for (std::size_t n = 0; n < samples.size(); ++n) {
    double m = 0.0;
    for (int k = 0; k < K; ++k) {
      if (samples.task(k, n) != f || cached[static_cast<std::size_t>(k) * F + f]) continue;
      m = std::max(m, inst.device(k).inv_spectral_eff);
    }
    sum += m;
  }
  return inst.task(f).output_bits / inst.params.deadline * sum /
         static_cast<double>(samples.size());
}

ServicePolicy routes_to_policy(const Instance& inst, const std::vector<DevicePlan>& plans,
                               GreedyTrace* trace) {
  const int K = inst.num_devices();
  const int F = inst.num_tasks();
  ServicePolicy p(K, F, PolicyMode::kBinary);
  for (int k = 0; k < K; ++k) {
    for (int f = 0; f < F; ++f) p.assign(k, f, plans[k].routes[f]);
    if (trace) trace->steps.insert(trace->steps.end(), plans[k].steps.begin(), plans[k].steps.end());
  }
  return p;
}

// Appends the longest prefix of `order` (skipping tasks already assigned)
// whose cumulative cost fits.
template <typename CostFn>
void take_prefix(DevicePlan& plan, int k, const std::vector<int>& order,
                 const std::vector<double>& score, Route route, double& cache_used,
                 double& energy_used, double cache_budget, double energy_budget, CostFn cost,
                 bool skip_nonpositive) {
  for (int f : order) {
    if (plan.routes[f] != Route::kEdgeCompute) continue;
    if (skip_nonpositive && !(score[f] > 0.0)) continue;
    const auto [dc, de] = cost(f);
    if (!within_budget(cache_used + dc, cache_budget) ||
        !within_budget(energy_used + de, energy_budget)) {
      break;
    }
    cache_used += dc;
    energy_used += de;
    plan.routes[f] = route;
    plan.steps.push_back({k, f, route, score[f], cache_used, energy_used});
  }
}

}  // namespace

void write_trace_csv(std::ostream& out, const GreedyTrace& trace) {
  csv::Writer w(out, "greedy-trace",
                {"device", "task", "route", "score", "cumulative_cache", "cumulative_energy"});
  for (const auto& s : trace.steps) {
    w.row(s.device, s.task, number_of(s.route), s.score, s.cumulative_cache, s.cumulative_energy);
  }
}

ServicePolicy mec_computing_policy(const Instance& inst) {
  return ServicePolicy::uniform(inst.num_devices(), inst.num_tasks(), Route::kEdgeCompute);
}

ServicePolicy greedy_caching_policy(const Instance& inst, GreedyTrace* trace) {
  const int K = inst.num_devices();
  const int F = inst.num_tasks();
  const RateTable rates(inst);
  std::vector<DevicePlan> plans(K);
  parallel_for(static_cast<std::size_t>(K), [&](std::size_t ki) {
    const int k = static_cast<int>(ki);
    const auto& d = inst.device(k);
    std::vector<double> score(F);
    for (int f = 0; f < F; ++f) {
      score[f] = d.demand[f] * rates.r4(f) / inst.task(f).output_bits;
    }
    auto& plan = plans[k];
    plan.routes.assign(F, Route::kEdgeCompute);
    double cache = 0.0, energy = 0.0;
    take_prefix(plan, k, order_by(score), score, Route::kOutputCache, cache, energy, d.cache_bits,
                d.avg_energy,
                [&](int f) { return std::pair{inst.task(f).output_bits, 0.0}; }, false);
  });
  return routes_to_policy(inst, plans, trace);
}

ServicePolicy greedy_caching_computing_policy(const Instance& inst, GreedyTrace* trace) {
  const int K = inst.num_devices();
  const int F = inst.num_tasks();
  const RateTable rates(inst);
  std::vector<DevicePlan> plans(K);
  parallel_for(static_cast<std::size_t>(K), [&](std::size_t ki) {
    const int k = static_cast<int>(ki);
    const auto& d = inst.device(k);
    std::vector<double> joint(F), cache_score(F), compute_score(F);
    for (int f = 0; f < F; ++f) {
      const auto& t = inst.task(f);
      const double p = d.demand[f];
      const double e = inst.compute_energy(k, f);
      joint[f] = p * rates.r4(f) / (t.output_bits + e);
      cache_score[f] = p * rates.r4(f) / t.output_bits;
      compute_score[f] = ratio_or_zero(p * (rates.r4(f) - rates.r3(k, f)), e);
    }
    auto& plan = plans[k];
    plan.routes.assign(F, Route::kEdgeCompute);
    double cache = 0.0, energy = 0.0;
    take_prefix(plan, k, order_by(joint), joint, Route::kCachedInputCompute, cache, energy,
                d.cache_bits, d.avg_energy,
                [&](int f) { return std::pair{inst.task(f).input_bits, inst.compute_energy(k, f)}; },
                false);
    if (cache < d.cache_bits) {
      take_prefix(plan, k, order_by(cache_score), cache_score, Route::kOutputCache, cache, energy,
                  d.cache_bits, d.avg_energy,
                  [&](int f) { return std::pair{inst.task(f).output_bits, 0.0}; }, false);
    } else if (energy < d.avg_energy) {
      take_prefix(plan, k, order_by(compute_score), compute_score, Route::kLocalCompute, cache,
                  energy, d.cache_bits, d.avg_energy,
                  [&](int f) { return std::pair{0.0, inst.compute_energy(k, f)}; }, true);
    }
  });
  return routes_to_policy(inst, plans, trace);
}

double output_caching_objective(const Instance& inst, const SampleBatch& samples,
                                const std::vector<std::uint8_t>& cached) {
  if (samples.empty()) throw Error("output_caching_objective: empty sample list");
  double sum = 0.0;
  for (int f = 0; f < inst.num_tasks(); ++f) sum += task_output_term(inst, samples, f, cached);
  return sum;
}

ServicePolicy alpha_le1_greedy(const Instance& inst, const SampleBatch& samples,
                               GreedyTrace* trace) {
  check_alpha_le1(inst, "alpha_le1_greedy");
  if (samples.empty()) throw Error("alpha_le1_greedy: empty sample list");
  const int K = inst.num_devices();
  const int F = inst.num_tasks();
  std::vector<std::uint8_t> cached(static_cast<std::size_t>(K) * F, 0);
  std::vector<double> used(K, 0.0);
  std::vector<double> term(F);
  for (int f = 0; f < F; ++f) term[f] = task_output_term(inst, samples, f, cached);

  for (;;) {
    int best_k = -1, best_f = -1;
    double best_score = 0.0;
    // Task-major scan gives the task-then-device tie order.
    for (int f = 0; f < F; ++f) {
      const double o = inst.task(f).output_bits;
      for (int k = 0; k < K; ++k) {
        const auto i = static_cast<std::size_t>(k) * F + f;
        if (cached[i] || !within_budget(used[k] + o, inst.device(k).cache_bits)) continue;
        cached[i] = 1;
        const double decrease = term[f] - task_output_term(inst, samples, f, cached);
        cached[i] = 0;
        const double score = decrease / o;
        if (score > best_score) {
          best_score = score;
          best_k = k;
          best_f = f;
        }
      }
    }
    if (best_k < 0) break;
    cached[static_cast<std::size_t>(best_k) * F + best_f] = 1;
    used[best_k] += inst.task(best_f).output_bits;
    term[best_f] = task_output_term(inst, samples, best_f, cached);
    if (trace) {
      trace->steps.push_back({best_k, best_f, Route::kOutputCache, best_score, used[best_k], 0.0});
    }
  }

  ServicePolicy p = mec_computing_policy(inst);
  for (int k = 0; k < K; ++k) {
    for (int f = 0; f < F; ++f) {
      if (cached[static_cast<std::size_t>(k) * F + f]) p.assign(k, f, Route::kOutputCache);
    }
  }
  return p;
}

SubmodularityReport submodularity_check(const Instance& inst, const SampleBatch& samples,
                                        std::uint64_t trials, std::uint64_t seed) {
  check_alpha_le1(inst, "submodularity_check");
  const int K = inst.num_devices();
  const int F = inst.num_tasks();
  const std::size_t ground = static_cast<std::size_t>(K) * F;
  SubmodularityReport rep;
  const std::vector<std::uint8_t> none(ground, 0), all(ground, 1);
  const double g_empty = output_caching_objective(inst, samples, none);
  rep.full_set_value = output_caching_objective(inst, samples, all);
  if (ground < 2) return rep;
  const double tol = kRelTol * std::max(g_empty, 1e-300);

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> pick(0, ground - 1);
  auto g = [&](const std::vector<std::uint8_t>& set) {
    return output_caching_objective(inst, samples, set);
  };
  auto describe = [&](const char* what, const std::vector<std::uint8_t>& S,
                      const std::vector<std::uint8_t>& T, std::size_t e, double lhs, double rhs) {
    std::ostringstream os;
    auto bits = [&](const std::vector<std::uint8_t>& v) {
      std::string s;
      for (auto b : v) s.push_back(b ? '1' : '0');
      return s;
    };
    os << what << ": S=" << bits(S) << " T=" << bits(T) << " e=(" << e / F << "," << e % F
       << ") lhs=" << lhs << " rhs=" << rhs;
    return os.str();
  };

  std::vector<std::uint8_t> S(ground), T(ground);
  while (rep.trials < trials) {
    const double density = unit(rng);
    for (std::size_t i = 0; i < ground; ++i) T[i] = unit(rng) < density;
    std::size_t e = pick(rng);
    if (T[e]) T[e] = 0;
    const double keep = unit(rng);
    for (std::size_t i = 0; i < ground; ++i) S[i] = T[i] && unit(rng) < keep;

    const double gS = g(S), gT = g(T);
    S[e] = 1;
    const double gSe = g(S);
    S[e] = 0;
    T[e] = 1;
    const double gTe = g(T);
    T[e] = 0;
    ++rep.trials;

    if (gSe > gS + tol) {
      ++rep.monotonicity_violations;
      if (rep.counterexamples.size() < 8) rep.counterexamples.push_back(describe("increase", S, T, e, gSe, gS));
    }
    if (gSe - gS < gTe - gT - tol) {
      ++rep.diminishing_violations;
      if (rep.counterexamples.size() < 8) {
        rep.counterexamples.push_back(describe("diminishing", S, T, e, gSe - gS, gTe - gT));
      }
    }
  }
  return rep;
}

}  // namespace mecast
