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

#include "mecast/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "mecast/csv.hpp"
#include "mecast/errors.hpp"
#include "mecast/parallel.hpp"

namespace mecast {

namespace {

constexpr double kTieRelTol = 1e-12;
constexpr int kMaxTableDevices = 10;

bool strictly_better(double candidate, double incumbent) {
  if (!(candidate < incumbent)) return false;
  return incumbent - candidate > kTieRelTol * std::abs(incumbent);
}

std::uint64_t pow4(int e) { return std::uint64_t{1} << (2 * e); }

// Budget-feasible route vectors of one device, lexicographic in
// (r_0, ..., r_{F-1}).
std::vector<std::vector<std::uint8_t>> feasible_assignments(const Instance& inst, int k,
                                                            std::uint64_t cap) {
  const int F = inst.num_tasks();
  if (2 * F >= 63 || pow4(F) > cap) {
    throw CapExceededError("enumerate_optimal: 4^F exceeds the search cap");
  }
  const auto& d = inst.device(k);
  std::vector<std::vector<std::uint8_t>> out;
  std::vector<std::uint8_t> r(F, 0);
  for (std::uint64_t code = 0; code < pow4(F); ++code) {
    for (int f = 0; f < F; ++f) {
      r[f] = static_cast<std::uint8_t>(code >> (2 * (F - 1 - f)) & 3u);
    }
    double cache = 0.0, energy = 0.0;
    for (int f = 0; f < F; ++f) {
      const auto& t = inst.task(f);
      if (r[f] == index_of(Route::kOutputCache)) cache += t.output_bits;
      if (r[f] == index_of(Route::kCachedInputCompute)) cache += t.input_bits;
      if (r[f] == index_of(Route::kCachedInputCompute) || r[f] == index_of(Route::kLocalCompute)) {
        energy += inst.compute_energy(k, f);
      }
    }
    if (within_budget(cache, d.cache_bits) && within_budget(energy, d.avg_energy)) out.push_back(r);
  }
  return out;
}

// w[f][S]: probability (exact) or sample frequency (SAA) that the set of
// devices requesting f is exactly S.
std::vector<std::vector<double>> requester_weights(const Instance& inst, const Objective& obj) {
  const int K = inst.num_devices();
  const int F = inst.num_tasks();
  const std::size_t subsets = std::size_t{1} << K;
  std::vector<std::vector<double>> w(F, std::vector<double>(subsets, 0.0));
  if (obj.kind == Objective::Kind::kExact) {
    for (int f = 0; f < F; ++f) {
      for (std::size_t S = 0; S < subsets; ++S) {
        double p = 1.0;
        for (int k = 0; k < K; ++k) {
          const double pk = inst.device(k).demand[f];
          p *= (S >> k & 1u) ? pk : 1.0 - pk;
        }
        w[f][S] = p;
      }
    }
    return w;
  }
  const auto& batch = *obj.samples;
  if (batch.empty()) throw Error("enumerate_optimal: empty sample list");
  if (batch.num_devices() != K) throw Error("sample batch does not match device count");
  std::vector<std::vector<std::uint64_t>> count(F, std::vector<std::uint64_t>(subsets, 0));
  std::vector<std::size_t> mask(F);
  for (std::size_t n = 0; n < batch.size(); ++n) {
    std::fill(mask.begin(), mask.end(), 0);
    for (int k = 0; k < K; ++k) mask[batch.task(k, n)] |= std::size_t{1} << k;
    for (int f = 0; f < F; ++f) ++count[f][mask[f]];
  }
  const double inv_n = 1.0 / static_cast<double>(batch.size());
  for (int f = 0; f < F; ++f) {
    for (std::size_t S = 0; S < subsets; ++S) w[f][S] = static_cast<double>(count[f][S]) * inv_n;
  }
  return w;
}

// table[f][col]: expected bandwidth of task f when device k uses route digit
// k of col (base 4).
std::vector<std::vector<double>> task_tables(const Instance& inst, const Objective& obj) {
  const int K = inst.num_devices();
  const int F = inst.num_tasks();
  const RateTable rates(inst);
  const auto w = requester_weights(inst, obj);
  const std::size_t cols = pow4(K);
  const std::size_t subsets = std::size_t{1} << K;
  std::vector<std::vector<double>> table(F, std::vector<double>(cols, 0.0));
  parallel_for(static_cast<std::size_t>(F), [&](std::size_t fi) {
    const int f = static_cast<int>(fi);
    for (std::size_t col = 0; col < cols; ++col) {
      double acc = 0.0;
      for (std::size_t S = 1; S < subsets; ++S) {
        if (w[f][S] == 0.0) continue;
        double spread_in = 0.0, rate_in = 0.0, spread_out = 0.0;
        for (int k = 0; k < K; ++k) {
          if (!(S >> k & 1u)) continue;
          const int r = static_cast<int>(col >> (2 * k) & 3u);
          const double s = inst.device(k).inv_spectral_eff;
          if (r == index_of(Route::kLocalCompute)) {
            spread_in = std::max(spread_in, s);
            rate_in = std::max(rate_in, rates.r3(k, f));
          } else if (r == index_of(Route::kEdgeCompute)) {
            spread_out = std::max(spread_out, s);
          }
        }
        acc += w[f][S] * (spread_in * rate_in + rates.r4(f) * spread_out);
      }
      table[f][col] = acc;
    }
  });
  return table;
}

struct BlockBest {
  double value = std::numeric_limits<double>::infinity();
  std::vector<std::size_t> choice;
};

}  // namespace

double evaluate(const Instance& instance, const ServicePolicy& policy,
                const Objective& objective) {
  if (objective.kind == Objective::Kind::kSaa) {
    return saa_objective(instance, policy, *objective.samples);
  }
  return exact_average_bandwidth(instance, policy);
}

OracleResult enumerate_optimal(const Instance& inst, const Objective& objective,
                               std::uint64_t search_cap) {
  const int K = inst.num_devices();
  const int F = inst.num_tasks();
  if (K > kMaxTableDevices) throw CapExceededError("enumerate_optimal: too many devices");

  std::vector<std::vector<std::vector<std::uint8_t>>> feasible(K);
  std::uint64_t combos = 1;
  for (int k = 0; k < K; ++k) {
    feasible[k] = feasible_assignments(inst, k, search_cap);
    const std::uint64_t n = feasible[k].size();
    if (combos > search_cap / n) {
      throw CapExceededError("enumerate_optimal: feasible combinations exceed the search cap");
    }
    combos *= n;
  }
  if (combos > search_cap) {
    throw CapExceededError("enumerate_optimal: feasible combinations exceed the search cap");
  }

  const auto table = task_tables(inst, objective);

  // contrib[k][o][f] = route digit of option o at task f, shifted to device k.
  std::vector<std::vector<std::vector<std::uint32_t>>> contrib(K);
  for (int k = 0; k < K; ++k) {
    contrib[k].resize(feasible[k].size());
    for (std::size_t o = 0; o < feasible[k].size(); ++o) {
      contrib[k][o].resize(F);
      for (int f = 0; f < F; ++f) {
        contrib[k][o][f] = static_cast<std::uint32_t>(feasible[k][o][f]) << (2 * k);
      }
    }
  }

  std::vector<BlockBest> blocks(feasible[0].size());
  parallel_for(blocks.size(), [&](std::size_t first) {
    std::vector<std::size_t> choice(K, 0);
    choice[0] = first;
    std::vector<std::uint32_t> col(F, 0);
    for (int k = 0; k < K; ++k) {
      for (int f = 0; f < F; ++f) col[f] += contrib[k][choice[k]][f];
    }
    BlockBest best;
    for (;;) {
      double v = 0.0;
      for (int f = 0; f < F; ++f) v += table[f][col[f]];
      if (best.choice.empty() || strictly_better(v, best.value)) {
        best.value = v;
        best.choice = choice;
      }
      int k = K - 1;
      for (; k >= 1; --k) {
        const std::size_t old = choice[k];
        const std::size_t next = old + 1 < feasible[k].size() ? old + 1 : 0;
        for (int f = 0; f < F; ++f) col[f] += contrib[k][next][f] - contrib[k][old][f];
        choice[k] = next;
        if (next != 0) break;
      }
      if (k < 1) break;
    }
    blocks[first] = std::move(best);
  });

  const BlockBest* best = &blocks[0];
  for (const auto& b : blocks) {
    if (strictly_better(b.value, best->value)) best = &b;
  }

  OracleResult result;
  std::vector<Route> routes(static_cast<std::size_t>(K) * F);
  for (int k = 0; k < K; ++k) {
    for (int f = 0; f < F; ++f) {
      routes[static_cast<std::size_t>(k) * F + f] =
          static_cast<Route>(feasible[k][best->choice[k]][f]);
    }
  }
  result.best_policy = ServicePolicy::from_routes(K, F, routes);
  result.policies_examined = combos;
  if (objective.kind == Objective::Kind::kExact) {
    try {
      result.best_value = exact_average_bandwidth(inst, result.best_policy);
    } catch (const CapExceededError&) {
      result.best_value = best->value;
    }
  } else {
    result.best_value = saa_objective(inst, result.best_policy, *objective.samples);
  }
  return result;
}

std::vector<KnapsackItem> single_user_knapsack_items(const Instance& inst, int k) {
  const auto& d = inst.device(k);
  const RateTable rates(inst);
  std::vector<KnapsackItem> items;
  items.reserve(static_cast<std::size_t>(inst.num_tasks()) * kNumRoutes);
  for (int f = 0; f < inst.num_tasks(); ++f) {
    const auto& t = inst.task(f);
    const double p = d.demand[f];
    const double saved_output = p * rates.r4(f) * d.inv_spectral_eff;
    const double energy = inst.compute_energy(k, f);
    items.push_back({f, Route::kOutputCache, saved_output, t.output_bits, 0.0});
    items.push_back({f, Route::kCachedInputCompute, saved_output, t.input_bits, energy});
    items.push_back({f, Route::kLocalCompute, p * (rates.r4(f) - rates.r3(k, f)) * d.inv_spectral_eff,
                     0.0, energy});
    items.push_back({f, Route::kEdgeCompute, 0.0, 0.0, 0.0});
  }
  return items;
}

ServicePolicy KnapsackSolution::policy() const {
  return ServicePolicy::from_routes(1, static_cast<int>(routes.size()), routes);
}

KnapsackSolution solve_single_user(const std::vector<KnapsackItem>& items, double cache_budget,
                                   double energy_budget) {
  if (cache_budget < 0.0 || energy_budget < 0.0) {
    throw std::invalid_argument("solve_single_user: negative budget");
  }
  int num_tasks = 0;
  for (const auto& it : items) num_tasks = std::max(num_tasks, it.task + 1);
  std::vector<std::vector<const KnapsackItem*>> by_task(num_tasks);
  for (const auto& it : items) by_task[it.task].push_back(&it);
  for (auto& group : by_task) {
    std::stable_sort(group.begin(), group.end(), [](const auto* a, const auto* b) {
      return index_of(a->route) < index_of(b->route);
    });
  }

  struct State {
    double cache;
    double energy;
    double profit;
    std::vector<Route> routes;
  };
  std::vector<State> front{{0.0, 0.0, 0.0, {}}};
  KnapsackSolution sol;
  for (int f = 0; f < num_tasks; ++f) {
    std::vector<State> next;
    for (const auto& s : front) {
      for (const auto* it : by_task[f]) {
        ++sol.states_examined;
        const double c = s.cache + it->cache_weight;
        const double e = s.energy + it->energy_weight;
        if (!within_budget(c, cache_budget) || !within_budget(e, energy_budget)) continue;
        State n{c, e, s.profit + it->value, s.routes};
        n.routes.push_back(it->route);
        next.push_back(std::move(n));
      }
    }
    if (next.empty()) throw std::invalid_argument("solve_single_user: task has no fitting item");
    // Keep states not dominated by an earlier-or-better one. Lexicographic
    // route order decides among identical triples.
    std::stable_sort(next.begin(), next.end(), [](const State& a, const State& b) {
      if (a.profit != b.profit) return a.profit > b.profit;
      if (a.cache != b.cache) return a.cache < b.cache;
      if (a.energy != b.energy) return a.energy < b.energy;
      return a.routes < b.routes;
    });
    std::vector<State> kept;
    for (auto& s : next) {
      bool dominated = false;
      for (const auto& q : kept) {
        if (q.cache <= s.cache && q.energy <= s.energy && q.profit >= s.profit) {
          dominated = true;
          break;
        }
      }
      if (!dominated) kept.push_back(std::move(s));
    }
    front = std::move(kept);
  }
  // Highest profit first; among equal profit, lexicographically smallest.
  const State* best = &front[0];
  for (const auto& s : front) {
    if (s.profit > best->profit || (s.profit == best->profit && s.routes < best->routes)) best = &s;
  }
  sol.routes = best->routes;
  sol.profit = best->profit;
  return sol;
}

std::uint64_t instance_hash(const Instance& inst) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](const void* data, std::size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
      h ^= p[i];
      h *= 0x100000001b3ULL;
    }
  };
  auto mix_d = [&mix](double v) { mix(&v, sizeof v); };
  const std::int32_t dims[2] = {inst.num_tasks(), inst.num_devices()};
  mix(dims, sizeof dims);
  mix_d(inst.catalog.alpha);
  for (const auto& t : inst.catalog.tasks) {
    mix_d(t.input_bits);
    mix_d(t.compute_load);
    mix_d(t.output_bits);
  }
  for (const auto& d : inst.devices) {
    mix_d(d.cache_bits);
    mix_d(d.avg_energy);
    mix_d(d.cpu_freq);
    mix_d(d.inv_spectral_eff);
    for (double p : d.demand) mix_d(p);
  }
  mix_d(inst.params.deadline);
  mix_d(inst.params.energy_coeff);
  return h;
}

void write_fixtures(std::ostream& out, const std::vector<OracleFixture>& fixtures) {
  csv::Writer w(out, "oracle-fixtures", {"instance_hash", "objective", "best_value", "policy"});
  for (const auto& fx : fixtures) {
    std::ostringstream hex;
    hex << std::hex << fx.instance_hash;
    w.row(hex.str(), fx.objective, fx.best_value, fx.policy);
  }
}

std::vector<OracleFixture> read_fixtures(std::istream& in) {
  const auto t = csv::read(in);
  const auto ch = t.column("instance_hash");
  const auto co = t.column("objective");
  const auto cv = t.column("best_value");
  const auto cp = t.column("policy");
  std::vector<OracleFixture> out;
  for (const auto& r : t.rows) {
    OracleFixture fx;
    fx.instance_hash = std::stoull(r[ch], nullptr, 16);
    fx.objective = r[co];
    fx.best_value = csv::to_double(r[cv]);
    fx.policy = r[cp];
    out.push_back(std::move(fx));
  }
  return out;
}

}  // namespace mecast
