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

#include "mecast/cccp_admm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>

#include "mecast/admm_steps.hpp"
#include "mecast/csv.hpp"
#include "mecast/errors.hpp"
#include "mecast/kernels.hpp"
#include "mecast/parallel.hpp"

namespace mecast {

namespace {

double cache_cost(const Instance& instance, int f, Route r) {
  if (r == Route::kOutputCache) return instance.task(f).output_bits;
  if (r == Route::kCachedInputCompute) return instance.task(f).input_bits;
  return 0.0;
}

double energy_cost(const Instance& instance, int k, int f, Route r) {
  if (r == Route::kCachedInputCompute || r == Route::kLocalCompute) return instance.compute_energy(k, f);
  return 0.0;
}

constexpr int kR3 = index_of(Route::kLocalCompute);
constexpr int kR4 = index_of(Route::kEdgeCompute);

std::size_t policy_offset(int num_tasks, int k, int f) {
  return (static_cast<std::size_t>(k) * num_tasks + f) * kNumRoutes;
}

void check_dims(const Instance& instance, const DcScaling& scaling, const DcState& state) {
  const std::size_t cells = state.num_samples * static_cast<std::size_t>(state.num_tasks);
  if (state.num_tasks != instance.num_tasks() ||
      static_cast<int>(scaling.u.size()) != instance.num_tasks() || state.a_in.size() != cells ||
      state.b_in.size() != cells || state.a_out.size() != cells ||
      state.x.num_devices() != instance.num_devices() ||
      state.x.num_tasks() != instance.num_tasks()) {
    throw Error("dc state dimensions do not match the instance");
  }
}

// Lower bounds of the auxiliaries of one (sample, task) under policy x.
struct AuxBounds {
  double a = 0.0;
  double b = 0.0;
  double ao = 0.0;
};

AuxBounds aux_bounds(const SolverContext& ctx, const ServicePolicy& x, std::size_t n, int f) {
  AuxBounds lo;
  for (int k = 0; k < ctx.instance.num_devices(); ++k) {
    if (ctx.samples.task(k, n) != f) continue;
    lo.a = std::max(lo.a, ctx.scaling.e(ctx.instance, k, f) * x(k, f, kR3));
    lo.b = std::max(lo.b, ctx.scaling.r(ctx.rates, k, f) * x(k, f, kR3));
    lo.ao = std::max(lo.ao, ctx.scaling.o(ctx.instance, k) * x(k, f, kR4));
  }
  return lo;
}

// Majorizer of the penalized objective built at `state.anchor_*`, minimized
// over the auxiliaries at policy x, including the linearization constant. Hz.
double majorizer_value(const SolverContext& ctx, const AdmmState& state, const ServicePolicy& x) {
  const int F = ctx.instance.num_tasks();
  double dc = 0.0;
  for (std::size_t n = 0; n < state.num_samples; ++n) {
    for (int f = 0; f < F; ++f) {
      const double d = state.anchor_d[n * F + f];
      const AuxBounds lo = aux_bounds(ctx, x, n, f);
      double a, b;
      best_auxiliaries(d, lo.a, lo.b, a, b);
      dc += (a + b) * (a + b) / 4.0 - 0.5 * d * (a - b) + d * d / 4.0 +
            ctx.scaling.out_coef[f] * lo.ao;
    }
  }
  dc /= static_cast<double>(state.num_samples);
  const auto xv = x.values();
  const auto xt = state.anchor_x.values();
  double pen = 0.0;
  for (std::size_t i = 0; i < xv.size(); ++i) pen += -(2.0 * xt[i] - 1.0) * xv[i] + xt[i] * xt[i];
  return ctx.scaling.unit * dc + state.rho * pen;
}

// Penalized objective at x with definition-consistent auxiliaries. Hz.
double penalized_at(const SolverContext& ctx, const ServicePolicy& x, double rho) {
  const DcState s = definition_consistent_state(ctx.instance, ctx.rates, ctx.scaling, ctx.samples, x);
  return penalized_objective(ctx.instance, ctx.scaling, s, rho);
}

void set_anchor(const SolverContext& ctx, AdmmState& state) {
  const int F = ctx.instance.num_tasks();
  state.anchor_x = state.x;
  state.anchor_d.assign(state.num_samples * F, 0.0);
  for (std::size_t n = 0; n < state.num_samples; ++n) {
    for (int f = 0; f < F; ++f) {
      const AuxBounds lo = aux_bounds(ctx, state.x, n, f);
      state.anchor_d[n * F + f] = lo.a - lo.b;
    }
  }
}

// Per-task SAA bandwidth of a policy, Hz.
double task_saa(const SolverContext& ctx, const ServicePolicy& x, int f) {
  const int K = ctx.instance.num_devices();
  std::vector<double> spread_in(K), rate_in(K), spread_out(K);
  for (int k = 0; k < K; ++k) {
    const double s = ctx.instance.device(k).inv_spectral_eff;
    spread_in[k] = s * x(k, f, kR3);
    rate_in[k] = ctx.rates.r3(k, f) * x(k, f, kR3);
    spread_out[k] = s * x(k, f, kR4);
  }
  const kernels::TaskStreamWeights w{spread_in.data(), rate_in.data(), spread_out.data(),
                                     ctx.rates.r4(f)};
  std::vector<double> totals(ctx.samples.size(), 0.0);
  kernels::active().accumulate_task_bandwidth(f, ctx.samples.data(), K, ctx.samples.size(), w,
                                              totals.data());
  double sum = 0.0;
  for (double t : totals) sum += t;
  return sum / static_cast<double>(ctx.samples.size());
}

}  // namespace

DcScaling::DcScaling(const Instance& instance, const RateTable& rates) {
  const int K = instance.num_devices();
  const int F = instance.num_tasks();
  s_ref = 0.0;
  for (int k = 0; k < K; ++k) s_ref = std::max(s_ref, instance.device(k).inv_spectral_eff);
  std::vector<double> r_ref(F, 0.0);
  double r_max = 0.0;
  for (int f = 0; f < F; ++f) {
    for (int k = 0; k < K; ++k) r_ref[f] = std::max(r_ref[f], rates.r3(k, f));
    r_max = std::max(r_max, r_ref[f]);
  }
  if (!(s_ref > 0.0) || !(r_max > 0.0)) throw Error("dc scaling needs positive rates");
  unit = s_ref * r_max;
  u.resize(F);
  v.resize(F);
  out_coef.resize(F);
  for (int f = 0; f < F; ++f) {
    const double rf = r_ref[f] > 0.0 ? r_ref[f] : r_max;
    u[f] = std::sqrt(rf / (s_ref * unit));
    v[f] = 1.0 / (unit * u[f]);
    out_coef[f] = rates.r4(f) * s_ref / unit;
  }
}

DcState definition_consistent_state(const Instance& instance, const RateTable& rates,
                                    const DcScaling& scaling, const SampleBatch& samples,
                                    const ServicePolicy& x) {
  if (samples.num_devices() != instance.num_devices()) {
    throw Error("sample batch device count does not match the instance");
  }
  const int F = instance.num_tasks();
  DcState s;
  s.num_samples = samples.size();
  s.num_tasks = F;
  s.a_in.assign(s.num_samples * F, 0.0);
  s.b_in.assign(s.num_samples * F, 0.0);
  s.a_out.assign(s.num_samples * F, 0.0);
  s.x = x;
  for (std::size_t n = 0; n < s.num_samples; ++n) {
    for (int k = 0; k < instance.num_devices(); ++k) {
      const int f = samples.task(k, n);
      const std::size_t i = s.at(n, f);
      s.a_in[i] = std::max(s.a_in[i], scaling.e(instance, k, f) * x(k, f, kR3));
      s.b_in[i] = std::max(s.b_in[i], scaling.r(rates, k, f) * x(k, f, kR3));
      s.a_out[i] = std::max(s.a_out[i], scaling.o(instance, k) * x(k, f, kR4));
    }
  }
  return s;
}

double dc_objective(const Instance& instance, const DcScaling& scaling, const DcState& state) {
  check_dims(instance, scaling, state);
  if (state.num_samples == 0) throw Error("dc objective over an empty sample set");
  double sum = 0.0;
  for (std::size_t n = 0; n < state.num_samples; ++n) {
    for (int f = 0; f < state.num_tasks; ++f) {
      const std::size_t i = state.at(n, f);
      const double a = state.a_in[i], b = state.b_in[i];
      sum += ((a + b) * (a + b) / 4.0 - (a - b) * (a - b) / 4.0) +
             scaling.out_coef[f] * state.a_out[i];
    }
  }
  return scaling.unit * sum / static_cast<double>(state.num_samples);
}

double penalized_objective(const Instance& instance, const DcScaling& scaling,
                           const DcState& state, double rho) {
  if (!(rho > 0.0)) throw Error("penalty weight must be positive");
  double pen = 0.0;
  for (double xi : state.x.values()) pen += xi * (xi - 1.0);
  return dc_objective(instance, scaling, state) - rho * pen;
}

double cccp_subproblem_objective(const Instance& instance, const DcScaling& scaling,
                                 const DcState& state, const DcState& anchor, double rho) {
  check_dims(instance, scaling, state);
  check_dims(instance, scaling, anchor);
  if (state.num_samples != anchor.num_samples) throw Error("anchor sample count mismatch");
  double sum = 0.0;
  for (std::size_t n = 0; n < state.num_samples; ++n) {
    for (int f = 0; f < state.num_tasks; ++f) {
      const std::size_t i = state.at(n, f);
      const double a = state.a_in[i], b = state.b_in[i];
      const double d = anchor.a_in[i] - anchor.b_in[i];
      sum += (a + b) * (a + b) / 4.0 + scaling.out_coef[f] * state.a_out[i] - 0.5 * d * (a - b);
    }
  }
  const auto xv = state.x.values();
  const auto xt = anchor.x.values();
  double pen = 0.0;
  for (std::size_t i = 0; i < xv.size(); ++i) pen += (2.0 * xt[i] - 1.0) * xv[i];
  return scaling.unit * sum / static_cast<double>(state.num_samples) - rho * pen;
}

double linearization_constant(const DcScaling& scaling, const DcState& anchor, double rho) {
  double sum = 0.0;
  for (std::size_t i = 0; i < anchor.a_in.size(); ++i) {
    const double d = anchor.a_in[i] - anchor.b_in[i];
    sum += d * d / 4.0;
  }
  double sq = 0.0;
  for (double xi : anchor.x.values()) sq += xi * xi;
  return scaling.unit * sum / static_cast<double>(anchor.num_samples) + rho * sq;
}

SolverContext::SolverContext(const Instance& inst, const SampleBatch& batch)
    : instance(inst), samples(batch), rates(inst), scaling(inst, rates) {
  if (batch.num_devices() != inst.num_devices()) {
    throw Error("sample batch device count does not match the instance");
  }
  if (batch.empty()) throw Error("solver needs at least one sample");
  for (int k = 0; k < inst.num_devices(); ++k) {
    for (std::size_t n = 0; n < batch.size(); ++n) {
      const int f = batch.task(k, n);
      if (f < 0 || f >= inst.num_tasks()) throw Error("sample task index out of range");
    }
  }
}

AdmmState make_admm_state(const SolverContext& ctx, const ServicePolicy& start, double gamma,
                          double rho) {
  if (!(gamma > 0.0) || !(rho > 0.0)) throw Error("admm penalties must be positive");
  AdmmState s;
  s.num_devices = ctx.instance.num_devices();
  s.num_tasks = ctx.instance.num_tasks();
  s.num_samples = ctx.samples.size();
  s.x = start;
  s.x.set_mode(PolicyMode::kRelaxed);
  s.gamma = gamma;
  s.rho = rho;
  const std::size_t B = s.block();
  s.locals.resize(B * s.num_samples);
  const auto xv = s.x.values();
  for (std::size_t n = 0; n < s.num_samples; ++n) std::copy(xv.begin(), xv.end(), s.locals.begin() + n * B);
  s.duals.assign(B * s.num_samples, 0.0);
  const std::size_t cells = s.num_samples * static_cast<std::size_t>(s.num_tasks);
  s.a_in.assign(cells, 0.0);
  s.b_in.assign(cells, 0.0);
  s.a_out.assign(cells, 0.0);
  set_anchor(ctx, s);
  return s;
}

void admm_update_locals(const SolverContext& ctx, AdmmState& state) {
  const int K = state.num_devices;
  const int F = state.num_tasks;
  const std::size_t B = state.block();
  const double rho_hat = state.rho / ctx.scaling.unit;
  const double g = state.gamma;
  const auto z = state.x.values();
  const auto xt = state.anchor_x.values();

  parallel_for(state.num_samples, [&](std::size_t n) {
    double* loc = state.locals.data() + n * B;
    const double* lam = state.duals.data() + n * B;
    for (std::size_t i = 0; i < B; ++i) loc[i] = z[i] + (rho_hat * (2.0 * xt[i] - 1.0) - lam[i]) / g;

    LocalSubproblem p;
    std::vector<int> who;
    for (int f = 0; f < F; ++f) {
      who.clear();
      for (int k = 0; k < K; ++k) {
        if (ctx.samples.task(k, n) == f) who.push_back(k);
      }
      const std::size_t cell = n * F + f;
      const double d = state.anchor_d[cell];
      if (who.empty()) {
        best_auxiliaries(d, 0.0, 0.0, state.a_in[cell], state.b_in[cell]);
        state.a_out[cell] = 0.0;
        continue;
      }
      p.d = d;
      p.out_coef = ctx.scaling.out_coef[f];
      p.gamma = g;
      p.e.clear();
      p.r.clear();
      p.v3.clear();
      p.o.clear();
      p.v4.clear();
      for (int k : who) {
        const std::size_t o = policy_offset(F, k, f);
        p.e.push_back(ctx.scaling.e(ctx.instance, k, f));
        p.r.push_back(ctx.scaling.r(ctx.rates, k, f));
        p.v3.push_back(loc[o + kR3]);
        p.o.push_back(ctx.scaling.o(ctx.instance, k));
        p.v4.push_back(loc[o + kR4]);
      }
      LocalSolution sol;
      try {
        sol = solve_local_subproblem(p);
      } catch (const ConvergenceError& e) {
        std::ostringstream os;
        os << e.what() << " (sample " << n << ", task " << f << ")";
        throw ConvergenceError(os.str());
      }
      for (std::size_t i = 0; i < who.size(); ++i) {
        const std::size_t o = policy_offset(F, who[i], f);
        loc[o + kR3] = sol.x3[i];
        loc[o + kR4] = sol.x4[i];
      }
      state.a_in[cell] = sol.a;
      state.b_in[cell] = sol.b;
      state.a_out[cell] = sol.ao;
    }
  });
}

void admm_update_global_x(const SolverContext& ctx, AdmmState& state) {
  const int F = state.num_tasks;
  const std::size_t B = state.block();
  const std::size_t row = static_cast<std::size_t>(F) * kNumRoutes;
  const auto& kt = kernels::active();
  const double inv_n = 1.0 / static_cast<double>(state.num_samples);

  parallel_for(static_cast<std::size_t>(state.num_devices), [&](std::size_t ku) {
    const int k = static_cast<int>(ku);
    const std::size_t base = static_cast<std::size_t>(k) * row;
    ProjectionProblem p;
    p.num_tasks = F;
    p.target.assign(row, 0.0);
    for (std::size_t n = 0; n < state.num_samples; ++n) {
      kt.accumulate_shifted(p.target.data(), state.locals.data() + n * B + base,
                            state.duals.data() + n * B + base, row, state.gamma);
    }
    for (double& t : p.target) t *= inv_n;
    p.cache_weight.assign(row, 0.0);
    p.energy_weight.assign(row, 0.0);
    for (int f = 0; f < F; ++f) {
      const std::size_t o = static_cast<std::size_t>(f) * kNumRoutes;
      const auto& t = ctx.instance.task(f);
      const double energy = ctx.instance.compute_energy(k, f);
      p.cache_weight[o + index_of(Route::kOutputCache)] = t.output_bits;
      p.cache_weight[o + index_of(Route::kCachedInputCompute)] = t.input_bits;
      p.energy_weight[o + index_of(Route::kCachedInputCompute)] = energy;
      p.energy_weight[o + index_of(Route::kLocalCompute)] = energy;
    }
    p.cache_budget = ctx.instance.device(k).cache_bits;
    p.energy_budget = ctx.instance.device(k).avg_energy;
    const ProjectionResult res = project_device(p);
    auto xv = state.x.values();
    std::copy(res.x.begin(), res.x.end(), xv.begin() + base);
  });
}

void admm_update_duals(AdmmState& state) {
  const std::size_t B = state.block();
  const auto& kt = kernels::active();
  const double* z = state.x.values().data();
  parallel_for(state.num_samples, [&](std::size_t n) {
    kt.dual_ascent(state.duals.data() + n * B, state.locals.data() + n * B, z, B, state.gamma);
  });
}

double consensus_residual(const AdmmState& state) {
  const std::size_t B = state.block();
  const auto& kt = kernels::active();
  const double* z = state.x.values().data();
  double r = 0.0;
  for (std::size_t n = 0; n < state.num_samples; ++n) {
    r = std::max(r, kt.max_abs_diff(state.locals.data() + n * B, z, B));
  }
  return r;
}

ServicePolicy round_and_repair(const Instance& instance, const SampleBatch& samples,
                               const ServicePolicy& relaxed, RoundingReport* report) {
  const int K = instance.num_devices();
  const int F = instance.num_tasks();
  RoundingReport rep;
  rep.binary_gap_before = relaxed.binary_gap();
  ServicePolicy x = ServicePolicy::uniform(K, F, Route::kEdgeCompute);
  x.set_mode(PolicyMode::kBinary);
  for (int k = 0; k < K; ++k) {
    for (int f = 0; f < F; ++f) {
      int best = 0;
      for (int j = 1; j < kNumRoutes; ++j) {
        if (relaxed(k, f, j) > relaxed(k, f, best)) best = j;
      }
      bool fractional = false;
      for (int j = 0; j < kNumRoutes; ++j) {
        const double v = relaxed(k, f, j);
        if (v != 0.0 && v != 1.0) fractional = true;
      }
      if (fractional) ++rep.rows_rounded;
      x.assign(k, f, kAllRoutes[best]);
    }
  }

  const SolverContext ctx(instance, samples);
  std::vector<double> task_bw(F);
  for (int f = 0; f < F; ++f) task_bw[f] = task_saa(ctx, x, f);
  // Cache first, then energy. A row demoted for the cache also frees its
  // energy, so the energy pass only sees what is left.
  for (int k = 0; k < K; ++k) {
    const auto& dev = instance.device(k);
    for (const bool cache_pass : {true, false}) {
      for (;;) {
        const double usage = cache_pass ? cache_usage(instance, x, k) : energy_usage(instance, x, k);
        const double budget = cache_pass ? dev.cache_bits : dev.avg_energy;
        if (within_budget(usage, budget)) break;
        const double excess = usage - budget;
        int pick = -1;
        Route pick_route = Route::kEdgeCompute;
        double pick_score = std::numeric_limits<double>::infinity();
        double pick_bw = 0.0;
        const double cache_now = cache_usage(instance, x, k);
        for (int f = 0; f < F; ++f) {
          const auto r = x.route(k, f);
          if (!r || *r == Route::kEdgeCompute) continue;
          const double held = cache_pass ? cache_cost(instance, f, *r) : energy_cost(instance, k, f, *r);
          for (const Route target : kAllRoutes) {
            if (target == *r) continue;
            const double kept =
                cache_pass ? cache_cost(instance, f, target) : energy_cost(instance, k, f, target);
            const double freed = held - kept;
            if (!(freed > 0.0)) continue;
            if (!cache_pass) {
              const double cache_after =
                  cache_now - cache_cost(instance, f, *r) + cache_cost(instance, f, target);
              if (!within_budget(cache_after, dev.cache_bits)) continue;
            }
            const double relief = std::min(freed, excess) / excess;
            ServicePolicy trial = x;
            trial.assign(k, f, target);
            const double bw = task_saa(ctx, trial, f);
            const double score = (bw - task_bw[f]) / relief;
            if (score < pick_score) {
              pick_score = score;
              pick = f;
              pick_route = target;
              pick_bw = bw;
            }
          }
        }
        if (pick < 0) throw Error("rounding repair found no row to demote");
        x.assign(k, pick, pick_route);
        task_bw[pick] = pick_bw;
        ++rep.rows_demoted;
      }
    }
  }
  if (report) *report = rep;
  return x;
}

int polish_policy(const Instance& instance, const SampleBatch& samples, ServicePolicy& policy) {
  const int K = instance.num_devices();
  const int F = instance.num_tasks();
  const SolverContext ctx(instance, samples);
  std::vector<double> task_bw(F);
  for (int f = 0; f < F; ++f) task_bw[f] = task_saa(ctx, policy, f);
  int moves = 0;
  for (bool moved = true; moved;) {
    moved = false;
    for (int k = 0; k < K; ++k) {
      const auto& dev = instance.device(k);
      for (int f = 0; f < F; ++f) {
        const Route current = *policy.route(k, f);
        const double cache_rest =
            cache_usage(instance, policy, k) - cache_cost(instance, f, current);
        const double energy_rest =
            energy_usage(instance, policy, k) - energy_cost(instance, k, f, current);
        Route best = current;
        double best_bw = task_bw[f];
        for (const Route target : kAllRoutes) {
          if (target == current) continue;
          if (!within_budget(cache_rest + cache_cost(instance, f, target), dev.cache_bits) ||
              !within_budget(energy_rest + energy_cost(instance, k, f, target), dev.avg_energy)) {
            continue;
          }
          policy.assign(k, f, target);
          const double bw = task_saa(ctx, policy, f);
          if (bw < best_bw * (1.0 - 1e-12)) {
            best = target;
            best_bw = bw;
          }
        }
        policy.assign(k, f, best);
        if (best != current) {
          task_bw[f] = best_bw;
          ++moves;
          moved = true;
        }
      }
    }
  }
  return moves;
}

CccpResult solve_cccp_admm(const Instance& instance, const SampleBatch& samples,
                           const SolverConfig& config) {
  if (!(config.delta > 0.0) || !(config.residual_tol > 0.0) || !(config.rounding_threshold > 0.0) ||
      !(config.gamma > 0.0) || !(config.rho_initial > 0.0) || !(config.rho_multiplier > 1.0) ||
      config.max_outer < 1 || config.max_inner < 1) {
    throw Error("solver configuration: tolerances and penalties must be positive");
  }
  const SolverContext ctx(instance, samples);
  const int K = instance.num_devices();
  const int F = instance.num_tasks();

  CccpResult out;
  ServicePolicy start = ServicePolicy::uniform(K, F, Route::kEdgeCompute);
  start.set_mode(PolicyMode::kBinary);
  out.policy = start;
  out.objective = saa_objective(instance, start, samples);

  AdmmState st = make_admm_state(ctx, start, config.gamma, config.rho_initial);
  const double tol_abs = config.delta * ctx.scaling.unit;
  double prev_value = penalized_at(ctx, st.x, st.rho);
  int segment = 0;
  bool stop = false;

  auto consider = [&](const ServicePolicy& relaxed) {
    RoundingReport rep;
    ServicePolicy cand = round_and_repair(instance, samples, relaxed, &rep);
    if (config.polish) rep.rows_polished = polish_policy(instance, samples, cand);
    const double obj = saa_objective(instance, cand, samples);
    if (obj < out.objective) {
      out.objective = obj;
      out.policy = cand;
      out.rounding = rep;
    }
  };

  while (!stop) {
    if (st.outer >= config.max_outer) {
      out.hit_iteration_cap = true;
      break;
    }
    ++st.outer;
    const ServicePolicy before = st.x;
    double residual = 0.0;
    int gamma_changes = 0;
    bool inner_done = false;
    for (int q = 1; q <= config.max_inner; ++q) {
      const ServicePolicy z_old = st.x;
      admm_update_locals(ctx, st);
      admm_update_global_x(ctx, st);
      admm_update_duals(st);
      ++st.inner;
      ++out.inner_iterations;
      residual = consensus_residual(st);
      const auto zn = st.x.values();
      const auto zo = z_old.values();
      const double dual_res =
          st.gamma * kernels::active().max_abs_diff(zn.data(), zo.data(), zn.size());
      if (config.trace_inner) {
        DiagnosticsRow row;
        row.outer_iter = st.outer;
        row.inner_iter = q;
        row.surrogate_value = majorizer_value(ctx, st, st.x);
        row.penalized_value = penalized_at(ctx, st.x, st.rho);
        row.consensus_residual = residual;
        row.binary_gap = st.x.binary_gap();
        row.rho = st.rho;
        row.gamma = st.gamma;
        out.diagnostics.push_back(row);
      }
      if (residual <= config.residual_tol && dual_res <= config.residual_tol) {
        inner_done = true;
        break;
      }
      if (config.adapt_gamma && q % 10 == 0 && gamma_changes < config.max_gamma_changes) {
        if (residual > 10.0 * dual_res) {
          st.gamma *= 2.0;
          ++gamma_changes;
        } else if (dual_res > 10.0 * residual) {
          st.gamma /= 2.0;
          ++gamma_changes;
        }
      }
    }
    if (!inner_done) out.hit_iteration_cap = true;

    double value = majorizer_value(ctx, st, st.x);
    const double at_anchor = penalized_at(ctx, before, st.rho);
    bool rejected = false;
    if (value > at_anchor) {
      // The inner solve did not improve on its own starting point.
      st.x = before;
      value = at_anchor;
      rejected = true;
    }
    out.surrogate_trace.push_back(value);
    out.objective_trace.push_back(penalized_at(ctx, st.x, st.rho));
    out.rho_segment.push_back(segment);
    out.residual_trace.push_back(residual);
    {
      DiagnosticsRow row;
      row.outer_iter = st.outer;
      row.inner_iter = 0;
      row.surrogate_value = value;
      row.penalized_value = out.objective_trace.back();
      row.consensus_residual = residual;
      row.binary_gap = st.x.binary_gap();
      row.rho = st.rho;
      row.gamma = st.gamma;
      out.diagnostics.push_back(row);
    }
    consider(st.x);

    const bool settled = rejected || prev_value - value <= tol_abs;
    prev_value = value;
    if (settled) {
      if (st.x.binary_gap() > config.rounding_threshold && st.rho < config.rho_cap) {
        st.rho = std::min(st.rho * config.rho_multiplier, config.rho_cap);
        ++segment;
        set_anchor(ctx, st);
        prev_value = penalized_at(ctx, st.x, st.rho);
        continue;
      }
      out.converged = inner_done || rejected;
      stop = true;
    } else {
      set_anchor(ctx, st);
    }
  }
  out.outer_iterations = st.outer;
  out.relaxed = st.x;
  return out;
}

void write_diagnostics_csv(std::ostream& out, const std::vector<DiagnosticsRow>& rows) {
  csv::Writer w(out, "cccp-diagnostics",
                {"outer_iter", "inner_iter", "surrogate_value", "penalized_value",
                 "consensus_residual", "binary_gap", "rho", "gamma"});
  for (const auto& r : rows) {
    w.row(r.outer_iter, r.inner_iter, r.surrogate_value, r.penalized_value, r.consensus_residual,
          r.binary_gap, r.rho, r.gamma);
  }
}

}  // namespace mecast
