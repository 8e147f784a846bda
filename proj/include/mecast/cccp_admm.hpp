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

// Difference-of-convex reformulation of the sample-average problem, solved by
// a concave-convex outer loop whose convex subproblems go through consensus
// ADMM.
//
// The product a^I b^I is evaluated as (a+b)^2/4 - (a-b)^2/4. In raw units a^I
// is about 0.1 and b^I about 1e9, so the two squares cancel almost
// completely. All auxiliaries are therefore kept in scaled coordinates
//   a = u_f a^I,  b = v_f b^I,  ao = a^O / s_ref,
// with u_f v_f = 1 / B0 and u_f / v_f = R_f / s_ref, where s_ref = max_k s_k,
// R_f = max_k R3(k, f) and B0 = s_ref max_f R_f. Both scaled auxiliaries
// are at most 1 and bandwidth is measured in units of B0.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "mecast/bandwidth.hpp"
#include "mecast/instance.hpp"

namespace mecast {

struct DcScaling {
  double s_ref = 1.0;
  double unit = 1.0;           // B0, Hz
  std::vector<double> u;       // per task
  std::vector<double> v;       // per task
  std::vector<double> out_coef;  // (O_f / tau) s_ref / B0

  DcScaling() = default;
  DcScaling(const Instance& instance, const RateTable& rates);

  double e(const Instance& inst, int k, int f) const { return u[f] * inst.device(k).inv_spectral_eff; }
  double r(const RateTable& rates, int k, int f) const { return v[f] * rates.r3(k, f); }
  double o(const Instance& inst, int k) const { return inst.device(k).inv_spectral_eff / s_ref; }
};

// Auxiliaries over (sample, task), scaled, plus a relaxed policy.
struct DcState {
  std::size_t num_samples = 0;
  int num_tasks = 0;
  std::vector<double> a_in;   // n * F + f
  std::vector<double> b_in;
  std::vector<double> a_out;
  ServicePolicy x;

  std::size_t at(std::size_t n, int f) const { return n * num_tasks + f; }
};

// Auxiliaries set to their max definitions over the requesters of each
// (sample, task) under policy x.
DcState definition_consistent_state(const Instance& instance, const RateTable& rates,
                                    const DcScaling& scaling, const SampleBatch& samples,
                                    const ServicePolicy& x);

// (1/N) sum_n sum_f [(a+b)^2/4 - (a-b)^2/4 + c_f ao], in Hz.
double dc_objective(const Instance& instance, const DcScaling& scaling, const DcState& state);

// dc_objective - rho sum x (x - 1); rho in Hz.
double penalized_objective(const Instance& instance, const DcScaling& scaling,
                           const DcState& state, double rho);

// Convex surrogate with the concave parts linearized at `anchor`, without
// the linearization constant:
//   (1/N) sum [(a+b)^2/4 + c ao - ((a_t - b_t)/2)(a - b)] - rho sum (2 x_t - 1) x.
double cccp_subproblem_objective(const Instance& instance, const DcScaling& scaling,
                                 const DcState& state, const DcState& anchor, double rho);

// Constant C with surrogate + C = penalized at the anchor and
// surrogate + C >= penalized everywhere.
double linearization_constant(const DcScaling& scaling, const DcState& anchor, double rho);

struct SolverConfig {
  double delta = 1e-6;             // outer stopping tolerance, units of B0
  double residual_tol = 1e-5;      // consensus and x-change tolerance
  int max_outer = 60;
  int max_inner = 5000;
  double rho_initial = 1e4;        // Hz
  double rho_multiplier = 2.0;
  double rho_cap = 1e8;            // Hz
  double gamma = 1.0;              // ADMM penalty, scaled units
  bool adapt_gamma = true;         // residual balancing
  int max_gamma_changes = 20;
  double rounding_threshold = 1e-3;
  std::uint64_t seed = 1;          // unused by the deterministic solver, recorded
  bool trace_inner = false;        // one diagnostics row per inner iteration
  bool polish = true;              // single-row local search after each rounding
};

// Per-(sample, task) admm state and the global policy.
struct AdmmState {
  int num_devices = 0;
  int num_tasks = 0;
  std::size_t num_samples = 0;
  std::vector<double> locals;  // n * (K F 4) + policy offset
  std::vector<double> duals;
  std::vector<double> a_in, b_in, a_out;
  ServicePolicy x;
  ServicePolicy anchor_x;
  std::vector<double> anchor_d;  // a_t - b_t per (n, f)
  double gamma = 1.0;
  double rho = 1e4;  // Hz
  int outer = 0;
  int inner = 0;

  std::size_t block() const { return static_cast<std::size_t>(num_devices) * num_tasks * kNumRoutes; }
};

// Everything the updates need that does not change during a solve.
struct SolverContext {
  const Instance& instance;
  const SampleBatch& samples;
  RateTable rates;
  DcScaling scaling;

  SolverContext(const Instance& instance, const SampleBatch& samples);
};

// x, locals and duals from a starting policy; anchor at the same point.
AdmmState make_admm_state(const SolverContext& ctx, const ServicePolicy& start, double gamma,
                          double rho);

void admm_update_locals(const SolverContext& ctx, AdmmState& state);
void admm_update_global_x(const SolverContext& ctx, AdmmState& state);
void admm_update_duals(AdmmState& state);
// max |x^{k,n} - x|
double consensus_residual(const AdmmState& state);

struct DiagnosticsRow {
  int outer_iter = 0;
  int inner_iter = 0;
  double surrogate_value = 0.0;   // Hz, without the linearization constant
  double penalized_value = 0.0;   // Hz
  double consensus_residual = 0.0;
  double binary_gap = 0.0;
  double rho = 0.0;
  double gamma = 0.0;
};

struct RoundingReport {
  int rows_rounded = 0;   // fractional rows mapped to their argmax
  int rows_demoted = 0;   // route changes made by the repair pass
  int rows_polished = 0;  // improving single-row moves made by polish_policy
  double binary_gap_before = 0.0;
};

struct CccpResult {
  ServicePolicy policy;          // binary and feasible
  double objective = 0.0;        // SAA bandwidth of policy, Hz
  ServicePolicy relaxed;         // last relaxed iterate
  std::vector<DiagnosticsRow> diagnostics;
  std::vector<double> objective_trace;   // penalized value per outer iteration, Hz
  std::vector<double> surrogate_trace;   // G(t) - H(t; t-1) per outer iteration, Hz
  std::vector<int> rho_segment;          // index of the rho level per outer iteration
  std::vector<double> residual_trace;    // final consensus residual per outer iteration
  RoundingReport rounding;
  int outer_iterations = 0;
  int inner_iterations = 0;
  bool hit_iteration_cap = false;
  bool converged = false;
};

// Starts from all-route-4 and never returns a policy worse than it.
CccpResult solve_cccp_admm(const Instance& instance, const SampleBatch& samples,
                           const SolverConfig& config = {});

// Argmax per row, then demotion to route 4 until every budget holds.
ServicePolicy round_and_repair(const Instance& instance, const SampleBatch& samples,
                               const ServicePolicy& relaxed, RoundingReport* report = nullptr);

// First-improvement descent over single-row route changes that keep the
// policy feasible. Rows are visited in index order until a full sweep makes
// no move. Returns the number of moves.
int polish_policy(const Instance& instance, const SampleBatch& samples, ServicePolicy& policy);

void write_diagnostics_csv(std::ostream& out, const std::vector<DiagnosticsRow>& rows);

}  // namespace mecast
