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

// The two nontrivial ADMM updates, stated on their own small problems.
//
// Local step, one (sample, task) pair, normalized units. With v the
// unconstrained targets of the local copies of the requesting devices:
//
//   min  (a+b)^2/4 - (d/2)(a-b) + c ao
//        + (gamma/2) sum_k (x3_k - v3_k)^2 + (gamma/2) sum_k (x4_k - v4_k)^2
//   s.t. a >= e_k x3_k,  b >= r_k x3_k,  ao >= o_k x4_k,  a, b, ao >= 0.
//
// Global step, one device: Euclidean projection of a target onto
// {rows sum to 1, entries in [0,1], cache <= C, energy <= E}.

#pragma once

#include <vector>

namespace mecast {

struct LocalSubproblem {
  double d = 0.0;         // anchor a - b
  double out_coef = 0.0;  // c > 0
  double gamma = 1.0;
  std::vector<double> e, r, v3;  // route-3 requesters
  std::vector<double> o, v4;     // route-4 requesters (same devices)
};

struct LocalSolution {
  double a = 0.0;
  double b = 0.0;
  double ao = 0.0;
  std::vector<double> x3, x4;
  double kkt_residual = 0.0;  // distance of 0 from the subdifferential in a
};

// Exact minimizer. Throws ConvergenceError if the optimality residual
// exceeds its tolerance.
LocalSolution solve_local_subproblem(const LocalSubproblem& p);

double local_subproblem_objective(const LocalSubproblem& p, double a, double b, double ao,
                                  const std::vector<double>& x3, const std::vector<double>& x4);

// min over a, b >= 0 of (a+b)^2/4 - (d/2)(a-b) subject to a >= lo_a, b >= lo_b.
void best_auxiliaries(double d, double lo_a, double lo_b, double& a, double& b);

struct ProjectionProblem {
  int num_tasks = 0;
  std::vector<double> target;  // num_tasks x 4
  std::vector<double> cache_weight;
  std::vector<double> energy_weight;
  double cache_budget = 0.0;
  double energy_budget = 0.0;
};

struct ProjectionResult {
  std::vector<double> x;
  double lambda_cache = 0.0;
  double lambda_energy = 0.0;
  std::vector<double> mu;  // row multipliers
};

// Throws ConvergenceError if a multiplier search fails to bracket its root.
ProjectionResult project_device(const ProjectionProblem& p);

// x_j = clip(y_j - mu, 0, 1) with sum_j x_j = 1; returns mu.
double project_row(const double* y, double* x);

}  // namespace mecast
