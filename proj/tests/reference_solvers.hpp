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


// Dense reference solvers for the two ADMM updates. They share nothing with
// the library beyond the problem structs.

#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "mecast/admm_steps.hpp"
#include "mecast/bandwidth.hpp"
#include "mecast/cccp_admm.hpp"
#include "mecast/instance.hpp"

namespace mecast::testing {

struct QpPoint {
  Eigen::VectorXd z;
  double value = std::numeric_limits<double>::infinity();
};

// Local step as a dense QP over z = (a, b, ao, x3, x4), solved by checking
// the KKT system of every active set. Exact up to round-off for small K.
inline QpPoint local_step_by_active_sets(const LocalSubproblem& p) {
  const int K = static_cast<int>(p.v3.size());
  const int n = 3 + 2 * K;
  const int m = 3 * K + 3;
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd g = Eigen::VectorXd::Zero(n);
  H(0, 0) = H(0, 1) = H(1, 0) = H(1, 1) = 0.5;
  g(0) = -p.d / 2.0;
  g(1) = p.d / 2.0;
  g(2) = p.out_coef;
  for (int k = 0; k < K; ++k) {
    H(3 + k, 3 + k) = p.gamma;
    H(3 + K + k, 3 + K + k) = p.gamma;
    g(3 + k) = -p.gamma * p.v3[k];
    g(3 + K + k) = -p.gamma * p.v4[k];
  }
  // G z >= 0.
  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(m, n);
  for (int k = 0; k < K; ++k) {
    G(3 * k, 0) = 1.0;
    G(3 * k, 3 + k) = -p.e[k];
    G(3 * k + 1, 1) = 1.0;
    G(3 * k + 1, 3 + k) = -p.r[k];
    G(3 * k + 2, 2) = 1.0;
    G(3 * k + 2, 3 + K + k) = -p.o[k];
  }
  G(3 * K, 0) = G(3 * K + 1, 1) = G(3 * K + 2, 2) = 1.0;

  QpPoint best;
  for (std::uint32_t mask = 0; mask < (1u << m); ++mask) {
    std::vector<int> act;
    for (int i = 0; i < m; ++i) {
      if (mask >> i & 1u) act.push_back(i);
    }
    const int s = static_cast<int>(act.size());
    if (s > n) continue;
    Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(n + s, n + s);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + s);
    kkt.topLeftCorner(n, n) = H;
    rhs.head(n) = -g;
    for (int i = 0; i < s; ++i) {
      kkt.block(0, n + i, n, 1) = -G.row(act[i]).transpose();
      kkt.block(n + i, 0, 1, n) = G.row(act[i]);
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(kkt);
    if (lu.rank() < n + s) continue;
    const Eigen::VectorXd sol = lu.solve(rhs);
    const Eigen::VectorXd z = sol.head(n);
    if ((sol.tail(s).array() < -1e-10).any()) continue;
    if (((G * z).array() < -1e-10).any()) continue;
    const double val = 0.5 * z.dot(H * z) + g.dot(z);
    if (val < best.value) {
      best.value = val;
      best.z = z;
    }
  }
  return best;
}

// Row projection onto {sum = 1, 0 <= x <= 1} by bisection on the shift.
inline void project_row_bisect(const double* y, double* x) {
  double lo = *std::min_element(y, y + kNumRoutes) - 1.0;
  double hi = *std::max_element(y, y + kNumRoutes);
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    double s = 0.0;
    for (int j = 0; j < kNumRoutes; ++j) s += std::clamp(y[j] - mid, 0.0, 1.0);
    (s > 1.0 ? lo : hi) = mid;
  }
  for (int j = 0; j < kNumRoutes; ++j) x[j] = std::clamp(y[j] - 0.5 * (lo + hi), 0.0, 1.0);
}

// Global step by accelerated projected gradient ascent on the two budget
// multipliers, with rows projected exactly for fixed multipliers.
inline std::vector<double> global_step_by_dual_gradient(const ProjectionProblem& p) {
  const std::size_t n = p.target.size();
  double s1 = 0.0, s2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    s1 = std::max(s1, p.cache_weight[i]);
    s2 = std::max(s2, p.energy_weight[i]);
  }
  std::vector<double> w1(n, 0.0), w2(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (s1 > 0) w1[i] = p.cache_weight[i] / s1;
    if (s2 > 0) w2[i] = p.energy_weight[i] / s2;
  }
  const double c = s1 > 0 ? p.cache_budget / s1 : 0.0;
  const double e = s2 > 0 ? p.energy_budget / s2 : 0.0;
  double lip = 0.0;
  for (std::size_t i = 0; i < n; ++i) lip += w1[i] * w1[i] + w2[i] * w2[i];
  const double step = 1.0 / std::max(lip, 1e-12);

  std::vector<double> x(n), y(n);
  auto primal = [&](double l1, double l2) {
    for (std::size_t i = 0; i < n; ++i) y[i] = p.target[i] - l1 * w1[i] - l2 * w2[i];
    for (int f = 0; f < p.num_tasks; ++f) project_row_bisect(&y[f * kNumRoutes], &x[f * kNumRoutes]);
  };
  double l1 = 0.0, l2 = 0.0, m1 = 0.0, m2 = 0.0, t = 1.0;
  for (int it = 0; it < 20000; ++it) {
    primal(m1, m2);
    double g1 = -c, g2 = -e;
    for (std::size_t i = 0; i < n; ++i) {
      g1 += w1[i] * x[i];
      g2 += w2[i] * x[i];
    }
    const double n1 = s1 > 0 ? std::max(0.0, m1 + step * g1) : 0.0;
    const double n2 = s2 > 0 ? std::max(0.0, m2 + step * g2) : 0.0;
    const double tn = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    m1 = n1 + (t - 1.0) / tn * (n1 - l1);
    m2 = n2 + (t - 1.0) / tn * (n2 - l2);
    m1 = std::max(m1, 0.0);
    m2 = std::max(m2, 0.0);
    l1 = n1;
    l2 = n2;
    t = tn;
  }
  primal(l1, l2);
  return x;
}

inline LocalSubproblem random_local(std::mt19937_64& rng, const Instance& inst, int K) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const RateTable rates(inst);
  const DcScaling sc(inst, rates);
  const int f = static_cast<int>(rng() % inst.num_tasks());
  LocalSubproblem p;
  p.d = 2.0 * u(rng) - 1.0;
  p.out_coef = sc.out_coef[f];
  p.gamma = std::pow(10.0, 2.0 * u(rng) - 1.0);
  for (int k = 0; k < K; ++k) {
    p.e.push_back(sc.e(inst, k, f));
    p.r.push_back(sc.r(rates, k, f));
    p.o.push_back(sc.o(inst, k));
    p.v3.push_back(2.0 * u(rng) - 0.5);
    p.v4.push_back(2.0 * u(rng) - 0.5);
  }
  return p;
}

inline ProjectionProblem random_projection(std::mt19937_64& rng, const Instance& inst, int k) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const int F = inst.num_tasks();
  ProjectionProblem p;
  p.num_tasks = F;
  p.target.resize(F * kNumRoutes);
  p.cache_weight.assign(F * kNumRoutes, 0.0);
  p.energy_weight.assign(F * kNumRoutes, 0.0);
  for (int f = 0; f < F; ++f) {
    for (int j = 0; j < kNumRoutes; ++j) p.target[f * kNumRoutes + j] = 1.6 * u(rng) - 0.3;
    p.cache_weight[f * kNumRoutes + 0] = inst.task(f).output_bits;
    p.cache_weight[f * kNumRoutes + 1] = inst.task(f).input_bits;
    p.energy_weight[f * kNumRoutes + 1] = inst.compute_energy(k, f);
    p.energy_weight[f * kNumRoutes + 2] = inst.compute_energy(k, f);
  }
  p.cache_budget = inst.device(k).cache_bits;
  p.energy_budget = inst.device(k).avg_energy;
  return p;
}

}  // namespace mecast::testing
