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

#include "mecast/admm_steps.hpp"

#include <algorithm>
#include <array>
#include <boost/math/tools/toms748_solve.hpp>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <sstream>

#include "mecast/errors.hpp"
#include "mecast/instance.hpp"

namespace mecast {

namespace {

constexpr double kTieRelTol = 1e-12;
constexpr double kKktRelTol = 1e-9;
constexpr int kBisectionCap = 400;
constexpr int kBracketDoublings = 400;

// ao minimizing c ao + (gamma/2) sum max(0, v_k - ao / o_k)^2 over ao >= 0.
double solve_output(double c, double gamma, const std::vector<double>& o,
                    const std::vector<double>& v) {
  std::vector<std::size_t> idx;
  double s1 = 0.0, s2 = 0.0;
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (v[k] > 0.0) {
      idx.push_back(k);
      s1 += gamma * v[k] / o[k];
      s2 += gamma / (o[k] * o[k]);
    }
  }
  if (c - s1 >= 0.0) return 0.0;
  std::sort(idx.begin(), idx.end(),
            [&](std::size_t i, std::size_t j) { return o[i] * v[i] < o[j] * v[j]; });
  double lo = 0.0;
  for (std::size_t i = 0; i < idx.size();) {
    const double p = o[idx[i]] * v[idx[i]];
    const double root = (s1 - c) / s2;
    if (root < p) return std::max(root, lo);
    while (i < idx.size() && o[idx[i]] * v[idx[i]] == p) {
      const auto k = idx[i++];
      s1 -= gamma * v[k] / o[k];
      s2 -= gamma / (o[k] * o[k]);
    }
    lo = p;
  }
  return lo;
}

struct InputTerms {
  double d, gamma;
  const std::vector<double>& e;
  const std::vector<double>& r;
  const std::vector<double>& v;

  // Minimizer over b >= 0 for fixed a: smallest b whose right derivative
  //   (a+b+d)/2 - sum_{b < beta_k} (gamma/r_k)(v_k - b/r_k)
  // is nonnegative, beta_k = r_k min(v_k, a/e_k).
  double best_b(double a) const {
    std::vector<std::pair<double, std::size_t>> bp;
    double s1 = 0.0, s2 = 0.0;
    for (std::size_t k = 0; k < v.size(); ++k) {
      if (!(v[k] > 0.0)) continue;
      const double beta = r[k] * std::min(v[k], a / e[k]);
      if (!(beta > 0.0)) continue;
      bp.emplace_back(beta, k);
      s1 += gamma * v[k] / r[k];
      s2 += gamma / (r[k] * r[k]);
    }
    const double base = (a + d) / 2.0;
    if (base - s1 >= 0.0) return 0.0;
    std::sort(bp.begin(), bp.end());
    double lo = 0.0;
    for (std::size_t i = 0; i < bp.size();) {
      const double p = bp[i].first;
      const double root = (s1 - base) / (0.5 + s2);
      if (root < p) return std::max(root, lo);
      while (i < bp.size() && bp[i].first == p) {
        const auto k = bp[i++].second;
        s1 -= gamma * v[k] / r[k];
        s2 -= gamma / (r[k] * r[k]);
      }
      if (base + 0.5 * p - s1 + s2 * p >= 0.0) return p;
      lo = p;
    }
    return std::max(-(a + d), lo);
  }

  // [phi'(a-), phi'(a+)] for phi(a) = min_b F(a, b), at b = best_b(a).
  std::pair<double, double> subgradient(double a, double b) const {
    double ga = (a + b - d) / 2.0;
    double gb = (a + b + d) / 2.0;
    struct Tie {
      double wa, wb;
    };
    std::vector<Tie> ties;
    double sum_wa = 0.0, sum_wb = 0.0;
    for (std::size_t k = 0; k < v.size(); ++k) {
      if (!(v[k] > 0.0)) continue;
      const double ca = a / e[k];
      const double cb = b / r[k];
      const double excess = v[k] - std::min(ca, cb);
      if (!(excess > 0.0)) continue;
      if (std::abs(ca - cb) <= kTieRelTol * std::max(ca, cb)) {
        ties.push_back({gamma * excess / e[k], gamma * excess / r[k]});
        sum_wa += ties.back().wa;
        sum_wb += ties.back().wb;
      } else if (ca < cb) {
        ga -= gamma * excess / e[k];
      } else {
        gb -= gamma * excess / r[k];
      }
    }
    if (ties.empty()) return {ga, ga};
    // y_k in [0,1] is the share of tie k charged to b. sum wb y = gb when
    // b > 0, <= gb when b = 0; g = ga - sum wa + sum wa y.
    auto fill = [&](bool descending, double budget) {
      std::vector<std::size_t> idx(ties.size());
      std::iota(idx.begin(), idx.end(), 0);
      std::sort(idx.begin(), idx.end(), [&](std::size_t i, std::size_t j) {
        const double ri = ties[i].wa / ties[i].wb, rj = ties[j].wa / ties[j].wb;
        return descending ? ri > rj : ri < rj;
      });
      double got = 0.0;
      for (auto i : idx) {
        if (budget <= 0.0) break;
        const double y = std::min(1.0, budget / ties[i].wb);
        got += ties[i].wa * y;
        budget -= ties[i].wb * y;
      }
      return got;
    };
    const double base = ga - sum_wa;
    if (b > 0.0) {
      const double target = std::clamp(gb, 0.0, sum_wb);
      return {base + fill(false, target), base + fill(true, target)};
    }
    return {base, base + fill(true, std::clamp(gb, 0.0, sum_wb))};
  }
};

std::string at_pair(double residual) {
  std::ostringstream os;
  os << "local ADMM step: optimality residual " << residual << " above tolerance";
  return os.str();
}

}  // namespace

double local_subproblem_objective(const LocalSubproblem& p, double a, double b, double ao,
                                  const std::vector<double>& x3, const std::vector<double>& x4) {
  double val = (a + b) * (a + b) / 4.0 - p.d / 2.0 * (a - b) + p.out_coef * ao;
  for (std::size_t k = 0; k < x3.size(); ++k) {
    val += p.gamma / 2.0 * (x3[k] - p.v3[k]) * (x3[k] - p.v3[k]);
  }
  for (std::size_t k = 0; k < x4.size(); ++k) {
    val += p.gamma / 2.0 * (x4[k] - p.v4[k]) * (x4[k] - p.v4[k]);
  }
  return val;
}

void best_auxiliaries(double d, double lo_a, double lo_b, double& a, double& b) {
  a = std::max(lo_a, 0.0);
  b = std::max(lo_b, 0.0);
  if (a + b < d) {
    a = d - b;
  } else if (a + b < -d) {
    b = -d - a;
  }
}

LocalSolution solve_local_subproblem(const LocalSubproblem& p) {
  LocalSolution sol;
  sol.ao = solve_output(p.out_coef, p.gamma, p.o, p.v4);
  sol.x4.resize(p.v4.size());
  for (std::size_t k = 0; k < p.v4.size(); ++k) sol.x4[k] = std::min(p.v4[k], sol.ao / p.o[k]);

  const InputTerms in{p.d, p.gamma, p.e, p.r, p.v3};
  double a_hi = std::max(p.d, 0.0);
  double scale = 1.0 + std::abs(p.d);
  for (std::size_t k = 0; k < p.v3.size(); ++k) {
    a_hi = std::max(a_hi, p.e[k] * std::max(p.v3[k], 0.0));
    scale += p.gamma * std::abs(p.v3[k]) * (1.0 / p.e[k] + 1.0 / p.r[k]);
  }
  a_hi += 1.0;

  // phi' is piecewise linear in a, so secant steps land on the root once the
  // bracket sits inside one piece.
  double a = 0.0;
  const double accept = 0.1 * kKktRelTol * scale;
  const double g0max = in.subgradient(0.0, in.best_b(0.0)).second;
  if (g0max < -accept) {
    double lo = 0.0, hi = a_hi;
    double g_lo = g0max;
    double g_hi = in.subgradient(hi, in.best_b(hi)).first;
    bool exact = false;
    bool secant = true;
    int same_side = 0;
    bool last_lo = false;
    for (int it = 0; it < kBisectionCap; ++it) {
      double mid = lo + (hi - lo) / 2.0;
      if (secant && g_hi > g_lo) {
        const double t = lo + (-g_lo) * (hi - lo) / (g_hi - g_lo);
        if (t > lo && t < hi) mid = t;
      }
      if (!(mid > lo && mid < hi)) break;
      const auto [gmin, gmax] = in.subgradient(mid, in.best_b(mid));
      if (gmin <= accept && gmax >= -accept) {
        a = mid;
        exact = true;
        break;
      }
      const bool moved_lo = gmax < 0.0;
      if (moved_lo) {
        lo = mid;
        g_lo = gmax;
      } else {
        hi = mid;
        g_hi = gmin;
      }
      same_side = (it > 0 && moved_lo == last_lo) ? same_side + 1 : 0;
      last_lo = moved_lo;
      // A secant step that keeps landing on one side is stalling; halve once.
      secant = same_side < 2;
      if (!secant) same_side = 0;
    }
    if (!exact) a = lo + (hi - lo) / 2.0;
  }
  sol.a = a;
  sol.b = in.best_b(a);
  sol.x3.resize(p.v3.size());
  for (std::size_t k = 0; k < p.v3.size(); ++k) {
    sol.x3[k] = std::min({p.v3[k], sol.a / p.e[k], sol.b / p.r[k]});
  }
  const auto [gmin, gmax] = in.subgradient(sol.a, sol.b);
  sol.kkt_residual = sol.a > 0.0 ? std::max({0.0, gmin, -gmax}) : std::max(0.0, -gmax);
  if (sol.kkt_residual > kKktRelTol * scale) throw ConvergenceError(at_pair(sol.kkt_residual));
  return sol;
}

double project_row(const double* y, double* x) {
  std::array<double, 2 * kNumRoutes> bp;
  for (int j = 0; j < kNumRoutes; ++j) {
    bp[2 * j] = y[j] - 1.0;
    bp[2 * j + 1] = y[j];
  }
  std::sort(bp.begin(), bp.end());
  auto total = [&](double mu) {
    double s = 0.0;
    for (int j = 0; j < kNumRoutes; ++j) s += std::clamp(y[j] - mu, 0.0, 1.0);
    return s;
  };
  double mu = bp.back();
  double prev_mu = bp.front();
  double prev_s = total(prev_mu);
  for (std::size_t i = 1; i < bp.size(); ++i) {
    const double s = total(bp[i]);
    if (s <= 1.0) {
      mu = prev_s == s ? prev_mu
                       : prev_mu + (prev_s - 1.0) * (bp[i] - prev_mu) / (prev_s - s);
      break;
    }
    prev_mu = bp[i];
    prev_s = s;
  }
  for (int j = 0; j < kNumRoutes; ++j) x[j] = std::clamp(y[j] - mu, 0.0, 1.0);
  return mu;
}

ProjectionResult project_device(const ProjectionProblem& p) {
  const int F = p.num_tasks;
  const std::size_t n = static_cast<std::size_t>(F) * kNumRoutes;
  double w1_scale = 0.0, w2_scale = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    w1_scale = std::max(w1_scale, p.cache_weight[i]);
    w2_scale = std::max(w2_scale, p.energy_weight[i]);
  }
  const bool has_cache = w1_scale > 0.0;
  const bool has_energy = w2_scale > 0.0;
  const double c_budget = has_cache ? p.cache_budget / w1_scale : 0.0;
  const double e_budget = has_energy ? p.energy_budget / w2_scale : 0.0;
  std::vector<double> w1(n, 0.0), w2(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (has_cache) w1[i] = p.cache_weight[i] / w1_scale;
    if (has_energy) w2[i] = p.energy_weight[i] / w2_scale;
  }

  ProjectionResult res;
  res.x.assign(n, 0.0);
  res.mu.assign(F, 0.0);
  std::array<double, kNumRoutes> y;
  auto solve_rows = [&](double l1, double l2, double& u1, double& u2) {
    u1 = 0.0;
    u2 = 0.0;
    for (int f = 0; f < F; ++f) {
      const std::size_t o = static_cast<std::size_t>(f) * kNumRoutes;
      for (int j = 0; j < kNumRoutes; ++j) y[j] = p.target[o + j] - l1 * w1[o + j] - l2 * w2[o + j];
      res.mu[f] = project_row(y.data(), res.x.data() + o);
      for (int j = 0; j < kNumRoutes; ++j) {
        u1 += w1[o + j] * res.x[o + j];
        u2 += w2[o + j] * res.x[o + j];
      }
    }
  };

  // Smallest multiplier in [0, inf) at which usage(l) <= budget, for a
  // nonincreasing usage function.
  auto find_multiplier = [](const auto& excess) -> double {
    if (excess(0.0) <= 0.0) return 0.0;
    double lo = 0.0, hi = 1.0;
    int doublings = 0;
    while (excess(hi) > 0.0) {
      lo = hi;
      hi *= 2.0;
      if (++doublings > kBracketDoublings) {
        throw ConvergenceError("projection: cannot bracket budget multiplier");
      }
    }
    const double fhi = excess(hi);
    if (fhi == 0.0) return hi;
    std::uintmax_t iters = 200;
    const auto r = boost::math::tools::toms748_solve(
        excess, lo, hi, excess(lo), fhi, boost::math::tools::eps_tolerance<double>(52), iters);
    return excess(r.second) <= 0.0 ? r.second : hi;
  };

  auto inner = [&](double l2) {
    if (!has_cache) return 0.0;
    return find_multiplier([&](double l1) {
      double u1, u2;
      solve_rows(l1, l2, u1, u2);
      return u1 - c_budget;
    });
  };

  double l2 = 0.0;
  if (has_energy) {
    l2 = find_multiplier([&](double l) {
      const double l1 = inner(l);
      double u1, u2;
      solve_rows(l1, l, u1, u2);
      return u2 - e_budget;
    });
  }
  const double l1 = inner(l2);
  double u1, u2;
  solve_rows(l1, l2, u1, u2);
  res.lambda_cache = has_cache ? l1 / w1_scale : 0.0;
  res.lambda_energy = has_energy ? l2 / w2_scale : 0.0;
  return res;
}

}  // namespace mecast
