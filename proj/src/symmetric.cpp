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

#include "mecast/symmetric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "mecast/bandwidth.hpp"
#include "mecast/csv.hpp"
#include "mecast/errors.hpp"
#include "mecast/sampling.hpp"

namespace mecast {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double multicast_factor(const SymmetricInstance& sym) {
  const double F = sym.num_tasks;
  return sym.inv_spectral_eff * (1.0 - std::pow(1.0 - 1.0 / F, sym.num_devices));
}

double det3(const double m[3][3]) {
  return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
         m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
         m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

}  // namespace

SymmetricInstance SymmetricInstance::from_betas(int F, int K, double I, double w, double alpha,
                                                double beta_c, double beta_e, double f1,
                                                double mu, double tau, double s) {
  SymmetricInstance sym;
  sym.num_tasks = F;
  sym.num_devices = K;
  sym.input_bits = I;
  sym.compute_load = w;
  sym.alpha = alpha;
  sym.output_bits = alpha * I;
  sym.cache_bits = beta_c * F * sym.output_bits;
  sym.avg_energy = beta_e * mu * I * w * f1 * f1;
  sym.cpu_freq = f1;
  sym.energy_coeff = mu;
  sym.deadline = tau;
  sym.inv_spectral_eff = s;
  return sym;
}

double SymmetricInstance::beta_c() const { return cache_bits / (num_tasks * output_bits); }

double SymmetricInstance::beta_e() const {
  return avg_energy / (energy_coeff * input_bits * compute_load * cpu_freq * cpu_freq);
}

double SymmetricInstance::r3() const {
  return input_bits / (deadline - input_bits * compute_load / cpu_freq);
}

double SymmetricInstance::r4() const { return output_bits / deadline; }

double SymmetricInstance::f1_route3_threshold() const {
  if (alpha <= 1.0) return kInf;
  return input_bits * compute_load / ((1.0 - 1.0 / alpha) * deadline);
}

double SymmetricInstance::f1_cache_threshold() const {
  if (!(cache_bits > 0.0)) return kInf;
  return std::sqrt(num_tasks * avg_energy / (energy_coeff * compute_load * cache_bits));
}

void validate_symmetric(const SymmetricInstance& sym) {
  if (sym.num_tasks < 1 || sym.num_devices < 1) throw Error("symmetric instance needs F, K >= 1");
  if (!(sym.input_bits > 0.0) || !(sym.compute_load > 0.0) || !(sym.output_bits > 0.0) ||
      !(sym.cpu_freq > 0.0) || !(sym.energy_coeff > 0.0) || !(sym.deadline > 0.0) ||
      !(sym.inv_spectral_eff > 0.0)) {
    throw Error("symmetric instance parameters must be positive");
  }
  if (sym.cache_bits < 0.0 || sym.avg_energy < 0.0) throw Error("budgets must be nonnegative");
  if (std::abs(sym.alpha - sym.output_bits / sym.input_bits) > 1e-12 * sym.alpha) {
    throw Error("alpha must equal O / I");
  }
  if (!(sym.input_bits * sym.compute_load / sym.cpu_freq < sym.deadline)) {
    throw Error("local computation does not fit in the deadline");
  }
}

std::string regime_name(SymmetricRegime r) {
  switch (r) {
    case SymmetricRegime::kAlphaAtMostOne:
      return "alpha<=1";
    case SymmetricRegime::kHighFreq:
      return "high-f1";
    case SymmetricRegime::kMidFreq:
      return "mid-f1";
    case SymmetricRegime::kLowFreq:
      return "low-f1";
  }
  return "unknown";
}

SymmetricRegime classify_regime(const SymmetricInstance& sym) {
  if (sym.alpha <= 1.0) return SymmetricRegime::kAlphaAtMostOne;
  // Compared through the budgets rather than the square root so that the
  // boundary is exact.
  if (sym.alpha * sym.beta_c() >= sym.beta_e()) return SymmetricRegime::kHighFreq;
  if (sym.cpu_freq > sym.f1_route3_threshold()) return SymmetricRegime::kMidFreq;
  return SymmetricRegime::kLowFreq;
}

RouteCounts optimal_counts(const SymmetricInstance& sym, bool floor_counts) {
  validate_symmetric(sym);
  const double F = sym.num_tasks;
  const double bc = sym.beta_c();
  const double be = sym.beta_e();
  RouteCounts c;
  if (sym.alpha > 1.0) {
    c.n[0] = F * std::max(bc - std::min(bc, be / sym.alpha), 0.0);
    c.n[1] = F * std::min(sym.alpha * bc, be);
    if (sym.cpu_freq > sym.f1_route3_threshold()) {
      c.n[2] = F * (be - std::min(sym.alpha * bc, be));
    }
  } else {
    c.n[0] = F * bc;
  }
  if (floor_counts) {
    for (int j = 0; j < 3; ++j) {
      const double down = std::floor(c.n[j] + 1e-9);
      c.integrality_gap += std::max(c.n[j] - down, 0.0);
      c.n[j] = down;
    }
    c.floored = true;
  }
  c.n[3] = F - c.n[0] - c.n[1] - c.n[2];
  return c;
}

bool counts_rule_applies(const SymmetricInstance& sym) {
  const RouteCounts c = optimal_counts(sym);
  return c.n[0] + c.n[1] + c.n[2] <= sym.num_tasks * (1.0 + 1e-12);
}

double closed_form_bandwidth(const SymmetricInstance& sym, const RouteCounts& counts) {
  const double F = sym.num_tasks;
  const double n4 = F - counts.n[0] - counts.n[1] - counts.n[2];
  return multicast_factor(sym) * (sym.r3() * counts.n[2] + sym.r4() * n4);
}

double mec_bandwidth(const SymmetricInstance& sym) {
  RouteCounts all4;
  all4.n[3] = sym.num_tasks;
  return closed_form_bandwidth(sym, all4);
}

GainResult gain_vs_mec(const SymmetricInstance& sym) {
  validate_symmetric(sym);
  GainResult g;
  g.regime = classify_regime(sym);
  const double a = sym.alpha;
  const double bc = sym.beta_c();
  const double be = sym.beta_e();
  switch (g.regime) {
    case SymmetricRegime::kAlphaAtMostOne:
      g.ratio = 1.0 - bc;
      break;
    case SymmetricRegime::kHighFreq:
      g.ratio = 1.0 - bc - (1.0 - 1.0 / a) * be;
      break;
    case SymmetricRegime::kMidFreq: {
      const double t = sym.deadline;
      const double slack = t - sym.input_bits * sym.compute_load / sym.cpu_freq;
      g.ratio = 1.0 - a * bc - (1.0 - t / (a * slack)) * (be - a * bc);
      break;
    }
    case SymmetricRegime::kLowFreq:
      g.ratio = 1.0 - a * bc;
      break;
  }
  return g;
}

double gain_vs_unicast(int num_tasks, int num_devices) {
  if (num_tasks < 1 || num_devices < 1) throw Error("gain_vs_unicast needs F, K >= 1");
  const double F = num_tasks;
  return F * (1.0 - std::pow(1.0 - 1.0 / F, num_devices)) / num_devices;
}

LpSolution symmetric_lp(const SymmetricInstance& sym) {
  validate_symmetric(sym);
  const double F = sym.num_tasks;
  // Rows of A n <= b.
  const double A[6][3] = {{sym.alpha, 1.0, 0.0}, {0.0, 1.0, 1.0},  {1.0, 1.0, 1.0},
                          {-1.0, 0.0, 0.0},      {0.0, -1.0, 0.0}, {0.0, 0.0, -1.0}};
  const double b[6] = {F * sym.alpha * sym.beta_c(), F * sym.beta_e(), F, 0.0, 0.0, 0.0};
  const double r3 = sym.r3(), r4 = sym.r4();
  const double scale = multicast_factor(sym);
  auto objective = [&](const double n[3]) {
    return scale * (r3 * n[2] + r4 * (F - n[0] - n[1] - n[2]));
  };
  const double tol = 1e-9 * std::max(F, 1.0);

  LpSolution best;
  best.objective = kInf;
  for (int i = 0; i < 6; ++i) {
    for (int j = i + 1; j < 6; ++j) {
      for (int k = j + 1; k < 6; ++k) {
        const int rows[3] = {i, j, k};
        double M[3][3];
        for (int r = 0; r < 3; ++r) {
          for (int c = 0; c < 3; ++c) M[r][c] = A[rows[r]][c];
        }
        const double det = det3(M);
        if (std::abs(det) < 1e-12) continue;
        double n[3];
        for (int c = 0; c < 3; ++c) {
          double Mc[3][3];
          for (int r = 0; r < 3; ++r) {
            for (int cc = 0; cc < 3; ++cc) Mc[r][cc] = cc == c ? b[rows[r]] : M[r][cc];
          }
          n[c] = det3(Mc) / det;
        }
        bool ok = true;
        for (int r = 0; r < 6 && ok; ++r) {
          const double lhs = A[r][0] * n[0] + A[r][1] * n[1] + A[r][2] * n[2];
          if (lhs > b[r] + tol) ok = false;
        }
        if (!ok) continue;
        ++best.vertices_checked;
        const double v = objective(n);
        if (v < best.objective) {
          best.objective = v;
          for (int c = 0; c < 3; ++c) best.n[c] = std::max(n[c], 0.0);
        }
      }
    }
  }
  if (best.vertices_checked == 0) throw Error("symmetric lp has no feasible vertex");
  return best;
}

SymmetricAnalysis analyze(const SymmetricInstance& sym) {
  SymmetricAnalysis a;
  a.beta_c = sym.beta_c();
  a.beta_e = sym.beta_e();
  a.counts = optimal_counts(sym);
  a.b_star = closed_form_bandwidth(sym, a.counts);
  a.b_mec = mec_bandwidth(sym);
  const double n4 = sym.num_tasks - a.counts.n[0] - a.counts.n[1] - a.counts.n[2];
  a.b_unicast = sym.inv_spectral_eff * sym.num_devices / sym.num_tasks *
                (sym.r3() * a.counts.n[2] + sym.r4() * n4);
  a.ratio_mec = a.b_star / a.b_mec;
  a.ratio_unicast = gain_vs_unicast(sym.num_tasks, sym.num_devices);
  a.regime = classify_regime(sym);
  return a;
}

Instance build_symmetric_instance(const SymmetricInstance& sym) {
  validate_symmetric(sym);
  Instance inst;
  inst.catalog.alpha = sym.alpha;
  inst.catalog.tasks.assign(sym.num_tasks,
                            TaskSpec{sym.input_bits, sym.compute_load, sym.output_bits});
  DeviceSpec dev;
  dev.cache_bits = sym.cache_bits;
  dev.avg_energy = sym.avg_energy;
  dev.cpu_freq = sym.cpu_freq;
  dev.inv_spectral_eff = sym.inv_spectral_eff;
  dev.demand.assign(sym.num_tasks, 1.0 / sym.num_tasks);
  inst.devices.assign(sym.num_devices, dev);
  inst.params.deadline = sym.deadline;
  inst.params.energy_coeff = sym.energy_coeff;
  return inst;
}

ServicePolicy counts_policy(const SymmetricInstance& sym, const RouteCounts& counts) {
  int bounds[3];
  int acc = 0;
  for (int j = 0; j < 3; ++j) {
    const double n = counts.n[j];
    if (std::abs(n - std::round(n)) > 1e-9) throw Error("counts_policy needs integer counts");
    acc += static_cast<int>(std::round(n));
    bounds[j] = acc;
  }
  if (acc > sym.num_tasks) throw Error("route counts exceed the task count");
  ServicePolicy x = ServicePolicy::uniform(sym.num_devices, sym.num_tasks, Route::kEdgeCompute);
  x.set_mode(PolicyMode::kBinary);
  for (int k = 0; k < sym.num_devices; ++k) {
    for (int f = 0; f < sym.num_tasks; ++f) {
      int j = 3;
      for (int r = 2; r >= 0; --r) {
        if (f < bounds[r]) j = r;
      }
      x.assign(k, f, kAllRoutes[j]);
    }
  }
  return x;
}

MonteCarloGain monte_carlo_unicast_gain(const SymmetricInstance& sym, std::size_t num_samples,
                                        std::uint64_t seed) {
  const Instance inst = build_symmetric_instance(sym);
  const ServicePolicy x = counts_policy(sym, optimal_counts(sym, true));
  const SampleBatch batch = draw_samples(inst, num_samples, seed);
  MonteCarloGain g;
  g.multicast = saa_objective(inst, x, batch);
  g.unicast = unicast_bandwidth(inst, x);
  g.ratio = g.multicast / g.unicast;
  return g;
}

void write_symmetric_grid_csv(std::ostream& out, const std::vector<SymmetricGridPoint>& rows) {
  csv::Writer w(out, "symmetric-grid",
                {"alpha", "beta_c", "beta_e", "f1", "regime", "ratio_mec", "ratio_unicast"});
  for (const auto& r : rows) {
    w.row(r.alpha, r.beta_c, r.beta_e, r.f1, regime_name(r.regime), r.ratio_mec,
          r.ratio_unicast);
  }
}

}  // namespace mecast
