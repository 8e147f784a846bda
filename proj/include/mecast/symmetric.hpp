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

// Symmetric scenario: identical tasks, identical devices, uniform demand.

#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "mecast/instance.hpp"

namespace mecast {

struct SymmetricInstance {
  int num_tasks = 1;       // F
  int num_devices = 1;     // K
  double input_bits = 1.0;   // I
  double compute_load = 1.0; // w, cycles per bit
  double output_bits = 1.0;  // O
  double alpha = 1.0;        // O / I
  double cache_bits = 0.0;   // C
  double avg_energy = 0.0;   // E, J
  double cpu_freq = 1.0;     // f1
  double energy_coeff = 0.0; // mu
  double deadline = 1.0;     // tau
  double inv_spectral_eff = 1.0;  // s

  // Fills O, C and E from the normalized budgets.
  static SymmetricInstance from_betas(int F, int K, double I, double w, double alpha,
                                      double beta_c, double beta_e, double f1, double mu,
                                      double tau, double s);

  double beta_c() const;
  double beta_e() const;
  double r3() const;  // I / (tau - I w / f1)
  double r4() const;  // O / tau
  // I w / ((1 - 1/alpha) tau); infinite when alpha <= 1.
  double f1_route3_threshold() const;
  // sqrt(F E / (mu w C)); infinite when C = 0.
  double f1_cache_threshold() const;
};

// Throws mecast::Error on inconsistent parameters.
void validate_symmetric(const SymmetricInstance& sym);

struct RouteCounts {
  std::array<double, kNumRoutes> n{};
  bool floored = false;
  double integrality_gap = 0.0;  // sum of the dropped fractional parts

  double total() const { return n[0] + n[1] + n[2] + n[3]; }
};

enum class SymmetricRegime { kAlphaAtMostOne, kHighFreq, kMidFreq, kLowFreq };
std::string regime_name(SymmetricRegime r);
SymmetricRegime classify_regime(const SymmetricInstance& sym);

// Counts from the closed-form rule. With floor_counts set, routes 1 to 3 are
// rounded down and route 4 takes the remainder.
RouteCounts optimal_counts(const SymmetricInstance& sym, bool floor_counts = false);

// True when the closed-form counts fit in F, i.e. n1 + n2 + n3 <= F.
bool counts_rule_applies(const SymmetricInstance& sym);

// s (1 - (1 - 1/F)^K) (R3 n3 + R4 (F - n1 - n2 - n3)), Hz.
double closed_form_bandwidth(const SymmetricInstance& sym, const RouteCounts& counts);
double mec_bandwidth(const SymmetricInstance& sym);

struct GainResult {
  double ratio = 1.0;
  SymmetricRegime regime = SymmetricRegime::kAlphaAtMostOne;
};
GainResult gain_vs_mec(const SymmetricInstance& sym);
double gain_vs_unicast(int num_tasks, int num_devices);

struct LpSolution {
  std::array<double, 3> n{};  // n1, n2, n3
  double objective = 0.0;     // Hz
  int vertices_checked = 0;
};
LpSolution symmetric_lp(const SymmetricInstance& sym);

struct SymmetricAnalysis {
  double beta_c = 0.0;
  double beta_e = 0.0;
  RouteCounts counts;
  double b_star = 0.0;
  double b_mec = 0.0;
  double b_unicast = 0.0;
  double ratio_mec = 1.0;
  double ratio_unicast = 1.0;
  SymmetricRegime regime = SymmetricRegime::kAlphaAtMostOne;
};
SymmetricAnalysis analyze(const SymmetricInstance& sym);

Instance build_symmetric_instance(const SymmetricInstance& sym);
// Tasks 0..n1-1 on route 1, the next n2 on route 2, the next n3 on route 3,
// the rest on route 4, for every device. Counts must be integers.
ServicePolicy counts_policy(const SymmetricInstance& sym, const RouteCounts& counts);

struct MonteCarloGain {
  double multicast = 0.0;  // SAA bandwidth, Hz
  double unicast = 0.0;    // Hz
  double ratio = 0.0;
};
// Floored closed-form policy against N drawn request states.
MonteCarloGain monte_carlo_unicast_gain(const SymmetricInstance& sym, std::size_t num_samples,
                                        std::uint64_t seed);

struct SymmetricGridPoint {
  double alpha = 0.0;
  double beta_c = 0.0;
  double beta_e = 0.0;
  double f1 = 0.0;
  SymmetricRegime regime = SymmetricRegime::kAlphaAtMostOne;
  double ratio_mec = 1.0;
  double ratio_unicast = 1.0;
};
void write_symmetric_grid_csv(std::ostream& out, const std::vector<SymmetricGridPoint>& rows);

}  // namespace mecast
