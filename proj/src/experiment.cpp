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

#include "mecast/experiment.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>

#include <json.hpp>

#include "mecast/bandwidth.hpp"
#include "mecast/csv.hpp"
#include "mecast/errors.hpp"
#include "mecast/heuristics.hpp"
#include "mecast/kernels.hpp"
#include "mecast/oracle.hpp"
#include "mecast/parallel.hpp"
#include "mecast/sampling.hpp"

namespace mecast {

namespace pt = boost::property_tree;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_names(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text + ",") {
    if (c == ',' || c == ' ' || c == '\t') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  return out;
}

double parse_double(const std::string& key, const std::string& text) {
  const auto v = parse_list(text);
  if (v.size() != 1) throw Error("expected one number for " + key);
  return v[0];
}

std::uint64_t parse_u64(const std::string& key, const std::string& text) {
  const double v = parse_double(key, text);
  if (!(v >= 0.0) || v != std::floor(v)) throw Error(key + " must be a nonnegative integer");
  return static_cast<std::uint64_t>(v);
}

// Exact expectation only when F^K stays small.
bool exact_permitted(const Instance& inst) {
  double states = 1.0;
  for (int k = 0; k < inst.num_devices(); ++k) states *= inst.num_tasks();
  return states <= static_cast<double>(kDefaultStateCap);
}

struct Job {
  std::size_t point;
  std::size_t solver;
};

}  // namespace

std::string solver_name(SolverKind s) {
  switch (s) {
    case SolverKind::kOracle:
      return "oracle";
    case SolverKind::kCccpAdmm:
      return "cccp_admm";
    case SolverKind::kGreedyCache:
      return "greedy_cache";
    case SolverKind::kGreedyCacheCompute:
      return "greedy_cache_compute";
    case SolverKind::kMec:
      return "mec";
    case SolverKind::kAlphaLe1Greedy:
      return "alpha_le1_greedy";
  }
  return "unknown";
}

SolverKind parse_solver(const std::string& name) {
  for (auto s : {SolverKind::kOracle, SolverKind::kCccpAdmm, SolverKind::kGreedyCache,
                 SolverKind::kGreedyCacheCompute, SolverKind::kMec, SolverKind::kAlphaLe1Greedy}) {
    if (solver_name(s) == name) return s;
  }
  throw Error("unknown solver '" + name + "'");
}

std::string sweep_name(SweepVariable v) {
  switch (v) {
    case SweepVariable::kNone:
      return "none";
    case SweepVariable::kCacheFraction:
      return "cache_fraction";
    case SweepVariable::kCpuFreq:
      return "f1";
    case SweepVariable::kDevices:
      return "K";
    case SweepVariable::kBetaC:
      return "beta_c";
    case SweepVariable::kBetaE:
      return "beta_e";
  }
  return "unknown";
}

SweepVariable parse_sweep(const std::string& name) {
  for (auto v : {SweepVariable::kNone, SweepVariable::kCacheFraction, SweepVariable::kCpuFreq,
                 SweepVariable::kDevices, SweepVariable::kBetaC, SweepVariable::kBetaE}) {
    if (sweep_name(v) == name) return v;
  }
  throw Error("unknown sweep variable '" + name + "'");
}

void apply_solver_keys(const std::map<std::string, std::string>& keys, SolverConfig& c) {
  for (const auto& [key, value] : keys) {
    if (key == "delta") {
      c.delta = parse_double(key, value);
    } else if (key == "residual_tol") {
      c.residual_tol = parse_double(key, value);
    } else if (key == "max_outer") {
      c.max_outer = static_cast<int>(parse_u64(key, value));
    } else if (key == "max_inner") {
      c.max_inner = static_cast<int>(parse_u64(key, value));
    } else if (key == "rho_initial") {
      c.rho_initial = parse_double(key, value);
    } else if (key == "rho_multiplier") {
      c.rho_multiplier = parse_double(key, value);
    } else if (key == "rho_cap") {
      c.rho_cap = parse_double(key, value);
    } else if (key == "gamma") {
      c.gamma = parse_double(key, value);
    } else if (key == "rounding_threshold") {
      c.rounding_threshold = parse_double(key, value);
    } else if (key == "adapt_gamma") {
      c.adapt_gamma = parse_u64(key, value) != 0;
    } else if (key == "polish") {
      c.polish = parse_u64(key, value) != 0;
    } else if (key == "seed") {
      c.seed = parse_u64(key, value);
    } else {
      throw Error("[solver] unknown key '" + key + "'");
    }
  }
}

ExperimentPlan parse_plan_ini(std::istream& in, const std::string& base_dir) {
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ptree_error& e) {
    throw Error(std::string("plan config: ") + e.what());
  }
  ExperimentPlan plan;
  std::optional<double> deadline, cache_fraction;
  for (const auto& [section, body] : tree) {
    if (section == "plan") {
      for (const auto& [key, node] : body) {
        const std::string value = trim(node.data());
        if (key == "instance") {
          plan.instance_source = value;
        } else if (key == "deadline") {
          deadline = parse_double(key, value);
        } else if (key == "cache_fraction") {
          cache_fraction = parse_double(key, value);
        } else if (key == "solvers") {
          for (const auto& s : split_names(value)) plan.solvers.push_back(parse_solver(s));
        } else if (key == "sweep") {
          plan.sweep = parse_sweep(value);
        } else if (key == "values") {
          plan.values = parse_list(value);
        } else if (key == "samples") {
          plan.num_samples = parse_u64(key, value);
        } else if (key == "seed") {
          plan.seed = parse_u64(key, value);
        } else if (key == "exact") {
          if (value == "auto") {
            plan.exact = ExactMode::kAuto;
          } else if (value == "yes") {
            plan.exact = ExactMode::kAlways;
          } else if (value == "no") {
            plan.exact = ExactMode::kNever;
          } else {
            throw Error("[plan] exact must be auto, yes or no");
          }
        } else if (key == "output") {
          plan.output = value;
        } else {
          throw Error("[plan] unknown key '" + key + "'");
        }
      }
    } else if (section == "solver") {
      std::map<std::string, std::string> keys;
      for (const auto& [key, node] : body) keys[key] = trim(node.data());
      apply_solver_keys(keys, plan.solver);
    } else {
      throw Error("plan config: unknown section [" + section + "]");
    }
  }
  if (plan.instance_source == "reference") {
    plan.recipe = reference_recipe(deadline.value_or(2.5e-3), cache_fraction.value_or(0.175));
  } else {
    if (deadline || cache_fraction) {
      throw Error("[plan] deadline and cache_fraction apply to the reference instance only");
    }
    std::filesystem::path p(plan.instance_source);
    if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
    plan.recipe = load_instance_recipe(p.string());
  }
  validate_plan(plan);
  return plan;
}

ExperimentPlan load_plan(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open plan " + path);
  return parse_plan_ini(in, std::filesystem::path(path).parent_path().string());
}

void validate_plan(const ExperimentPlan& plan) {
  if (plan.solvers.empty()) throw Error("plan lists no solvers");
  if (plan.num_samples < 1) throw Error("plan needs at least one sample");
  if (plan.sweep != SweepVariable::kNone && plan.values.empty()) {
    throw Error("plan sweep has no values");
  }
  if (plan.sweep == SweepVariable::kNone && plan.values.size() > 1) {
    throw Error("plan lists values but no sweep variable");
  }
  if (plan.sweep == SweepVariable::kDevices) {
    for (double v : plan.values) {
      if (!(v >= 1.0) || v != std::floor(v)) throw Error("K sweep values must be positive integers");
    }
  }
}

InstanceRecipe recipe_at(const ExperimentPlan& plan, double value) {
  InstanceRecipe r = plan.recipe;
  auto& d = r.devices;
  switch (plan.sweep) {
    case SweepVariable::kNone:
      break;
    case SweepVariable::kCacheFraction:
      d.cache_fraction = value;
      break;
    case SweepVariable::kCpuFreq:
      d.cpu_freq = {value};
      break;
    case SweepVariable::kDevices: {
      const int K = static_cast<int>(value);
      auto broadcast_only = [](const std::vector<double>& v, const char* key) {
        if (v.size() > 1) throw Error(std::string("K sweep needs a single value for ") + key);
      };
      broadcast_only(d.cache_bits, "cache_bits");
      broadcast_only(d.avg_energy, "avg_energy");
      broadcast_only(d.cpu_freq, "cpu_freq");
      if (!d.inv_spectral_eff_step) broadcast_only(d.inv_spectral_eff, "inv_spectral_eff");
      if (d.popularity == "explicit") throw Error("K sweep cannot resize explicit demand rows");
      d.count = K;
      break;
    }
    case SweepVariable::kBetaC:
    case SweepVariable::kBetaE: {
      const Instance base = build_instance(r);
      if (plan.sweep == SweepVariable::kBetaC) {
        d.cache_fraction.reset();
        d.cache_bits = {value * base.catalog.total_output_bits()};
      } else {
        double mean_load = 0.0;
        for (const auto& t : base.catalog.tasks) mean_load += t.input_bits * t.compute_load;
        mean_load /= base.num_tasks();
        d.avg_energy.clear();
        for (const auto& dev : base.devices) {
          d.avg_energy.push_back(value * base.params.energy_coeff * dev.cpu_freq * dev.cpu_freq *
                                 mean_load);
        }
      }
      break;
    }
  }
  return r;
}

ExperimentResult run_plan(const ExperimentPlan& plan) {
  validate_plan(plan);
  const auto t0 = Clock::now();
  std::vector<double> values = plan.values;
  if (values.empty()) values.push_back(0.0);
  const std::size_t P = values.size();
  const std::size_t S = plan.solvers.size();

  // Instances, samples and the MEC reference per sweep point.
  std::vector<Instance> instances(P);
  std::vector<SampleBatch> batches(P);
  std::vector<double> mec_ref(P);
  parallel_for(P, [&](std::size_t p) {
    instances[p] = build_instance(recipe_at(plan, values[p]));
    const auto report = validate_instance(instances[p]);
    if (!report) {
      std::string msg = "instance invalid at " + sweep_name(plan.sweep) + " = " + csv::format(values[p]);
      msg += ": " + report.violation;
      throw Error(msg);
    }
    batches[p] = draw_samples(instances[p], plan.num_samples, plan.seed);
    mec_ref[p] = saa_objective(instances[p], mec_computing_policy(instances[p]), batches[p]);
  });

  ExperimentResult result;
  result.rows.resize(P * S);
  parallel_for(P * S, [&](std::size_t job) {
    const std::size_t p = job / S;
    const SolverKind kind = plan.solvers[job % S];
    const Instance& inst = instances[p];
    const SampleBatch& batch = batches[p];
    const auto tj = Clock::now();
    ExperimentRow row;
    row.sweep = sweep_name(plan.sweep);
    row.value = values[p];
    row.solver = kind;
    row.num_devices = inst.num_devices();
    row.num_tasks = inst.num_tasks();
    row.num_samples = batch.size();
    row.seed = plan.seed;
    ServicePolicy policy;
    row.status = "ok";
    switch (kind) {
      case SolverKind::kOracle: {
        const OracleResult r = enumerate_optimal(inst, Objective::saa(batch));
        policy = r.best_policy;
        row.iterations = static_cast<int>(std::min<std::uint64_t>(r.policies_examined, INT32_MAX));
        break;
      }
      case SolverKind::kCccpAdmm: {
        const CccpResult r = solve_cccp_admm(inst, batch, plan.solver);
        policy = r.policy;
        row.iterations = r.outer_iterations;
        if (r.hit_iteration_cap) row.status = "iteration_cap";
        else if (!r.converged) row.status = "not_converged";
        break;
      }
      case SolverKind::kGreedyCache:
        policy = greedy_caching_policy(inst);
        break;
      case SolverKind::kGreedyCacheCompute:
        policy = greedy_caching_computing_policy(inst);
        break;
      case SolverKind::kMec:
        policy = mec_computing_policy(inst);
        break;
      case SolverKind::kAlphaLe1Greedy:
        policy = alpha_le1_greedy(inst, batch);
        break;
    }
    row.saa_bandwidth = saa_objective(inst, policy, batch);
    const bool want_exact = plan.exact == ExactMode::kAlways ||
                            (plan.exact == ExactMode::kAuto && exact_permitted(inst));
    if (want_exact) row.exact_bandwidth = exact_average_bandwidth(inst, policy);
    row.reduction_vs_mec = 100.0 * (1.0 - row.saa_bandwidth / mec_ref[p]);
    row.feasible = static_cast<bool>(is_feasible(inst, policy));
    row.policy = policy.encode();
    row.wall_seconds = seconds_since(tj);
    result.rows[job] = std::move(row);
  });
  result.wall_seconds = seconds_since(t0);
  result.worker_threads = worker_threads();
  result.kernel_backend = std::string(kernels::backend_name(kernels::active_backend()));
  return result;
}

void write_experiment_csv(std::ostream& out, const ExperimentResult& result) {
  csv::Writer w(out, "experiment",
                {"sweep", "value", "solver", "num_devices", "num_tasks", "num_samples", "seed",
                 "saa_bandwidth_hz", "exact_bandwidth_hz", "reduction_vs_mec_pct", "feasible",
                 "iterations", "status", "policy"});
  for (const auto& r : result.rows) {
    w.row(r.sweep, r.value, solver_name(r.solver), r.num_devices, r.num_tasks, r.num_samples,
          static_cast<std::int64_t>(r.seed), r.saa_bandwidth,
          r.exact_bandwidth ? csv::format(*r.exact_bandwidth) : std::string(), r.reduction_vs_mec,
          r.feasible ? 1 : 0, r.iterations, r.status, r.policy);
  }
}

void write_manifest_json(std::ostream& out, const ExperimentPlan& plan,
                         const ExperimentResult& result, const std::string& command) {
  nlohmann::json j;
  j["tool"] = "mecast";
  j["version"] = MECAST_VERSION;
  j["command"] = command;
  j["seed"] = plan.seed;
  j["num_samples"] = plan.num_samples;
  j["instance"] = plan.instance_source;
  j["sweep"] = sweep_name(plan.sweep);
  j["values"] = plan.values;
  j["worker_threads"] = result.worker_threads;
  j["kernel_backend"] = result.kernel_backend;
  j["wall_seconds"] = result.wall_seconds;
  nlohmann::json solver;
  solver["delta"] = plan.solver.delta;
  solver["residual_tol"] = plan.solver.residual_tol;
  solver["max_outer"] = plan.solver.max_outer;
  solver["max_inner"] = plan.solver.max_inner;
  solver["rho_initial"] = plan.solver.rho_initial;
  solver["rho_multiplier"] = plan.solver.rho_multiplier;
  solver["rho_cap"] = plan.solver.rho_cap;
  solver["gamma"] = plan.solver.gamma;
  solver["rounding_threshold"] = plan.solver.rounding_threshold;
  solver["polish"] = plan.solver.polish;
  j["solver_config"] = solver;
  nlohmann::json timings = nlohmann::json::array();
  for (const auto& r : result.rows) {
    timings.push_back({{"value", r.value}, {"solver", solver_name(r.solver)},
                       {"wall_seconds", r.wall_seconds}});
  }
  j["timings"] = timings;
  out << j.dump(2) << '\n';
}

void write_plot_script(std::ostream& out, const std::string& csv_path,
                       const std::string& sweep_label) {
  out << "# gnuplot script generated by mecast\n"
      << "set datafile separator ','\n"
      << "set key autotitle columnhead\n"
      << "set xlabel '" << sweep_label << "'\n"
      << "set ylabel 'average bandwidth (Hz)'\n"
      << "set grid\n"
      << "solvers = system(\"awk -F, 'NR>2 {print $3}' " << csv_path
      << " | awk '!seen[$0]++' | tr '\\n' ' '\")\n"
      << "plot for [s in solvers] '< grep -v \"^#\" " << csv_path
      << "' using (strcol(3) eq s ? $2 : NaN):8 with linespoints title s\n";
}

SymmetricSweep parse_symmetric_sweep(const std::string& name) {
  for (auto s : {SymmetricSweep::kBetaC, SymmetricSweep::kBetaE, SymmetricSweep::kCpuFreq,
                 SymmetricSweep::kDevices, SymmetricSweep::kAlpha}) {
    if (symmetric_sweep_name(s) == name) return s;
  }
  throw Error("unknown symmetric sweep '" + name + "'");
}

std::string symmetric_sweep_name(SymmetricSweep s) {
  switch (s) {
    case SymmetricSweep::kBetaC:
      return "beta_c";
    case SymmetricSweep::kBetaE:
      return "beta_e";
    case SymmetricSweep::kCpuFreq:
      return "f1";
    case SymmetricSweep::kDevices:
      return "K";
    case SymmetricSweep::kAlpha:
      return "alpha";
  }
  return "unknown";
}

std::vector<SymmetricRow> symmetric_report(const SymmetricPlan& plan) {
  if (plan.values.empty()) throw Error("symmetric report needs sweep values");
  validate_symmetric(plan.base);
  std::vector<SymmetricRow> rows(plan.values.size());
  parallel_for(plan.values.size(), [&](std::size_t i) {
    const double v = plan.values[i];
    SymmetricInstance s = plan.base;
    switch (plan.sweep) {
      case SymmetricSweep::kBetaC:
        s.cache_bits = v * s.num_tasks * s.output_bits;
        break;
      case SymmetricSweep::kBetaE:
        s.avg_energy = v * s.energy_coeff * s.input_bits * s.compute_load * s.cpu_freq * s.cpu_freq;
        break;
      case SymmetricSweep::kCpuFreq:
        s.cpu_freq = v;
        break;
      case SymmetricSweep::kDevices:
        if (!(v >= 1.0) || v != std::floor(v)) throw Error("K values must be positive integers");
        s.num_devices = static_cast<int>(v);
        break;
      case SymmetricSweep::kAlpha: {
        // Keep beta_c fixed while O changes.
        const double bc = s.beta_c();
        s.alpha = v;
        s.output_bits = v * s.input_bits;
        s.cache_bits = bc * s.num_tasks * s.output_bits;
        break;
      }
    }
    validate_symmetric(s);
    SymmetricRow row;
    const GainResult g = gain_vs_mec(s);
    row.point.alpha = s.alpha;
    row.point.beta_c = s.beta_c();
    row.point.beta_e = s.beta_e();
    row.point.f1 = s.cpu_freq;
    row.point.regime = g.regime;
    row.point.ratio_mec = g.ratio;
    row.point.ratio_unicast = gain_vs_unicast(s.num_tasks, s.num_devices);
    row.num_tasks = s.num_tasks;
    row.num_devices = s.num_devices;
    row.counts = optimal_counts(s);
    row.lp_ratio = symmetric_lp(s).objective / mec_bandwidth(s);
    if (plan.mc_samples > 0) {
      row.mc_ratio_unicast = monte_carlo_unicast_gain(s, plan.mc_samples, plan.seed).ratio;
    }
    rows[i] = row;
  });
  return rows;
}

void write_symmetric_report_csv(std::ostream& out, const std::vector<SymmetricRow>& rows) {
  csv::Writer w(out, "symmetric-report",
                {"alpha", "beta_c", "beta_e", "f1", "regime", "ratio_mec", "ratio_unicast",
                 "num_tasks", "num_devices", "n1", "n2", "n3", "n4", "lp_ratio_mec",
                 "mc_ratio_unicast"});
  for (const auto& r : rows) {
    const auto& p = r.point;
    w.row(p.alpha, p.beta_c, p.beta_e, p.f1, regime_name(p.regime), p.ratio_mec, p.ratio_unicast,
          r.num_tasks, r.num_devices, r.counts.n[0], r.counts.n[1], r.counts.n[2], r.counts.n[3],
          r.lp_ratio, r.mc_ratio_unicast ? csv::format(*r.mc_ratio_unicast) : std::string());
  }
}

}  // namespace mecast
