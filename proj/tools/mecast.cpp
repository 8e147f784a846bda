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

// mecast command-line driver.

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "mecast/bandwidth.hpp"
#include "mecast/cccp_admm.hpp"
#include "mecast/config.hpp"
#include "mecast/csv.hpp"
#include "mecast/errors.hpp"
#include "mecast/experiment.hpp"
#include "mecast/heuristics.hpp"
#include "mecast/kernels.hpp"
#include "mecast/oracle.hpp"
#include "mecast/parallel.hpp"
#include "mecast/sampling.hpp"
#include "mecast/symmetric.hpp"

namespace {

using namespace mecast;

struct InstanceArgs {
  std::string source = "reference";
  double deadline = 2.5e-3;
  double cache_fraction = 0.175;

  void add(CLI::App* app) {
    app->add_option("-i,--instance", source, "instance ini path, or 'reference'");
    app->add_option("--deadline", deadline, "reference instance deadline (s)");
    app->add_option("--cache-fraction", cache_fraction, "reference instance C / sum I");
  }

  Instance load() const {
    const InstanceRecipe r = source == "reference" ? reference_recipe(deadline, cache_fraction)
                                                   : load_instance_recipe(source);
    return build_instance(r);
  }
};

struct SolverFlags {
  std::map<std::string, double> values;

  void add(CLI::App* app) {
    for (const char* key : {"delta", "residual_tol", "max_outer", "max_inner", "rho_initial",
                            "rho_multiplier", "rho_cap", "gamma", "rounding_threshold", "polish"}) {
      std::string flag = std::string("--") + key;
      for (auto& c : flag) {
        if (c == '_') c = '-';
      }
      app->add_option_function<double>(
          flag, [this, key](const double& v) { values[key] = v; }, std::string("solver ") + key);
    }
  }

  std::map<std::string, std::string> as_keys() const {
    std::map<std::string, std::string> keys;
    for (const auto& [k, v] : values) {
      std::ostringstream os;
      os.precision(17);
      os << v;
      keys[k] = os.str();
    }
    return keys;
  }
};

std::ostream& open_output(const std::string& path, std::ofstream& file) {
  if (path.empty() || path == "-") return std::cout;
  file.open(path);
  if (!file) throw Error("cannot write " + path);
  return file;
}

ServicePolicy run_solver(SolverKind kind, const Instance& inst, const SampleBatch& batch,
                         const SolverConfig& config, CccpResult* cccp) {
  switch (kind) {
    case SolverKind::kOracle:
      return enumerate_optimal(inst, Objective::saa(batch)).best_policy;
    case SolverKind::kCccpAdmm: {
      CccpResult r = solve_cccp_admm(inst, batch, config);
      if (cccp) *cccp = r;
      return r.policy;
    }
    case SolverKind::kGreedyCache:
      return greedy_caching_policy(inst);
    case SolverKind::kGreedyCacheCompute:
      return greedy_caching_computing_policy(inst);
    case SolverKind::kMec:
      return mec_computing_policy(inst);
    case SolverKind::kAlphaLe1Greedy:
      return alpha_le1_greedy(inst, batch);
  }
  throw Error("unknown solver");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mecast: caching, computing and multicast bandwidth for edge tasks"};
  app.require_subcommand(1);
  int threads = 1;
  std::string kernel = "auto";
  app.add_option("-j,--threads", threads, "worker threads (0: all cores)");
  app.add_option("--kernels", kernel, "kernel backend: auto, scalar or avx2")
      ->check(CLI::IsMember({"auto", "scalar", "avx2"}));

  // validate
  auto* validate = app.add_subcommand("validate", "check an instance and optionally a policy");
  InstanceArgs v_inst;
  v_inst.add(validate);
  std::string v_policy;
  validate->add_option("--policy", v_policy, "policy encoding, one digit 1-4 per (device, task)");

  // solve
  auto* solve = app.add_subcommand("solve", "run one solver on one instance");
  InstanceArgs s_inst;
  s_inst.add(solve);
  std::string s_solver = "cccp_admm";
  std::size_t s_samples = 200;
  std::uint64_t s_seed = 1;
  std::string s_diag, s_samples_in;
  SolverFlags s_flags;
  solve->add_option("-s,--solver", s_solver, "solver name");
  solve->add_option("-n,--samples", s_samples, "number of request samples");
  solve->add_option("--seed", s_seed, "sample seed");
  solve->add_option("--samples-file", s_samples_in, "read samples from a CSV instead of drawing");
  solve->add_option("--diagnostics", s_diag, "write solver diagnostics CSV");
  s_flags.add(solve);

  // compare
  auto* compare = app.add_subcommand("compare", "run several solvers on one instance");
  InstanceArgs c_inst;
  c_inst.add(compare);
  std::string c_solvers = "cccp_admm,greedy_cache_compute,greedy_cache,mec";
  std::size_t c_samples = 200;
  std::uint64_t c_seed = 1;
  std::string c_out;
  SolverFlags c_flags;
  compare->add_option("--solvers", c_solvers, "comma separated solver names");
  compare->add_option("-n,--samples", c_samples, "number of request samples");
  compare->add_option("--seed", c_seed, "sample seed");
  compare->add_option("-o,--output", c_out, "CSV output path");
  c_flags.add(compare);

  // sweep
  auto* sweep = app.add_subcommand("sweep", "run an experiment plan");
  std::string w_plan, w_out, w_manifest, w_plot;
  std::size_t w_samples = 0;
  std::uint64_t w_seed = 0;
  SolverFlags w_flags;
  sweep->add_option("plan", w_plan, "plan ini")->required();
  sweep->add_option("-o,--output", w_out, "CSV output path");
  sweep->add_option("--manifest", w_manifest, "JSON run manifest path");
  sweep->add_option("--plot", w_plot, "gnuplot script path");
  auto* w_samples_opt = sweep->add_option("-n,--samples", w_samples, "number of request samples");
  auto* w_seed_opt = sweep->add_option("--seed", w_seed, "sample seed");
  w_flags.add(sweep);

  // symmetric
  auto* symmetric = app.add_subcommand("symmetric", "symmetric closed forms over a sweep");
  int y_F = 10, y_K = 4;
  double y_I = 10e6, y_w = 10.0, y_alpha = 3.0, y_bc = 0.2, y_be = 0.3, y_f1 = 1.1e11;
  double y_mu = 1e-27, y_tau = 2.5e-3, y_s = 0.25;
  std::string y_sweep = "beta_c", y_values = "0,0.05,0.1,0.15,0.2,0.25,0.3", y_out;
  std::size_t y_mc = 0;
  std::uint64_t y_seed = 1;
  symmetric->add_option("--tasks", y_F, "F");
  symmetric->add_option("--devices", y_K, "K");
  symmetric->add_option("--input-bits", y_I, "I");
  symmetric->add_option("--compute-load", y_w, "w (cycles per bit)");
  symmetric->add_option("--alpha", y_alpha, "O / I");
  symmetric->add_option("--beta-c", y_bc, "C / (F O)");
  symmetric->add_option("--beta-e", y_be, "E / (mu I w f1^2)");
  symmetric->add_option("--f1", y_f1, "cpu frequency (cycles/s)");
  symmetric->add_option("--mu", y_mu, "energy coefficient");
  symmetric->add_option("--deadline", y_tau, "tau (s)");
  symmetric->add_option("--inv-spectral-eff", y_s, "s");
  symmetric->add_option("--sweep", y_sweep, "beta_c, beta_e, f1, K or alpha");
  symmetric->add_option("--values", y_values, "comma separated sweep values");
  symmetric->add_option("--mc-samples", y_mc, "Monte-Carlo samples per point (0: skip)");
  symmetric->add_option("--seed", y_seed, "Monte-Carlo seed");
  symmetric->add_option("-o,--output", y_out, "CSV output path");

  // dump-samples
  auto* dump = app.add_subcommand("dump-samples", "write drawn request samples as CSV");
  InstanceArgs d_inst;
  d_inst.add(dump);
  std::size_t d_samples = 200;
  std::uint64_t d_seed = 1;
  std::string d_out;
  dump->add_option("-n,--samples", d_samples, "number of request samples");
  dump->add_option("--seed", d_seed, "sample seed");
  dump->add_option("-o,--output", d_out, "CSV output path");

  CLI11_PARSE(app, argc, argv);

  try {
    set_worker_threads(threads);
    if (kernel == "scalar") kernels::set_backend(kernels::Backend::kScalar);
    if (kernel == "avx2") kernels::set_backend(kernels::Backend::kAvx2);

    if (validate->parsed()) {
      const Instance inst = v_inst.load();
      const auto rep = validate_instance(inst);
      if (!rep) {
        std::cout << "instance invalid: " << rep.violation << '\n';
        return 1;
      }
      std::cout << "instance ok: K=" << inst.num_devices() << " F=" << inst.num_tasks() << '\n';
      if (!v_policy.empty()) {
        const ServicePolicy x = ServicePolicy::decode(v_policy);
        const auto feas = is_feasible(inst, x);
        if (!feas) {
          for (const auto& viol : feas.violations) std::cout << "violation: " << viol.describe() << '\n';
          return 1;
        }
        std::cout << "policy feasible\n";
      }
      return 0;
    }

    if (solve->parsed()) {
      const Instance inst = s_inst.load();
      const auto rep = validate_instance(inst);
      if (!rep) throw Error("instance invalid: " + rep.violation);
      SampleBatch batch;
      if (!s_samples_in.empty()) {
        std::ifstream in(s_samples_in);
        if (!in) throw Error("cannot open " + s_samples_in);
        batch = read_samples_csv(in);
      } else {
        batch = draw_samples(inst, s_samples, s_seed);
      }
      SolverConfig config;
      apply_solver_keys(s_flags.as_keys(), config);
      CccpResult cccp;
      const SolverKind kind = parse_solver(s_solver);
      const ServicePolicy x = run_solver(kind, inst, batch, config, &cccp);
      std::cout << "solver: " << s_solver << '\n'
                << "saa_bandwidth_hz: " << csv::format(saa_objective(inst, x, batch)) << '\n'
                << "feasible: " << (is_feasible(inst, x) ? "yes" : "no") << '\n'
                << "policy: " << x.encode() << '\n';
      if (kind == SolverKind::kCccpAdmm) {
        std::cout << "outer_iterations: " << cccp.outer_iterations << '\n'
                  << "inner_iterations: " << cccp.inner_iterations << '\n'
                  << "converged: " << (cccp.converged ? "yes" : "no") << '\n';
        if (cccp.hit_iteration_cap) std::cerr << "warning: iteration cap reached\n";
        if (!s_diag.empty()) {
          std::ofstream f;
          write_diagnostics_csv(open_output(s_diag, f), cccp.diagnostics);
        }
      }
      return 0;
    }

    if (compare->parsed()) {
      ExperimentPlan plan;
      plan.instance_source = c_inst.source;
      plan.recipe = c_inst.source == "reference"
                        ? reference_recipe(c_inst.deadline, c_inst.cache_fraction)
                        : load_instance_recipe(c_inst.source);
      std::stringstream names(c_solvers);
      for (std::string s; std::getline(names, s, ',');) plan.solvers.push_back(parse_solver(s));
      plan.num_samples = c_samples;
      plan.seed = c_seed;
      apply_solver_keys(c_flags.as_keys(), plan.solver);
      const ExperimentResult res = run_plan(plan);
      std::ofstream f;
      write_experiment_csv(open_output(c_out, f), res);
      return 0;
    }

    if (sweep->parsed()) {
      ExperimentPlan plan = load_plan(w_plan);
      boost::property_tree::ptree tree;
      boost::property_tree::read_ini(w_plan, tree);
      auto in_file = [&](const std::string& key) { return tree.get_optional<std::string>(key).has_value(); };
      auto warn = [](const std::string& key) {
        std::cerr << "warning: " << key << " set in both the plan file and the command line; using the plan file\n";
      };
      if (w_samples_opt->count()) {
        if (in_file("plan.samples")) warn("samples");
        else plan.num_samples = w_samples;
      }
      if (w_seed_opt->count()) {
        if (in_file("plan.seed")) warn("seed");
        else plan.seed = w_seed;
      }
      std::map<std::string, std::string> solver_keys;
      for (const auto& [k, v] : w_flags.as_keys()) {
        if (in_file("solver." + k)) warn(k);
        else solver_keys[k] = v;
      }
      apply_solver_keys(solver_keys, plan.solver);
      if (w_out.empty()) w_out = plan.output;
      const ExperimentResult res = run_plan(plan);
      std::ofstream f;
      write_experiment_csv(open_output(w_out, f), res);
      if (!w_manifest.empty()) {
        std::ofstream m(w_manifest);
        if (!m) throw Error("cannot write " + w_manifest);
        write_manifest_json(m, plan, res, "sweep " + w_plan);
      }
      if (!w_plot.empty()) {
        std::ofstream p(w_plot);
        if (!p) throw Error("cannot write " + w_plot);
        write_plot_script(p, w_out.empty() ? "results.csv" : w_out, sweep_name(plan.sweep));
      }
      for (const auto& r : res.rows) {
        if (!r.feasible) throw Error("infeasible policy emitted by " + solver_name(r.solver));
      }
      return 0;
    }

    if (symmetric->parsed()) {
      SymmetricPlan plan;
      plan.base = SymmetricInstance::from_betas(y_F, y_K, y_I, y_w, y_alpha, y_bc, y_be, y_f1,
                                                y_mu, y_tau, y_s);
      plan.sweep = parse_symmetric_sweep(y_sweep);
      plan.values = parse_list(y_values);
      plan.mc_samples = y_mc;
      plan.seed = y_seed;
      std::ofstream f;
      write_symmetric_report_csv(open_output(y_out, f), symmetric_report(plan));
      return 0;
    }

    if (dump->parsed()) {
      const Instance inst = d_inst.load();
      std::ofstream f;
      write_samples_csv(open_output(d_out, f), draw_samples(inst, d_samples, d_seed));
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
