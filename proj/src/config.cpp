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

#include "mecast/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <fstream>
#include <ostream>
#include <sstream>

#include "mecast/csv.hpp"
#include "mecast/errors.hpp"
#include "mecast/sampling.hpp"

namespace mecast {

namespace pt = boost::property_tree;

namespace {

// Task input sizes use their own counter stream so they never alias
// request draws made with the same seed.
constexpr std::uint64_t kTaskStream = 0x7461736bULL;

double per_device(const std::vector<double>& values, int k, const char* key) {
  if (values.size() == 1) return values[0];
  if (k < static_cast<int>(values.size())) return values[k];
  throw Error(std::string("[devices] ") + key + " has fewer entries than devices");
}

double per_task(const std::vector<double>& values, int f, const char* key) {
  if (values.size() == 1) return values[0];
  if (f < static_cast<int>(values.size())) return values[f];
  throw Error(std::string("[tasks] ") + key + " has fewer entries than tasks");
}

std::string join(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ", ";
    out += csv::format(values[i]);
  }
  return out;
}

std::vector<double> get_list(const pt::ptree& tree, const std::string& key,
                             const std::vector<double>& fallback) {
  auto v = tree.get_optional<std::string>(key);
  return v ? parse_list(*v) : fallback;
}

std::optional<double> get_double(const pt::ptree& tree, const std::string& key) {
  auto v = tree.get_optional<std::string>(key);
  if (!v) return std::nullopt;
  auto list = parse_list(*v);
  if (list.size() != 1) throw Error("expected a single number for " + key);
  return list[0];
}

}  // namespace

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && (text[i] == ',' || text[i] == ' ' || text[i] == '\t')) ++i;
    if (i >= text.size()) break;
    std::size_t j = i;
    while (j < text.size() && text[j] != ',' && text[j] != ' ' && text[j] != '\t') ++j;
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(text.data() + i, text.data() + j, v);
    if (ec != std::errc() || ptr != text.data() + j) {
      throw Error("not a number: '" + text.substr(i, j - i) + "'");
    }
    out.push_back(v);
    i = j;
  }
  return out;
}

Instance build_instance(const InstanceRecipe& recipe) {
  Instance inst;
  inst.params = recipe.system;

  const auto& tr = recipe.tasks;
  std::vector<double> inputs = tr.input_bits;
  if (inputs.empty()) {
    if (tr.count < 1) throw Error("[tasks] needs input_bits or count >= 1");
    if (!(tr.input_max >= tr.input_min)) throw Error("[tasks] input_max < input_min");
    inputs.resize(tr.count);
    for (int f = 0; f < tr.count; ++f) {
      const double u = counter_uniform(tr.seed, kTaskStream, static_cast<std::uint64_t>(f));
      inputs[f] = tr.input_min + (tr.input_max - tr.input_min) * u;
    }
  }
  const int F = static_cast<int>(inputs.size());
  inst.catalog.tasks.resize(F);
  for (int f = 0; f < F; ++f) {
    auto& t = inst.catalog.tasks[f];
    t.input_bits = inputs[f];
    t.compute_load = per_task(tr.compute_load, f, "compute_load");
    if (!tr.output_bits.empty()) {
      t.output_bits = per_task(tr.output_bits, f, "output_bits");
    } else if (tr.alpha) {
      t.output_bits = *tr.alpha * inputs[f];
    } else {
      throw Error("[tasks] needs output_bits or alpha");
    }
  }
  inst.catalog.alpha = tr.alpha ? *tr.alpha
                                : inst.catalog.tasks[0].output_bits / inst.catalog.tasks[0].input_bits;

  const auto& dr = recipe.devices;
  if (dr.count < 1) throw Error("[devices] count must be >= 1");
  const double total_input = inst.catalog.total_input_bits();
  PopularityProfile profile;
  if (dr.popularity == "uniform") {
    profile = PopularityProfile::uniform(dr.count, F);
  } else if (dr.popularity == "zipf") {
    profile = PopularityProfile::zipf(dr.count, F, dr.zipf_gamma);
  } else if (dr.popularity == "explicit") {
    if (static_cast<int>(dr.demand.size()) != dr.count) {
      throw Error("[devices] explicit popularity needs one demand row per device");
    }
    profile.kind = PopularityProfile::Kind::kExplicit;
    profile.rows = dr.demand;
  } else {
    throw Error("[devices] unknown popularity '" + dr.popularity + "'");
  }

  inst.devices.resize(dr.count);
  for (int k = 0; k < dr.count; ++k) {
    auto& d = inst.devices[k];
    d.cache_bits = dr.cache_fraction ? *dr.cache_fraction * total_input
                                     : per_device(dr.cache_bits, k, "cache_bits");
    d.avg_energy = per_device(dr.avg_energy, k, "avg_energy");
    d.cpu_freq = per_device(dr.cpu_freq, k, "cpu_freq");
    d.inv_spectral_eff = dr.inv_spectral_eff_step
                             ? *dr.inv_spectral_eff_step * static_cast<double>(k + 1)
                             : per_device(dr.inv_spectral_eff, k, "inv_spectral_eff");
    if (static_cast<int>(profile.rows[k].size()) != F) {
      throw Error("[devices] demand row length does not match task count");
    }
    d.demand = profile.rows[k];
  }
  return inst;
}

InstanceRecipe parse_instance_ini(std::istream& in) {
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw Error(std::string("instance config: ") + e.what());
  }
  InstanceRecipe r;
  try {
    const auto& sys = tree.get_child("system");
    r.system.deadline = get_double(sys, "deadline").value_or(0.0);
    r.system.energy_coeff = get_double(sys, "energy_coeff").value_or(0.0);

    const auto& tasks = tree.get_child("tasks");
    r.tasks.input_bits = get_list(tasks, "input_bits", {});
    r.tasks.output_bits = get_list(tasks, "output_bits", {});
    r.tasks.compute_load = get_list(tasks, "compute_load", r.tasks.compute_load);
    r.tasks.alpha = get_double(tasks, "alpha");
    r.tasks.count = tasks.get<int>("count", 0);
    r.tasks.input_min = get_double(tasks, "input_min").value_or(0.0);
    r.tasks.input_max = get_double(tasks, "input_max").value_or(0.0);
    r.tasks.seed = tasks.get<std::uint64_t>("seed", 1);

    const auto& dev = tree.get_child("devices");
    r.devices.count = dev.get<int>("count", 1);
    r.devices.cache_bits = get_list(dev, "cache_bits", r.devices.cache_bits);
    r.devices.cache_fraction = get_double(dev, "cache_fraction");
    r.devices.avg_energy = get_list(dev, "avg_energy", r.devices.avg_energy);
    r.devices.cpu_freq = get_list(dev, "cpu_freq", r.devices.cpu_freq);
    r.devices.inv_spectral_eff = get_list(dev, "inv_spectral_eff", r.devices.inv_spectral_eff);
    r.devices.inv_spectral_eff_step = get_double(dev, "inv_spectral_eff_step");
    r.devices.popularity = dev.get<std::string>("popularity", "uniform");
    r.devices.zipf_gamma = get_double(dev, "zipf_gamma").value_or(1.0);
    for (int k = 0; k < r.devices.count; ++k) {
      auto row = dev.get_optional<std::string>("demand_" + std::to_string(k));
      if (row) r.devices.demand.push_back(parse_list(*row));
    }
  } catch (const pt::ptree_error& e) {
    throw Error(std::string("instance config: ") + e.what());
  }
  return r;
}

InstanceRecipe load_instance_recipe(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open instance config " + path);
  return parse_instance_ini(in);
}

void write_instance_ini(std::ostream& out, const InstanceRecipe& r) {
  out << "[system]\n"
      << "deadline = " << csv::format(r.system.deadline) << '\n'
      << "energy_coeff = " << csv::format(r.system.energy_coeff) << "\n\n[tasks]\n";
  if (!r.tasks.input_bits.empty()) {
    out << "input_bits = " << join(r.tasks.input_bits) << '\n';
    if (!r.tasks.output_bits.empty()) out << "output_bits = " << join(r.tasks.output_bits) << '\n';
  } else {
    out << "count = " << r.tasks.count << '\n'
        << "input_min = " << csv::format(r.tasks.input_min) << '\n'
        << "input_max = " << csv::format(r.tasks.input_max) << '\n'
        << "seed = " << r.tasks.seed << '\n';
  }
  out << "compute_load = " << join(r.tasks.compute_load) << '\n';
  if (r.tasks.alpha) out << "alpha = " << csv::format(*r.tasks.alpha) << '\n';

  const auto& d = r.devices;
  out << "\n[devices]\ncount = " << d.count << '\n';
  if (d.cache_fraction) {
    out << "cache_fraction = " << csv::format(*d.cache_fraction) << '\n';
  } else {
    out << "cache_bits = " << join(d.cache_bits) << '\n';
  }
  out << "avg_energy = " << join(d.avg_energy) << '\n'
      << "cpu_freq = " << join(d.cpu_freq) << '\n';
  if (d.inv_spectral_eff_step) {
    out << "inv_spectral_eff_step = " << csv::format(*d.inv_spectral_eff_step) << '\n';
  } else {
    out << "inv_spectral_eff = " << join(d.inv_spectral_eff) << '\n';
  }
  out << "popularity = " << d.popularity << '\n';
  if (d.popularity == "zipf") out << "zipf_gamma = " << csv::format(d.zipf_gamma) << '\n';
  for (std::size_t k = 0; k < d.demand.size(); ++k) {
    out << "demand_" << k << " = " << join(d.demand[k]) << '\n';
  }
}

InstanceRecipe reference_recipe(double deadline, double cache_fraction) {
  InstanceRecipe r;
  r.system.deadline = deadline;
  r.system.energy_coeff = 1e-27;
  r.tasks.count = 50;
  r.tasks.input_min = 10e6;
  r.tasks.input_max = 15e6;
  r.tasks.seed = 1;
  r.tasks.alpha = 3.0;
  r.tasks.compute_load = {10.0};
  r.devices.count = 4;
  r.devices.cache_fraction = cache_fraction;
  r.devices.avg_energy = {1.7e3};
  r.devices.cpu_freq = {1.1e11};
  r.devices.inv_spectral_eff_step = 0.1;
  r.devices.popularity = "zipf";
  r.devices.zipf_gamma = 1.0;
  return r;
}

}  // namespace mecast
