// Copyright 2026 The qmd Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cli.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

namespace qmd::cli {

namespace {

using json = nlohmann::ordered_json;

// Internal: a ready-made diagnostic plus exit code, caught only in run_main.
struct CliError {
  int exit_code;
  json diagnostic;
};

[[noreturn]] void config_fail(const std::string& where, const std::string& what) {
  throw ConfigError(where + ": " + what);
}

void reject_unknown(const json& j, const std::set<std::string>& allowed,
                    const std::string& where) {
  if (!j.is_object()) config_fail(where, "expected a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!allowed.count(it.key())) config_fail(where, "unknown key \"" + it.key() + "\"");
  }
}

double number_at(const json& j, const std::string& where) {
  if (!j.is_number()) config_fail(where, "must be a number");
  return j.get<double>();
}

std::vector<double> number_list_at(const json& j, const std::string& where) {
  if (!j.is_array()) config_fail(where, "must be an array of numbers");
  std::vector<double> out;
  out.reserve(j.size());
  for (const auto& v : j) {
    if (!v.is_number()) config_fail(where, "must be an array of numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

ComplexMatrix matrix_from_json(const json& j, const std::string& where) {
  reject_unknown(j, {"re", "im"}, where);
  if (!j.contains("re")) config_fail(where, "missing \"re\"");
  auto rows_of = [&](const json& part, const std::string& name) {
    if (!part.is_array() || part.empty()) config_fail(where + "." + name, "must be a nonempty array of rows");
    std::vector<std::vector<double>> rows;
    for (const auto& r : part) rows.push_back(number_list_at(r, where + "." + name));
    for (const auto& r : rows) {
      if (r.size() != rows.front().size()) config_fail(where + "." + name, "rows have unequal lengths");
    }
    return rows;
  };
  const auto re = rows_of(j.at("re"), "re");
  ComplexMatrix m(re.size(), re.front().size());
  for (std::size_t i = 0; i < re.size(); ++i)
    for (std::size_t k = 0; k < re[i].size(); ++k) m(i, k) = re[i][k];
  if (j.contains("im")) {
    const auto im = rows_of(j.at("im"), "im");
    if (im.size() != re.size() || im.front().size() != re.front().size()) {
      config_fail(where, "\"im\" shape differs from \"re\"");
    }
    for (std::size_t i = 0; i < im.size(); ++i)
      for (std::size_t k = 0; k < im[i].size(); ++k) m(i, k) += Complex(0.0, im[i][k]);
  }
  return m;
}

json matrix_to_json(const ComplexMatrix& m) {
  json re = json::array();
  json im = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json rrow = json::array();
    json irow = json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) {
      rrow.push_back(m(i, k).real());
      irow.push_back(m(i, k).imag());
    }
    re.push_back(std::move(rrow));
    im.push_back(std::move(irow));
  }
  return json{{"re", std::move(re)}, {"im", std::move(im)}};
}

json cycle_report_to_json(const szilard::CycleReport& rep) {
  json j;
  j["p_l"] = rep.p_left;
  j["p_r"] = rep.p_right;
  j["w_mea"] = rep.w_measurement;
  j["de_tot"] = rep.de_total;
  j["delta_sc"] = rep.ds_classical;
  j["delta_cr"] = rep.dc_r;
  j["q_incoh"] = rep.q_incoherent;
  j["q_coh"] = rep.q_coherent;
  j["q_tot"] = rep.q_total;
  j["w_incoh"] = rep.w_incoherent;
  j["w_coh"] = rep.w_coherent;
  j["w_tot"] = rep.w_total;
  j["eta"] = rep.eta ? json(*rep.eta) : json(nullptr);
  j["eta_carnot"] = rep.eta_carnot;
  j["demon_final"] = json{{"p_g", rep.demon_final.ground_population},
                          {"f_re", rep.demon_final.coherence.real()},
                          {"f_im", rep.demon_final.coherence.imag()}};
  return j;
}

json trial_report_to_json(const ihe::IheTrialReport& rep) {
  json j;
  j["p_k"] = rep.outcome_probabilities;
  j["w_ext"] = rep.work_extracted;
  j["delta_f_s"] = rep.free_energy_change;
  j["delta_s"] = rep.memory_entropy_change;
  j["delta_sc"] = rep.ds_classical;
  j["delta_cr"] = rep.dc_r;
  j["bound_rhs"] = rep.bound_rhs;
  j["slack"] = rep.slack;
  json chain = json::array();
  for (const auto& c : rep.chain) {
    chain.push_back(json{{"name", c.name}, {"residual", c.residual}, {"holds", c.holds}});
  }
  j["chain"] = std::move(chain);
  j["klein_support_deficient"] = rep.klein_support_deficient;
  return j;
}

json protocol_to_json(const ihe::IheProtocol& prot) {
  json feedback = json::array();
  for (const auto& u : prot.feedback) feedback.push_back(matrix_to_json(u));
  return json{{"u1", matrix_to_json(prot.unitary_pre)},
              {"u2", matrix_to_json(prot.unitary_measure)},
              {"feedback", std::move(feedback)}};
}

}  // namespace

std::vector<double> SweepGrid::values() const {
  std::vector<double> out;
  const int count = static_cast<int>(std::floor((stop - start) / step + 1e-9)) + 1;
  out.reserve(count);
  for (int i = 0; i < count; ++i) out.push_back(start + i * step);
  return out;
}

SweepGrid parse_grid(const std::string& text) {
  SweepGrid g;
  std::istringstream in(text);
  std::string a, b, c;
  if (!std::getline(in, a, ':') || !std::getline(in, b, ':') || !std::getline(in, c)) {
    throw ConfigError("grid \"" + text + "\" must look like START:STOP:STEP");
  }
  try {
    g.start = std::stod(a);
    g.stop = std::stod(b);
    g.step = std::stod(c);
  } catch (const std::exception&) {
    throw ConfigError("grid \"" + text + "\" has a non-numeric field");
  }
  if (!(g.step > 0.0)) throw ConfigError("grid step must be > 0");
  if (g.stop < g.start) throw ConfigError("grid stop must be >= start");
  return g;
}

std::vector<double> parse_factor_list(const std::string& text) {
  std::vector<double> out;
  std::istringstream in(text);
  std::string tok;
  while (std::getline(in, tok, ',')) {
    try {
      out.push_back(std::stod(tok));
    } catch (const std::exception&) {
      throw ConfigError("factor list \"" + text + "\" has a non-numeric entry");
    }
  }
  if (out.empty()) throw ConfigError("factor list is empty");
  return out;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

RunConfig parse_config_text(const std::string& text, const std::string& origin) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(origin + ": " + e.what());
  }
  reject_unknown(j,
                 {"box_length", "insertion_point", "temperature", "demon_temperature",
                  "level_gap", "ground_energy", "n_max", "tail_eps", "energy_scale",
                  "k_boltzmann", "coherence_factor", "phase", "p_r", "factors", "pr_grid",
                  "l_grid", "oracle", "seed", "trials", "ihe", "schedule", "out",
                  "tolerances"},
                 origin);
  RunConfig cfg;
  auto num = [&](const char* key, double& target) {
    if (j.contains(key)) target = number_at(j.at(key), origin + ".\"" + key + "\"");
  };
  auto integer = [&](const char* key, int& target) {
    if (!j.contains(key)) return;
    if (!j.at(key).is_number_integer())
      config_fail(origin + ".\"" + key + "\"", "must be an integer");
    target = j.at(key).get<int>();
  };
  num("box_length", cfg.well.box_length);
  num("insertion_point", cfg.well.insertion_point);
  num("temperature", cfg.well.temperature);
  num("demon_temperature", cfg.well.demon_temperature);
  num("level_gap", cfg.well.level_gap);
  num("ground_energy", cfg.well.ground_energy);
  integer("n_max", cfg.well.n_max);
  num("tail_eps", cfg.well.tail_eps);
  num("energy_scale", cfg.well.energy_scale);
  num("k_boltzmann", cfg.well.k_boltzmann);
  num("coherence_factor", cfg.coherence_factor);
  num("phase", cfg.phase);
  if (j.contains("p_r")) {
    cfg.p_right = number_at(j.at("p_r"), origin + ".\"p_r\"");
  }
  if (j.contains("factors")) {
    cfg.factors = number_list_at(j.at("factors"), origin + ".\"factors\"");
    if (cfg.factors.empty()) config_fail(origin + ".\"factors\"", "must not be empty");
  }
  auto grid = [&](const char* key, std::optional<SweepGrid>& target) {
    if (!j.contains(key)) return;
    if (!j.at(key).is_string())
      config_fail(origin + ".\"" + key + "\"", "must be a \"START:STOP:STEP\" string");
    target = parse_grid(j.at(key).get<std::string>());
  };
  grid("pr_grid", cfg.pr_grid);
  grid("l_grid", cfg.l_grid);
  if (j.contains("oracle")) {
    if (!j.at("oracle").is_boolean()) config_fail(origin + ".\"oracle\"", "must be a boolean");
    cfg.oracle = j.at("oracle").get<bool>();
  }
  if (j.contains("seed")) {
    if (!j.at("seed").is_number_unsigned() && !j.at("seed").is_number_integer())
      config_fail(origin + ".\"seed\"", "must be a nonnegative integer");
    cfg.seed = j.at("seed").get<std::uint64_t>();
  }
  if (j.contains("trials")) {
    if (!j.at("trials").is_number_integer())
      config_fail(origin + ".\"trials\"", "must be an integer");
    cfg.ihe.trials = j.at("trials").get<int>();
  }
  if (j.contains("schedule")) {
    if (!j.at("schedule").is_string()) config_fail(origin + ".\"schedule\"", "must be a path string");
    cfg.schedule_path = j.at("schedule").get<std::string>();
  }
  if (j.contains("out")) {
    if (!j.at("out").is_string()) config_fail(origin + ".\"out\"", "must be a path string");
    cfg.out_path = j.at("out").get<std::string>();
  }
  if (j.contains("tolerances")) {
    const auto& t = j.at("tolerances");
    const std::string where = origin + ".\"tolerances\"";
    reject_unknown(t, {"herm", "trace", "psd", "eig"}, where);
    if (t.contains("herm")) cfg.tol.herm = number_at(t.at("herm"), where + ".herm");
    if (t.contains("trace")) cfg.tol.trace = number_at(t.at("trace"), where + ".trace");
    if (t.contains("psd")) cfg.tol.psd = number_at(t.at("psd"), where + ".psd");
    if (t.contains("eig")) cfg.tol.eig = number_at(t.at("eig"), where + ".eig");
  }
  if (j.contains("ihe")) {
    const auto& h = j.at("ihe");
    const std::string where = origin + ".\"ihe\"";
    reject_unknown(h,
                   {"dim_memory", "dim_system", "dim_reservoir", "temperature",
                    "system_spectrum_initial", "system_spectrum_final",
                    "reservoir_spectrum", "memory_initial", "trials", "seed",
                    "numerical_slack", "diagonal_preserving", "k_boltzmann"},
                   where);
    auto hint = [&](const char* key, int& target) {
      if (!h.contains(key)) return;
      if (!h.at(key).is_number_integer()) config_fail(where + ".\"" + key + "\"", "must be an integer");
      target = h.at(key).get<int>();
    };
    hint("dim_memory", cfg.ihe.dim_memory);
    hint("dim_system", cfg.ihe.dim_system);
    hint("dim_reservoir", cfg.ihe.dim_reservoir);
    hint("trials", cfg.ihe.trials);
    if (h.contains("temperature"))
      cfg.ihe.temperature = number_at(h.at("temperature"), where + ".temperature");
    if (h.contains("numerical_slack"))
      cfg.ihe.numerical_slack = number_at(h.at("numerical_slack"), where + ".numerical_slack");
    if (h.contains("k_boltzmann"))
      cfg.ihe.k_boltzmann = number_at(h.at("k_boltzmann"), where + ".k_boltzmann");
    if (h.contains("system_spectrum_initial"))
      cfg.ihe.system_spectrum_initial =
          number_list_at(h.at("system_spectrum_initial"), where + ".system_spectrum_initial");
    if (h.contains("system_spectrum_final"))
      cfg.ihe.system_spectrum_final =
          number_list_at(h.at("system_spectrum_final"), where + ".system_spectrum_final");
    if (h.contains("reservoir_spectrum"))
      cfg.ihe.reservoir_spectrum =
          number_list_at(h.at("reservoir_spectrum"), where + ".reservoir_spectrum");
    if (h.contains("memory_initial")) {
      cfg.ihe.memory_initial = DensityMatrix::validated(
          matrix_from_json(h.at("memory_initial"), where + ".memory_initial"), cfg.tol);
    }
    if (h.contains("seed")) {
      if (!h.at("seed").is_number_unsigned() && !h.at("seed").is_number_integer())
        config_fail(where + ".\"seed\"", "must be a nonnegative integer");
      cfg.ihe.seed = h.at("seed").get<std::uint64_t>();
      cfg.ihe_seed_set = true;
    }
    if (h.contains("diagonal_preserving")) {
      if (!h.at("diagonal_preserving").is_boolean())
        config_fail(where + ".\"diagonal_preserving\"", "must be a boolean");
      cfg.ihe.diagonal_preserving = h.at("diagonal_preserving").get<bool>();
    }
  }
  return cfg;
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file \"" + path + "\"");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), path);
}

path::PathSchedule parse_schedule_text(const std::string& text, const std::string& origin,
                                       const Tolerances& tol) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(origin + ": " + e.what());
  }
  reject_unknown(j, {"temperature", "nodes", "rho_initial", "rho_final"}, origin);
  path::PathSchedule schedule;
  if (!j.contains("temperature"))
    config_fail(origin, "missing \"temperature\"");
  schedule.temperature = number_at(j.at("temperature"), origin + ".temperature");
  if (!j.contains("nodes") || !j.at("nodes").is_array())
    config_fail(origin, "\"nodes\" must be an array");
  int index = 0;
  for (const auto& n : j.at("nodes")) {
    const std::string where = origin + ": node " + std::to_string(index);
    reject_unknown(n, {"energies", "populations"}, where);
    if (!n.contains("energies")) config_fail(where, "missing \"energies\"");
    if (!n.contains("populations")) config_fail(where, "missing \"populations\"");
    path::PathNode node;
    node.energies = number_list_at(n.at("energies"), where + ": \"energies\"");
    node.populations = number_list_at(n.at("populations"), where + ": \"populations\"");
    schedule.nodes.push_back(std::move(node));
    ++index;
  }
  if (j.contains("rho_initial")) {
    schedule.rho_initial = DensityMatrix::validated(
        matrix_from_json(j.at("rho_initial"), origin + ".rho_initial"), tol);
  }
  if (j.contains("rho_final")) {
    schedule.rho_final = DensityMatrix::validated(
        matrix_from_json(j.at("rho_final"), origin + ".rho_final"), tol);
  }
  schedule.validate();
  return schedule;
}

path::PathSchedule load_schedule(const std::string& path, const Tolerances& tol) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open schedule file \"" + path + "\"");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_schedule_text(buf.str(), path, tol);
}

void cmd_cycle(const RunConfig& cfg, std::ostream& out) {
  const szilard::DemonState demon =
      szilard::thermal_demon(cfg.well, cfg.coherence_factor, cfg.phase);
  szilard::WellConfig well = cfg.well;
  szilard::CycleReport rep;
  if (cfg.p_right) {
    rep = szilard::cycle_report_at(well, demon, *cfg.p_right, cfg.tol);
    if (cfg.oracle) well.insertion_point = szilard::insertion_point_for(well, *cfg.p_right);
  } else {
    rep = szilard::cycle_report(well, demon, cfg.tol);
  }
  json j = cycle_report_to_json(rep);
  if (cfg.oracle) {
    const szilard::OracleResult res = szilard::oracle_run_cycle(well, demon);
    json stages = json::array();
    for (const auto& st : res.stages) stages.push_back(st.energy);
    j["oracle_max_abs_diff"] = res.max_abs_diff;
    j["oracle"] = json{{"unitarity_defect", res.unitarity_defect},
                       {"demon_marginal_defect", res.demon_marginal_defect},
                       {"expansion_width_g", res.expansion_width_g},
                       {"expansion_width_e", res.expansion_width_e},
                       {"stage_energies", std::move(stages)}};
  }
  if (!rep.eta) {
    throw CliError{3, json{{"error", "DegenerateCycle"},
                           {"message", "efficiency undefined: |q_tot| below tolerance"},
                           {"report", std::move(j)}}};
  }
  out << j.dump(2) << "\n";
}

void cmd_sweep(const RunConfig& cfg, std::ostream& out) {
  if (!cfg.pr_grid && !cfg.l_grid) {
    throw ConfigError("sweep requires \"pr_grid\" or \"l_grid\"");
  }
  out << "p_r,factor,eta,eta_carnot,w_tot,q_tot,q_coh,delta_cr,delta_sc,de_tot\n";
  auto emit = [&](double p_r, double factor, const szilard::CycleReport& rep) {
    out << format_double(p_r) << ',' << format_double(factor) << ','
        << format_double(rep.eta ? *rep.eta : std::nan("")) << ','
        << format_double(rep.eta_carnot) << ',' << format_double(rep.w_total) << ','
        << format_double(rep.q_total) << ',' << format_double(rep.q_coherent) << ','
        << format_double(rep.dc_r) << ',' << format_double(rep.ds_classical) << ','
        << format_double(rep.de_total) << '\n';
  };
  for (double factor : cfg.factors) {
    const szilard::DemonState demon = szilard::thermal_demon(cfg.well, factor, cfg.phase);
    if (cfg.pr_grid) {
      for (double p_r : cfg.pr_grid->values()) {
        emit(p_r, factor, szilard::cycle_report_at(cfg.well, demon, p_r, cfg.tol));
      }
    } else {
      for (double l : cfg.l_grid->values()) {
        szilard::WellConfig well = cfg.well;
        well.insertion_point = l;
        const auto rep = szilard::cycle_report(well, demon, cfg.tol);
        emit(rep.p_right, factor, rep);
      }
    }
  }
}

void cmd_critical(const RunConfig& cfg, std::ostream& out) {
  const szilard::DemonState demon =
      szilard::thermal_demon(cfg.well, cfg.coherence_factor, cfg.phase);
  json j;
  try {
    j["p_r_cri"] = szilard::critical_probability(cfg.well, demon);
    j["p_r_cri_reason"] = nullptr;
  } catch (const NoSignChangeError&) {
    j["p_r_cri"] = nullptr;
    j["p_r_cri_reason"] = "NoSignChange";
  }
  try {
    j["p_r_zero"] = szilard::zero_work_probability(cfg.well, demon);
    j["p_r_zero_reason"] = nullptr;
  } catch (const NoSignChangeError&) {
    j["p_r_zero"] = nullptr;
    j["p_r_zero_reason"] = "NoSignChange";
  }
  out << j.dump(2) << "\n";
}

void cmd_ihe(const RunConfig& cfg, std::ostream& out) {
  ihe::IheConfig icfg = cfg.ihe;
  if (!cfg.ihe_seed_set) icfg.seed = cfg.seed;
  const ihe::FuzzSummary summary = ihe::fuzz(icfg);
  json j;
  j["trials"] = summary.trials;
  j["dims"] = json::array({icfg.dim_memory, icfg.dim_system, icfg.dim_reservoir});
  j["temperature"] = icfg.temperature;
  j["seed"] = icfg.seed;
  j["diagonal_preserving"] = icfg.diagonal_preserving;
  j["min_slack"] = summary.min_slack;
  j["min_slack_trial"] = summary.min_slack_trial;
  j["min_slack_protocol"] = protocol_to_json(summary.min_slack_protocol);
  json residuals;
  for (const auto& [name, value] : summary.min_chain_residuals) residuals[name] = value;
  j["min_chain_residuals"] = std::move(residuals);
  j["near_saturation_count"] = summary.near_saturation_count;
  json near = json::array();
  for (const auto& n : summary.near_saturation) {
    near.push_back(json{{"trial", n.trial},
                        {"slack", n.slack},
                        {"report", trial_report_to_json(n.report)},
                        {"protocol", protocol_to_json(n.protocol)}});
  }
  j["near_saturation"] = std::move(near);
  out << j.dump(2) << "\n";
}

void cmd_path(const RunConfig& cfg, std::ostream& out) {
  if (cfg.schedule_path.empty()) {
    throw ConfigError("path requires a schedule file (\"schedule\" key or --schedule)");
  }
  const path::PathSchedule schedule = load_schedule(cfg.schedule_path, cfg.tol);
  const path::PathReport rep = path::path_report(schedule);
  json j;
  j["de"] = rep.de;
  j["q_incoh"] = rep.q_incoherent;
  j["q_coh"] = rep.q_coherent;
  j["q"] = rep.q_total;
  j["w_incoh"] = rep.w_incoherent;
  j["w_coh"] = rep.w_coherent;
  j["w"] = rep.w_total;
  j["delta_cr"] = rep.dc_r;
  j["first_law_residual"] = rep.first_law_residual;
  j["endpoints"] = rep.has_endpoints ? "present" : "absent";
  out << j.dump(2) << "\n";
}

namespace {

struct Flags {
  std::string config, out, pr_grid, l_grid, factors, schedule;
  std::uint64_t seed = 0;
  int nmax = 50;
  int trials = 1;
  double tail_eps = 1e-12;
  double p_r = 0.0;
  double coherence_factor = 0.0;
  double phase = 0.0;
  double insertion_point = 0.5;
  double box_length = 1.0;
  double temperature = 1.0;
  double demon_temperature = 0.5;
  double level_gap = 0.5;
  bool oracle = false;
  bool diagonal_preserving = false;
};

void add_common_options(CLI::App* sub, Flags& f) {
  sub->add_option("--config", f.config, "JSON config file");
  sub->add_option("--out", f.out, "output path (default stdout)");
  sub->add_option("--seed", f.seed, "RNG seed");
  sub->add_option("--nmax", f.nmax, "level-sum truncation order");
  sub->add_option("--tail-eps", f.tail_eps, "relative series tail bound");
  sub->add_option("--box-length", f.box_length, "box size L");
  sub->add_option("--insertion-point", f.insertion_point, "wall insertion point l");
  sub->add_option("--temperature", f.temperature, "system bath temperature");
  sub->add_option("--demon-temperature", f.demon_temperature, "demon temperature");
  sub->add_option("--level-gap", f.level_gap, "demon level gap");
  sub->add_option("--coherence-factor", f.coherence_factor, "demon |F| / sqrt(p_g p_e)");
  sub->add_option("--phase", f.phase, "demon coherence phase (radians)");
}

void apply_overrides(const CLI::App* sub, const Flags& f, RunConfig& cfg) {
  auto has = [&](const std::string& name) {
    const CLI::Option* opt = sub->get_option_no_throw(name);
    return opt != nullptr && opt->count() > 0;
  };
  if (has("--out")) cfg.out_path = f.out;
  if (has("--seed")) cfg.seed = f.seed;
  if (has("--nmax")) cfg.well.n_max = f.nmax;
  if (has("--tail-eps")) cfg.well.tail_eps = f.tail_eps;
  if (has("--box-length")) cfg.well.box_length = f.box_length;
  if (has("--insertion-point")) cfg.well.insertion_point = f.insertion_point;
  if (has("--temperature")) cfg.well.temperature = f.temperature;
  if (has("--demon-temperature")) cfg.well.demon_temperature = f.demon_temperature;
  if (has("--level-gap")) cfg.well.level_gap = f.level_gap;
  if (has("--coherence-factor")) cfg.coherence_factor = f.coherence_factor;
  if (has("--phase")) cfg.phase = f.phase;
  if (has("--p-r")) cfg.p_right = f.p_r;
  if (has("--oracle")) cfg.oracle = f.oracle;
  if (has("--pr-grid")) cfg.pr_grid = parse_grid(f.pr_grid);
  if (has("--l-grid")) cfg.l_grid = parse_grid(f.l_grid);
  if (has("--factors")) cfg.factors = parse_factor_list(f.factors);
  if (has("--trials")) cfg.ihe.trials = f.trials;
  if (has("--diagonal-preserving")) cfg.ihe.diagonal_preserving = f.diagonal_preserving;
  if (has("--schedule")) cfg.schedule_path = f.schedule;
}

}  // namespace

int run_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"coherent-demon heat engine toolkit"};
  app.require_subcommand(1);
  Flags f;

  CLI::App* cycle = app.add_subcommand("cycle", "one closed-form cycle report (JSON)");
  add_common_options(cycle, f);
  cycle->add_option("--p-r", f.p_r, "impose P_R directly instead of the insertion point");
  cycle->add_flag("--oracle", f.oracle, "cross-check against the truncated matrix oracle");

  CLI::App* sweep = app.add_subcommand("sweep", "efficiency curves over a P_R or l grid (CSV)");
  add_common_options(sweep, f);
  sweep->add_option("--pr-grid", f.pr_grid, "P_R grid START:STOP:STEP");
  sweep->add_option("--l-grid", f.l_grid, "insertion-point grid START:STOP:STEP");
  sweep->add_option("--factors", f.factors, "comma-separated coherence factors");

  CLI::App* critical = app.add_subcommand("critical", "Carnot-crossing and zero-work P_R (JSON)");
  add_common_options(critical, f);

  CLI::App* ihe_cmd = app.add_subcommand("ihe", "fuzz the coherence-modified work bound (JSON)");
  add_common_options(ihe_cmd, f);
  ihe_cmd->add_option("--trials", f.trials, "number of sampled protocols");
  ihe_cmd->add_flag("--diagonal-preserving", f.diagonal_preserving,
                    "memory-population-preserving measurement unitaries");

  CLI::App* path_cmd = app.add_subcommand("path", "first-law split along a schedule file (JSON)");
  add_common_options(path_cmd, f);
  path_cmd->add_option("--schedule", f.schedule, "schedule JSON file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << json{{"error", "ConfigError"}, {"message", e.what()}}.dump() << "\n";
    return 2;
  }

  try {
    const CLI::App* sub = app.get_subcommands().front();
    RunConfig cfg = f.config.empty() ? RunConfig{} : parse_config_file(f.config);
    apply_overrides(sub, f, cfg);

    std::ostringstream buf;
    if (sub == cycle) cmd_cycle(cfg, buf);
    else if (sub == sweep) cmd_sweep(cfg, buf);
    else if (sub == critical) cmd_critical(cfg, buf);
    else if (sub == ihe_cmd) cmd_ihe(cfg, buf);
    else cmd_path(cfg, buf);

    if (cfg.out_path.empty()) {
      out << buf.str();
    } else {
      std::ofstream file(cfg.out_path, std::ios::binary);
      if (!file) throw ConfigError("cannot open output path \"" + cfg.out_path + "\"");
      file << buf.str();
    }
    return 0;
  } catch (const CliError& e) {
    err << e.diagnostic.dump() << "\n";
    return e.exit_code;
  } catch (const ConfigError& e) {
    err << json{{"error", e.kind()}, {"message", e.what()}}.dump() << "\n";
    return 2;
  } catch (const Error& e) {
    err << json{{"error", e.kind()}, {"message", e.what()}}.dump() << "\n";
    return 3;
  } catch (const std::exception& e) {
    err << json{{"error", "Internal"}, {"message", e.what()}}.dump() << "\n";
    return 3;
  }
}

}  // namespace qmd::cli
