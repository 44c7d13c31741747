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

#include "qmd/ihe.hpp"

#include <algorithm>
#include <cmath>

namespace qmd::ihe {

namespace {

constexpr int kNearSaturationCap = 16;
constexpr double kOutcomeFloor = 1e-14;  // p_k below this contribute 0 * S = 0
constexpr double kMemoryEqualityTol = 1e-10;

std::vector<double> default_spectrum(int dim) {
  std::vector<double> e(dim);
  for (int i = 0; i < dim; ++i) e[i] = static_cast<double>(i);
  return e;
}

// ln Z, shifted by the ground energy for stability.
double log_partition(const std::vector<double>& spectrum, double beta) {
  const double ground = *std::min_element(spectrum.begin(), spectrum.end());
  double sum = 0.0;
  for (double e : spectrum) sum += std::exp(-beta * (e - ground));
  return -beta * ground + std::log(sum);
}

DensityMatrix gibbs_state(const std::vector<double>& spectrum, double beta) {
  const double ground = *std::min_element(spectrum.begin(), spectrum.end());
  std::vector<double> p(spectrum.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < spectrum.size(); ++i) {
    p[i] = std::exp(-beta * (spectrum[i] - ground));
    sum += p[i];
  }
  for (double& x : p) x /= sum;
  ComplexMatrix m = ComplexMatrix::Zero(spectrum.size(), spectrum.size());
  for (std::size_t i = 0; i < p.size(); ++i) m(i, i) = p[i];
  return DensityMatrix::unchecked(std::move(m));
}

double diagonal_expectation(const DensityMatrix& rho, const std::vector<double>& spectrum) {
  double e = 0.0;
  for (int i = 0; i < rho.dim(); ++i) e += rho(i, i).real() * spectrum[i];
  return e;
}

void check_unitary(const ComplexMatrix& u, int dim, const char* name) {
  if (u.rows() != dim || u.cols() != dim) {
    throw DimensionMismatchError(std::string(name) + " must be " + std::to_string(dim) +
                                 "x" + std::to_string(dim) + ", got " +
                                 std::to_string(u.rows()) + "x" + std::to_string(u.cols()));
  }
  const double defect = unitarity_defect(u);
  if (defect > 1e-12) throw NotUnitaryError(defect);
}

DensityMatrix memory_state(const IheConfig& cfg) {
  if (cfg.memory_initial) {
    if (cfg.memory_initial->dim() != cfg.dim_memory) {
      throw DimensionMismatchError("memory_initial has dim " +
                                   std::to_string(cfg.memory_initial->dim()) +
                                   ", expected " + std::to_string(cfg.dim_memory));
    }
    return *cfg.memory_initial;
  }
  Eigen::VectorXcd psi = Eigen::VectorXcd::Ones(cfg.dim_memory);
  return DensityMatrix::pure(psi);
}

}  // namespace

void IheConfig::validate() const {
  auto bad = [](const std::string& what) { throw ConfigError("IheConfig: " + what); };
  if (dim_memory < 1 || dim_system < 1 || dim_reservoir < 1) bad("dims must be >= 1");
  if (dim_memory * dim_system * dim_reservoir > 64)
    bad("product dimension must stay <= 64");
  if (!(temperature > 0.0)) bad("temperature must be > 0");
  if (!(k_boltzmann > 0.0)) bad("k_boltzmann must be > 0");
  if (trials < 1) bad("trials must be >= 1");
  if (!(numerical_slack > 0.0)) bad("numerical_slack must be > 0");
  auto check_spectrum = [&](const std::vector<double>& s, int dim, const char* name) {
    if (s.empty()) return;
    if (static_cast<int>(s.size()) != dim)
      bad(std::string(name) + " must have " + std::to_string(dim) + " entries");
    for (double e : s)
      if (!std::isfinite(e)) bad(std::string(name) + " has a non-finite entry");
  };
  check_spectrum(system_spectrum_initial, dim_system, "system_spectrum_initial");
  check_spectrum(system_spectrum_final, dim_system, "system_spectrum_final");
  check_spectrum(reservoir_spectrum, dim_reservoir, "reservoir_spectrum");
}

IheConfig IheConfig::resolved() const {
  validate();
  IheConfig out = *this;
  if (out.system_spectrum_initial.empty())
    out.system_spectrum_initial = default_spectrum(out.dim_system);
  if (out.system_spectrum_final.empty())
    out.system_spectrum_final = out.system_spectrum_initial;
  if (out.reservoir_spectrum.empty())
    out.reservoir_spectrum = default_spectrum(out.dim_reservoir);
  if (!out.memory_initial) out.memory_initial = memory_state(out);
  return out;
}

DensityMatrix build_initial(const IheConfig& cfg) {
  const IheConfig c = cfg.resolved();
  const double beta = 1.0 / (c.k_boltzmann * c.temperature);
  return tensor(*c.memory_initial,
                tensor(gibbs_state(c.system_spectrum_initial, beta),
                       gibbs_state(c.reservoir_spectrum, beta)));
}

IheProtocol sample_protocol(const IheConfig& cfg, RngStream& rng) {
  const IheConfig c = cfg.resolved();
  const int dsr = c.dim_system * c.dim_reservoir;
  const int dtot = c.dim_memory * dsr;
  IheProtocol prot;
  prot.unitary_pre = haar_unitary(dsr, rng);
  if (c.diagonal_preserving) {
    // Block form sum_k |k><k| x V_k: measurement outcomes reproduce the
    // memory populations exactly, so dS_c vanishes.
    prot.unitary_measure = ComplexMatrix::Zero(dtot, dtot);
    for (int k = 0; k < c.dim_memory; ++k) {
      prot.unitary_measure.block(k * dsr, k * dsr, dsr, dsr) = haar_unitary(dsr, rng);
    }
  } else {
    prot.unitary_measure = haar_unitary(dtot, rng);
  }
  prot.feedback.reserve(c.dim_memory);
  for (int k = 0; k < c.dim_memory; ++k) prot.feedback.push_back(haar_unitary(dsr, rng));
  return prot;
}

IheTrialReport run_protocol(const IheConfig& cfg, const IheProtocol& prot) {
  const IheConfig c = cfg.resolved();
  const int dm = c.dim_memory;
  const int dsr = c.dim_system * c.dim_reservoir;
  const int dtot = dm * dsr;
  check_unitary(prot.unitary_pre, dsr, "unitary_pre");
  check_unitary(prot.unitary_measure, dtot, "unitary_measure");
  if (static_cast<int>(prot.feedback.size()) != dm) {
    throw DimensionMismatchError("feedback must hold one unitary per memory outcome");
  }
  for (const auto& u : prot.feedback) check_unitary(u, dsr, "feedback");

  const double beta = 1.0 / (c.k_boltzmann * c.temperature);
  const DensityMatrix rho_memory_i = *c.memory_initial;
  const DensityMatrix rho_system_i = gibbs_state(c.system_spectrum_initial, beta);
  const DensityMatrix rho_reservoir_i = gibbs_state(c.reservoir_spectrum, beta);
  const DensityMatrix rho_sr_i = tensor(rho_system_i, rho_reservoir_i);
  const DensityMatrix rho_i = tensor(rho_memory_i, rho_sr_i);

  // Stage (ii): SR evolves, memory off-line.
  const ComplexMatrix u1_full =
      tensor(ComplexMatrix::Identity(dm, dm), prot.unitary_pre);
  const DensityMatrix rho_1 = conjugate(rho_i, u1_full);

  // Stage (iii): global unitary followed by rank-1 projection on the memory.
  const ComplexMatrix rotated =
      prot.unitary_measure * rho_1.matrix() * prot.unitary_measure.adjoint();
  ComplexMatrix rho_2_m = ComplexMatrix::Zero(dtot, dtot);
  std::vector<double> p(dm, 0.0);
  std::vector<ComplexMatrix> blocks(dm);
  for (int k = 0; k < dm; ++k) {
    blocks[k] = rotated.block(k * dsr, k * dsr, dsr, dsr);
    blocks[k] = 0.5 * (blocks[k] + blocks[k].adjoint());
    p[k] = blocks[k].trace().real();
    rho_2_m.block(k * dsr, k * dsr, dsr, dsr) = blocks[k];
  }
  const DensityMatrix rho_2 = DensityMatrix::unchecked(std::move(rho_2_m));

  // Stage (iv): feedback conditioned on the registered outcome.
  ComplexMatrix u3_full = ComplexMatrix::Zero(dtot, dtot);
  for (int k = 0; k < dm; ++k) u3_full.block(k * dsr, k * dsr, dsr, dsr) = prot.feedback[k];
  const DensityMatrix rho_f = conjugate(rho_2, u3_full);

  const DensityMatrix rho_memory_2 = partial_trace(rho_2, dm, dsr, Subsystem::A);
  const DensityMatrix rho_memory_f = partial_trace(rho_f, dm, dsr, Subsystem::A);
  const DensityMatrix rho_sr_2 = partial_trace(rho_2, dm, dsr, Subsystem::B);
  const DensityMatrix rho_sr_f = partial_trace(rho_f, dm, dsr, Subsystem::B);
  const DensityMatrix rho_system_f =
      partial_trace(rho_sr_f, c.dim_system, c.dim_reservoir, Subsystem::A);
  const DensityMatrix rho_reservoir_f =
      partial_trace(rho_sr_f, c.dim_system, c.dim_reservoir, Subsystem::B);

  IheTrialReport rep;
  rep.outcome_probabilities = p;

  // Energetics; Q_S counts heat leaving the reservoir toward the system.
  const double energy_system_i = diagonal_expectation(rho_system_i, c.system_spectrum_initial);
  const double energy_system_f = diagonal_expectation(rho_system_f, c.system_spectrum_final);
  const double energy_reservoir_i = diagonal_expectation(rho_reservoir_i, c.reservoir_spectrum);
  const double energy_reservoir_f = diagonal_expectation(rho_reservoir_f, c.reservoir_spectrum);
  const double heat_from_reservoir = energy_reservoir_i - energy_reservoir_f;
  rep.work_extracted = -(energy_system_f - energy_system_i) + heat_from_reservoir;

  const double kt = c.k_boltzmann * c.temperature;
  const double free_i = -kt * log_partition(c.system_spectrum_initial, beta);
  const double free_f = -kt * log_partition(c.system_spectrum_final, beta);
  rep.free_energy_change = free_f - free_i;

  const double mem_entropy_i = von_neumann_entropy(rho_memory_i);
  const double mem_entropy_f = von_neumann_entropy(rho_memory_f);
  const double mem_entropy_2 = von_neumann_entropy(rho_memory_2);
  const double mem_diag_i = von_neumann_entropy(dephase(rho_memory_i));
  const double mem_diag_f = von_neumann_entropy(dephase(rho_memory_f));
  rep.memory_entropy_change = mem_entropy_f - mem_entropy_i;
  rep.ds_classical = c.k_boltzmann * (mem_diag_f - mem_diag_i);
  rep.dc_r = (mem_diag_i - mem_entropy_i) - (mem_diag_f - mem_entropy_f);

  rep.bound_rhs = -rep.free_energy_change + c.temperature * rep.ds_classical +
                  kt * rep.dc_r;
  rep.slack = rep.bound_rhs - rep.work_extracted;

  // Inequality chain backing the bound.
  const double sr_entropy_i = von_neumann_entropy(rho_sr_i);
  const double sr_entropy_2 = von_neumann_entropy(rho_sr_2);
  const double sr_entropy_f = von_neumann_entropy(rho_sr_f);
  double post_entropy_avg = 0.0;
  for (int k = 0; k < dm; ++k) {
    if (p[k] <= kOutcomeFloor) continue;
    post_entropy_avg +=
        p[k] * von_neumann_entropy(DensityMatrix::unchecked(blocks[k] / p[k]));
  }

  auto add_check = [&](std::string name, double residual, double tol) {
    rep.chain.push_back({std::move(name), residual, residual >= -tol});
  };
  add_check("measurement_entropy_gain",
            (mem_entropy_2 + post_entropy_avg) - (sr_entropy_i + mem_entropy_i),
            c.numerical_slack);
  add_check("subadditivity", sr_entropy_2 - post_entropy_avg, c.numerical_slack);
  add_check("concavity", sr_entropy_f - post_entropy_avg, c.numerical_slack);
  add_check("memory_entropy_equality", -std::abs(mem_entropy_f - mem_entropy_2),
            kMemoryEqualityTol);

  // Klein: tr[rho ln rho_can] <= tr[rho ln rho]. The reference is the full-
  // rank Gibbs product, so the support guard can only trip on misuse.
  {
    const double log_z_s = log_partition(c.system_spectrum_final, beta);
    const double log_z_r = log_partition(c.reservoir_spectrum, beta);
    double tr_rho_log_can = 0.0;
    for (int a = 0; a < c.dim_system; ++a) {
      for (int b = 0; b < c.dim_reservoir; ++b) {
        const double pop = rho_sr_f(a * c.dim_reservoir + b, a * c.dim_reservoir + b).real();
        const double log_can = -beta * (c.system_spectrum_final[a] + c.reservoir_spectrum[b]) -
                               log_z_s - log_z_r;
        tr_rho_log_can += pop * log_can;
      }
    }
    const double tr_rho_log_rho = -sr_entropy_f;
    rep.klein_support_deficient = false;
    add_check("klein", tr_rho_log_rho - tr_rho_log_can, c.numerical_slack);
  }

  add_check("entropy_increase", (sr_entropy_f - sr_entropy_i) + rep.memory_entropy_change,
            c.numerical_slack);
  return rep;
}

FuzzSummary fuzz(const IheConfig& cfg) {
  const IheConfig c = cfg.resolved();
  const RngStream base(c.seed);
  FuzzSummary summary;
  summary.trials = c.trials;
  bool first = true;
  for (int t = 0; t < c.trials; ++t) {
    RngStream rng = base.substream(static_cast<std::uint64_t>(t));
    IheProtocol prot = sample_protocol(c, rng);
    IheTrialReport rep = run_protocol(c, prot);
    if (rep.slack < -c.numerical_slack) {
      throw BoundViolationError("trial " + std::to_string(t) + ": slack " +
                                detail::compact(rep.slack) + " below -numerical_slack");
    }
    for (const auto& check : rep.chain) {
      auto it = summary.min_chain_residuals.find(check.name);
      if (it == summary.min_chain_residuals.end()) {
        summary.min_chain_residuals.emplace(check.name, check.residual);
      } else if (check.residual < it->second) {
        it->second = check.residual;
      }
    }
    if (first || rep.slack < summary.min_slack) {
      summary.min_slack = rep.slack;
      summary.min_slack_trial = static_cast<std::uint64_t>(t);
      summary.min_slack_protocol = prot;
      first = false;
    }
    const double scale = std::abs(rep.work_extracted) + std::abs(rep.bound_rhs) + 1.0;
    if (rep.slack < 1e-3 * scale) {
      ++summary.near_saturation_count;
      if (static_cast<int>(summary.near_saturation.size()) < kNearSaturationCap) {
        summary.near_saturation.push_back(
            {static_cast<std::uint64_t>(t), rep.slack, std::move(prot), std::move(rep)});
      }
    }
  }
  return summary;
}

}  // namespace qmd::ihe
