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

// Stage-by-stage matrix replay of the cycle on the truncated space
// (left sector + right sector + full box) x demon. The three eigenfunction
// families are treated as mutually orthonormal labels, so the controlled-NOT,
// the controlled expansion and the removal operator are explicit matrices on
// a 6 n_max dimensional space.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "qmd/szilard.hpp"
#include "szilard_detail.hpp"

namespace qmd::szilard {

namespace {

// Log-domain Boltzmann level weights of one box width, normalized over the
// truncated range. Logs keep the expansion/removal amplitude ratios exact
// even where the raw weights underflow.
struct LevelWeights {
  std::vector<double> w;        // exp(lw)
  std::vector<double> lw;       // log weight
  std::vector<double> energy;   // E_n(width)
};

// Source levels with log-weight below this carry no representable amplitude;
// operator entries sourced there are dropped and the loss is folded into the
// stage trace check.
constexpr double kLogWeightFloor = -690.0;

// Narrowest box width (relative to L) whose populated levels stay above the
// double-precision floor for every temperature: a level significant in the
// full box satisfies beta E (n^2-1) <= ~30 L^-2, and representability at
// width w needs beta E (n^2-1) <= ~690 w^-2, so w/L >= sqrt(30/690) ~ 0.21.
constexpr double kReplayBand = 0.22;

LevelWeights level_weights(double width, const WellConfig& cfg) {
  // Throws TruncationError when n_max/tail_eps cannot cover this width.
  detail::thermal_series(width, cfg.temperature, cfg,
                         energy_level(1, width, cfg), false);
  const double beta = 1.0 / (cfg.k_boltzmann * cfg.temperature);
  LevelWeights out;
  out.w.resize(cfg.n_max);
  out.lw.resize(cfg.n_max);
  out.energy.resize(cfg.n_max);
  const double ground = energy_level(1, width, cfg);
  double sum = 0.0;
  for (int n = 1; n <= cfg.n_max; ++n) {
    out.energy[n - 1] = energy_level(n, width, cfg);
    const double raw = -beta * (out.energy[n - 1] - ground);
    out.lw[n - 1] = raw;
    sum += std::exp(raw);
  }
  const double log_sum = std::log(sum);
  for (int n = 0; n < cfg.n_max; ++n) {
    out.lw[n] -= log_sum;
    out.w[n] = std::exp(out.lw[n]);
  }
  return out;
}

// sqrt(target_n / source_n) in log space; zero once the source level has no
// representable weight.
double amplitude_ratio(const LevelWeights& target, const LevelWeights& source, int n) {
  if (source.lw[n] < kLogWeightFloor) return 0.0;
  return std::exp(0.5 * (target.lw[n] - source.lw[n]));
}

struct OracleFrame {
  int n_max;
  int dim;  // 6 n_max
  LevelWeights full;      // width L
  LevelWeights left;      // width l
  LevelWeights right;     // width L - l
  LevelWeights left_g;    // width l_g
  LevelWeights right_g;   // width L - l_g
  LevelWeights left_e;    // width l_e
  LevelWeights right_e;   // width L - l_e
};

int idx(Sector sector, int n, int q, int n_max) {
  return (static_cast<int>(sector) * n_max + n) * 2 + q;
}

ComplexMatrix system_demon_product(const OracleFrame& fr, Sector sector,
                                   const std::vector<double>& weights,
                                   const ComplexMatrix& demon, double scale) {
  ComplexMatrix m = ComplexMatrix::Zero(fr.dim, fr.dim);
  for (int n = 0; n < fr.n_max; ++n) {
    for (int q1 = 0; q1 < 2; ++q1) {
      for (int q2 = 0; q2 < 2; ++q2) {
        m(idx(sector, n, q1, fr.n_max), idx(sector, n, q2, fr.n_max)) =
            scale * weights[n] * demon(q1, q2);
      }
    }
  }
  return m;
}

double stage_trace_defect(const ComplexMatrix& m) {
  return std::abs(m.trace().real() - 1.0);
}

DensityMatrix as_stage_state(ComplexMatrix m, double trace_budget,
                             const char* stage_name) {
  const double defect = stage_trace_defect(m);
  if (defect > trace_budget) {
    throw TruncationError(std::string("oracle stage ") + stage_name +
                          ": trace defect " + qmd::detail::compact(defect) +
                          " exceeds the truncation budget");
  }
  m = 0.5 * (m + m.adjoint());
  return DensityMatrix::unchecked(std::move(m));
}

// tr[rho (H_S + H_D)] with per-(sector, demon-level) box widths.
double stage_energy(const DensityMatrix& rho, const OracleFrame& fr,
                    const WellConfig& cfg, const LevelWeights* left_widths[2],
                    const LevelWeights* right_widths[2]) {
  double e = 0.0;
  const double demon_energy[2] = {cfg.ground_energy, cfg.ground_energy + cfg.level_gap};
  for (int n = 0; n < fr.n_max; ++n) {
    for (int q = 0; q < 2; ++q) {
      const double pl = rho(idx(Sector::Left, n, q, fr.n_max),
                            idx(Sector::Left, n, q, fr.n_max))
                            .real();
      const double pr = rho(idx(Sector::Right, n, q, fr.n_max),
                            idx(Sector::Right, n, q, fr.n_max))
                            .real();
      const double pf = rho(idx(Sector::Full, n, q, fr.n_max),
                            idx(Sector::Full, n, q, fr.n_max))
                            .real();
      e += pl * (left_widths[q]->energy[n] + demon_energy[q]);
      e += pr * (right_widths[q]->energy[n] + demon_energy[q]);
      e += pf * (fr.full.energy[n] + demon_energy[q]);
    }
  }
  return e;
}

}  // namespace

int oracle_basis_index(Sector sector, int n, int demon_level, int n_max) {
  return idx(sector, n, demon_level, n_max);
}

OracleResult oracle_run_cycle(const WellConfig& cfg, const DemonState& d) {
  const auto [p_left, p_right] = insertion_probabilities(cfg);
  const double pg = d.ground_population;
  const double pe = d.excited_population();
  // Demon-conditioned equilibrium endpoints; each branch balances its own
  // left/right ensemble weights. Strongly lopsided branches push the
  // equilibrium past the replay band, where intermediate level weights
  // underflow doubles; the endpoints are clamped there since the closed-form
  // report is endpoint-independent.
  const double lo = kReplayBand * cfg.box_length;
  const double hi = cfg.box_length - lo;
  const double l_g = std::clamp(
      equilibrium_wall_position(cfg, pg * p_left, pe * p_right), lo, hi);
  const double l_e = std::clamp(
      equilibrium_wall_position(cfg, pe * p_left, pg * p_right), lo, hi);
  return oracle_run_cycle(cfg, d, l_g, l_e);
}

OracleResult oracle_run_cycle(const WellConfig& cfg, const DemonState& d,
                              double expansion_width_g, double expansion_width_e) {
  cfg.validate();
  if (!(expansion_width_g > 0.0 && expansion_width_g < cfg.box_length) ||
      !(expansion_width_e > 0.0 && expansion_width_e < cfg.box_length)) {
    throw ConfigError("oracle_run_cycle: expansion endpoints must lie inside the box");
  }
  const double L = cfg.box_length;
  const double l = cfg.insertion_point;

  OracleFrame fr;
  fr.n_max = cfg.n_max;
  fr.dim = 6 * cfg.n_max;
  fr.full = level_weights(L, cfg);
  fr.left = level_weights(l, cfg);
  fr.right = level_weights(L - l, cfg);
  fr.left_g = level_weights(expansion_width_g, cfg);
  fr.right_g = level_weights(L - expansion_width_g, cfg);
  fr.left_e = level_weights(expansion_width_e, cfg);
  fr.right_e = level_weights(L - expansion_width_e, cfg);

  const auto [p_left, p_right] = insertion_probabilities(cfg);
  const ComplexMatrix demon = d.density().matrix();
  const double trace_budget = std::max(1e-9, 100.0 * cfg.tail_eps);

  // Stage (i): full-box thermal state times the demon.
  ComplexMatrix rho_i_m =
      system_demon_product(fr, Sector::Full, fr.full.w, demon, 1.0);

  // Stage (ii): insertion mixture, demon untouched.
  ComplexMatrix rho_ins_m =
      system_demon_product(fr, Sector::Left, fr.left.w, demon, p_left) +
      system_demon_product(fr, Sector::Right, fr.right.w, demon, p_right);

  // Stage (iii): controlled-NOT, identity on the left sector, demon flip on
  // the right sector, identity on the (unpopulated) full sector.
  ComplexMatrix cnot = ComplexMatrix::Zero(fr.dim, fr.dim);
  for (int n = 0; n < fr.n_max; ++n) {
    for (int q = 0; q < 2; ++q) {
      cnot(idx(Sector::Left, n, q, fr.n_max), idx(Sector::Left, n, q, fr.n_max)) = 1.0;
      cnot(idx(Sector::Right, n, q, fr.n_max),
           idx(Sector::Right, n, 1 - q, fr.n_max)) = 1.0;
      cnot(idx(Sector::Full, n, q, fr.n_max), idx(Sector::Full, n, q, fr.n_max)) = 1.0;
    }
  }
  const double cnot_defect = unitarity_defect(cnot);
  if (cnot_defect > 1e-14) throw NotUnitaryError(cnot_defect);
  ComplexMatrix rho_mea_m = cnot * rho_ins_m * cnot.adjoint();

  // Stage (iv): controlled expansion, amplitude rescaling per level with the
  // endpoint conditioned on the demon level.
  ComplexMatrix o_exp = ComplexMatrix::Zero(fr.dim, fr.dim);
  for (int n = 0; n < fr.n_max; ++n) {
    o_exp(idx(Sector::Left, n, 0, fr.n_max), idx(Sector::Left, n, 0, fr.n_max)) =
        amplitude_ratio(fr.left_g, fr.left, n);
    o_exp(idx(Sector::Right, n, 0, fr.n_max), idx(Sector::Right, n, 0, fr.n_max)) =
        amplitude_ratio(fr.right_g, fr.right, n);
    o_exp(idx(Sector::Left, n, 1, fr.n_max), idx(Sector::Left, n, 1, fr.n_max)) =
        amplitude_ratio(fr.left_e, fr.left, n);
    o_exp(idx(Sector::Right, n, 1, fr.n_max), idx(Sector::Right, n, 1, fr.n_max)) =
        amplitude_ratio(fr.right_e, fr.right, n);
  }
  ComplexMatrix rho_exp_m = o_exp * rho_mea_m * o_exp.adjoint();

  // Stage (v): removal merges both sectors into the full box.
  ComplexMatrix o_rem = ComplexMatrix::Zero(fr.dim, fr.dim);
  for (int n = 0; n < fr.n_max; ++n) {
    o_rem(idx(Sector::Full, n, 0, fr.n_max), idx(Sector::Left, n, 0, fr.n_max)) =
        amplitude_ratio(fr.full, fr.left_g, n);
    o_rem(idx(Sector::Full, n, 0, fr.n_max), idx(Sector::Right, n, 0, fr.n_max)) =
        amplitude_ratio(fr.full, fr.right_g, n);
    o_rem(idx(Sector::Full, n, 1, fr.n_max), idx(Sector::Left, n, 1, fr.n_max)) =
        amplitude_ratio(fr.full, fr.left_e, n);
    o_rem(idx(Sector::Full, n, 1, fr.n_max), idx(Sector::Right, n, 1, fr.n_max)) =
        amplitude_ratio(fr.full, fr.right_e, n);
  }
  ComplexMatrix rho_rem_m = o_rem * rho_exp_m * o_rem.adjoint();

  OracleResult result;
  result.unitarity_defect = cnot_defect;
  result.expansion_width_g = expansion_width_g;
  result.expansion_width_e = expansion_width_e;

  result.stages.reserve(5);
  result.stages.push_back(
      {CycleStage::Initial, as_stage_state(std::move(rho_i_m), trace_budget, "initial"),
       0.0});
  result.stages.push_back(
      {CycleStage::Inserted,
       as_stage_state(std::move(rho_ins_m), trace_budget, "inserted"), 0.0});
  result.stages.push_back(
      {CycleStage::Measured,
       as_stage_state(std::move(rho_mea_m), trace_budget, "measured"), 0.0});
  result.stages.push_back(
      {CycleStage::Expanded,
       as_stage_state(std::move(rho_exp_m), trace_budget, "expanded"), 0.0});
  result.stages.push_back(
      {CycleStage::Removed,
       as_stage_state(std::move(rho_rem_m), trace_budget, "removed"), 0.0});

  // Stage energies with the widths in force at each stage; the expansion
  // stage conditions the widths on the demon level.
  const LevelWeights* ins_left[2] = {&fr.left, &fr.left};
  const LevelWeights* ins_right[2] = {&fr.right, &fr.right};
  const LevelWeights* exp_left[2] = {&fr.left_g, &fr.left_e};
  const LevelWeights* exp_right[2] = {&fr.right_g, &fr.right_e};
  result.stages[0].energy = stage_energy(result.stages[0].state, fr, cfg, ins_left, ins_right);
  result.stages[1].energy = stage_energy(result.stages[1].state, fr, cfg, ins_left, ins_right);
  result.stages[2].energy = stage_energy(result.stages[2].state, fr, cfg, ins_left, ins_right);
  result.stages[3].energy = stage_energy(result.stages[3].state, fr, cfg, exp_left, exp_right);
  result.stages[4].energy = stage_energy(result.stages[4].state, fr, cfg, ins_left, ins_right);

  // Report extraction: energies from the stage expectations, demon thermody-
  // namics from the reduced states through the generic eigensolver path.
  const int system_dim = 3 * cfg.n_max;
  const DensityMatrix demon_i =
      partial_trace(result.stages[0].state, system_dim, 2, Subsystem::B);
  const DensityMatrix demon_f =
      partial_trace(result.stages[4].state, system_dim, 2, Subsystem::B);

  double p_left_readout = 0.0;
  for (int n = 0; n < fr.n_max; ++n) {
    for (int q = 0; q < 2; ++q) {
      p_left_readout += result.stages[1]
                            .state(idx(Sector::Left, n, q, fr.n_max),
                                   idx(Sector::Left, n, q, fr.n_max))
                            .real();
    }
  }

  const Tolerances tol;
  CycleReport rep;
  rep.p_left = p_left_readout;
  rep.p_right = 1.0 - p_left_readout;
  rep.de_total = result.stages[4].energy - result.stages[0].energy;
  rep.w_measurement = result.stages[2].energy - result.stages[1].energy;
  const double entropy_i = von_neumann_entropy(demon_i);
  const double entropy_f = von_neumann_entropy(demon_f);
  const double diag_entropy_i = von_neumann_entropy(dephase(demon_i));
  const double diag_entropy_f = von_neumann_entropy(dephase(demon_f));
  rep.ds_classical = cfg.k_boltzmann * (diag_entropy_f - diag_entropy_i);
  rep.dc_r = (entropy_f - entropy_i) - (diag_entropy_f - diag_entropy_i);
  rep.q_total = cfg.k_boltzmann * cfg.temperature * (entropy_f - entropy_i);
  rep.q_incoherent = cfg.temperature * rep.ds_classical;
  rep.q_coherent = cfg.k_boltzmann * cfg.temperature * rep.dc_r;
  rep.w_total = rep.q_total - rep.de_total;
  rep.w_incoherent = rep.q_incoherent - rep.de_total;
  rep.w_coherent = rep.q_coherent;
  if (std::abs(rep.q_total) > tol.eig) rep.eta = 1.0 - rep.de_total / rep.q_total;
  rep.eta_carnot = 1.0 - cfg.demon_temperature / cfg.temperature;
  rep.demon_final = DemonState::validated(demon_f(0, 0).real(), demon_f(0, 1), 1e-9);
  result.report = rep;

  result.closed_form = cycle_report_at(cfg, d, p_right, tol);
  result.max_abs_diff = max_report_difference(result.report, result.closed_form);

  const DensityMatrix expected_demon = final_demon(d, p_left).density();
  result.demon_marginal_defect =
      (demon_f.matrix() - expected_demon.matrix()).cwiseAbs().maxCoeff();
  return result;
}

}  // namespace qmd::szilard
