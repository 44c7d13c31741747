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

// Five-stage Szilard cycle driven by a coherent demon qubit: single-particle
// box thermodynamics, demon algebra, closed-form cycle accounting, the
// critical-probability root finds, and a truncated full-matrix oracle that
// replays the cycle stage by stage.

#ifndef QMD_SZILARD_HPP
#define QMD_SZILARD_HPP

#include <optional>
#include <utility>
#include <vector>

#include "qmd/matrixcore.hpp"

namespace qmd::szilard {

// Single-particle box plus demon parameters. Reduced units by default:
// E_n(x) = energy_scale * n^2 / x^2 with energy_scale = hbar^2 pi^2 / (2m) = 1,
// and k_boltzmann = 1; both are explicit so dimensional runs stay possible.
struct WellConfig {
  double box_length = 1.0;         // L
  double insertion_point = 0.5;    // l, 0 < l < L
  double temperature = 1.0;        // T, system bath
  double demon_temperature = 0.5;  // T_D
  double level_gap = 0.5;          // demon gap E_e - E_g
  double ground_energy = 0.0;      // demon E_g
  int n_max = 50;                  // truncation order for level sums
  double tail_eps = 1e-12;         // relative tail bound for the series
  double energy_scale = 1.0;
  double k_boltzmann = 1.0;

  void validate() const;  // throws ConfigError
};

// Demon qubit (p_g, F): diagonal populations plus one complex off-diagonal
// element, constrained to the Bloch ball |F|^2 <= p_g p_e.
struct DemonState {
  double ground_population = 1.0;  // p_g
  Complex coherence = 0.0;         // F

  double excited_population() const { return 1.0 - ground_population; }
  DensityMatrix density() const;  // [[p_g, F], [F*, p_e]]

  static DemonState validated(double ground_population, Complex coherence,
                              double psd_tol = 1e-9);
};

// One cycle's accounting. The split identities hold by construction:
// q_total = q_incoherent + q_coherent, w_total = q_total - de_total,
// w_coherent = q_coherent = k_B T dC_r.
struct CycleReport {
  double p_left = 0.0;
  double p_right = 0.0;
  double w_measurement = 0.0;  // work done by the agent during measurement
  double de_total = 0.0;       // total internal-energy change
  double ds_classical = 0.0;   // diagonal entropy change, k_B * nats
  double dc_r = 0.0;           // coherence consumption, nats
  double q_incoherent = 0.0;
  double q_coherent = 0.0;
  double q_total = 0.0;
  double w_incoherent = 0.0;
  double w_coherent = 0.0;
  double w_total = 0.0;
  std::optional<double> eta;  // empty when |q_total| <= tol.eig (degenerate)
  double eta_carnot = 0.0;    // 1 - T_D / T
  DemonState demon_final;
};

// E_n(width) = energy_scale * n^2 / width^2.
double energy_level(int n, double width, const WellConfig& cfg);

// Z(width) = sum_n exp(-E_n(width)/(k_B T)), truncated at the smaller of
// n_max and the first term below tail_eps times the running sum; the integral
// tail bound must also clear tail_eps, otherwise TruncationError.
double partition_function(double width, double temperature, const WellConfig& cfg);

// (P_L, P_R) with P_L = Z(l) / [Z(l) + Z(L-l)].
std::pair<double, double> insertion_probabilities(const WellConfig& cfg);

// Insertion point l with P_R(l) = p_right (P_R is strictly decreasing in l).
double insertion_point_for(const WellConfig& cfg, double p_right);

// Demon thermal at T_D with tunable coherence magnitude and phase:
// p_g = 1/(1 + exp(-gap/(k_B T_D))), F = factor * sqrt(p_g p_e) * e^{i phase}.
DemonState thermal_demon(const WellConfig& cfg, double coherence_factor,
                         double phase = 0.0);

// C_r of the demon via the closed 2x2 form H(p_g) - H(lambda_plus).
double demon_coherence(const DemonState& d);

// Demon after the full cycle: p_g' = p_g P_L + p_e P_R, F' = F P_L + F* P_R.
DemonState final_demon(const DemonState& d, double p_left);

// Closed-form cycle quantities; P_L/P_R from the insertion point.
CycleReport cycle_report(const WellConfig& cfg, const DemonState& d,
                         const Tolerances& tol = {});

// Same with P_R imposed directly (parameter sweeps, root finds).
CycleReport cycle_report_at(const WellConfig& cfg, const DemonState& d,
                            double p_right, const Tolerances& tol = {});

// P_R where the efficiency crosses Carnot:
// T_D (dS_c + k_B dC_r) = P_R (p_g - p_e) gap. NoSignChange if the curve
// stays on one side of Carnot over the interior bracket.
double critical_probability(const WellConfig& cfg, const DemonState& d);

// P_R with w_total = 0 (efficiency reaches zero).
double zero_work_probability(const WellConfig& cfg, const DemonState& d);

// Outward pressure on a wall of a box of the given width,
// k_B T d ln Z / d width, from the term-wise analytic derivative.
double wall_force(double width, double temperature, const WellConfig& cfg);

// Wall position where weighted left/right forces balance:
// w_left f(x) = w_right f(L - x). Returns L/2 exactly for equal weights.
double equilibrium_wall_position(const WellConfig& cfg, double weight_left,
                                 double weight_right);

// ---------------------------------------------------------------------------
// Truncated full-matrix oracle. The three eigenfunction families (left
// sector, right sector, full box) are mutually orthonormal abstract labels;
// the state space is (3 n_max) x 2 and every stage state is built explicitly.
// ---------------------------------------------------------------------------

enum class CycleStage { Initial, Inserted, Measured, Expanded, Removed };

enum class Sector { Left = 0, Right = 1, Full = 2 };

// Basis index of |sector, n> x |q> with n in [0, n_max) and q in {0=g, 1=e}.
int oracle_basis_index(Sector sector, int n, int demon_level, int n_max);

struct StageState {
  CycleStage stage;
  DensityMatrix state;
  double energy;  // tr[rho (H_S + H_D)] with the stage's conditional widths
};

struct OracleResult {
  std::vector<StageState> stages;  // initial .. removed
  CycleReport report;              // extracted from the stage matrices
  CycleReport closed_form;
  double max_abs_diff;             // worst field disagreement vs closed form
  double unitarity_defect;         // max |U^dag U - I| of the measurement CNOT
  double demon_marginal_defect;    // vs final_demon(), entrywise
  double expansion_width_g;        // l_g actually used
  double expansion_width_e;        // l_e actually used
};

// Expansion endpoints default to the demon-conditioned equilibrium positions
// (branch weights p_g P_L : p_e P_R for g, mirrored for e); the closed forms
// are independent of them, which the oracle confirms.
OracleResult oracle_run_cycle(const WellConfig& cfg, const DemonState& d);
OracleResult oracle_run_cycle(const WellConfig& cfg, const DemonState& d,
                              double expansion_width_g, double expansion_width_e);

// Worst absolute disagreement across all report fields (eta compared only
// when defined on both sides).
double max_report_difference(const CycleReport& a, const CycleReport& b);

}  // namespace qmd::szilard

#endif  // QMD_SZILARD_HPP
