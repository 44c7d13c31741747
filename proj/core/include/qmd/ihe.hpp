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

// Measurement-feedback information heat engine: memory M measures and steers
// a system S coupled to a reservoir R. Monte-Carlo harness for the
// coherence-modified extractable-work bound
//   W_ext <= -dF_S + T dS_c + k_B T dC_r
// together with every intermediate entropy inequality in its derivation.

#ifndef QMD_IHE_HPP
#define QMD_IHE_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qmd/matrixcore.hpp"

namespace qmd::ihe {

struct IheConfig {
  int dim_memory = 2;
  int dim_system = 2;
  int dim_reservoir = 2;
  double temperature = 1.0;
  // Diagonal spectra; empty means {0, 1, ..., d-1}, and an empty final system
  // spectrum means "no quench" (same as initial).
  std::vector<double> system_spectrum_initial;
  std::vector<double> system_spectrum_final;
  std::vector<double> reservoir_spectrum;
  // Default: the uniform coherent pure state, maximally useful to the demon.
  std::optional<DensityMatrix> memory_initial;
  int trials = 1;
  std::uint64_t seed = 0;
  double numerical_slack = 1e-9;
  double k_boltzmann = 1.0;
  // Restrict the measurement unitary to memory-population-preserving block
  // form. Drives the dS_c = 0 special case of the bound.
  bool diagonal_preserving = false;

  IheConfig resolved() const;  // defaults filled in, validated
  void validate() const;
};

// One sampled protocol: pre-measurement SR unitary, global measurement
// unitary, and one feedback unitary on SR per memory outcome.
struct IheProtocol {
  ComplexMatrix unitary_pre;              // on S x R
  ComplexMatrix unitary_measure;          // on M x S x R
  std::vector<ComplexMatrix> feedback;    // dim_memory entries, each on S x R
};

IheProtocol sample_protocol(const IheConfig& cfg, RngStream& rng);

struct ChainCheck {
  std::string name;
  double residual;  // >= 0 up to numerical slack when the inequality holds
  bool holds;
};

struct IheTrialReport {
  std::vector<double> outcome_probabilities;  // p_k
  double work_extracted = 0.0;                // W_ext = -dE_S + Q_S
  double free_energy_change = 0.0;            // dF_S
  double memory_entropy_change = 0.0;         // dS, nats
  double ds_classical = 0.0;                  // dS_c, k_B * nats
  double dc_r = 0.0;                          // dC_r, nats
  double bound_rhs = 0.0;
  double slack = 0.0;  // bound_rhs - work_extracted
  std::vector<ChainCheck> chain;
  bool klein_support_deficient = false;
};

// Thermal product state rho_M x gibbs(H_S) x gibbs(H_R).
DensityMatrix build_initial(const IheConfig& cfg);

IheTrialReport run_protocol(const IheConfig& cfg, const IheProtocol& prot);

struct FuzzSummary {
  int trials = 0;
  double min_slack = 0.0;
  std::uint64_t min_slack_trial = 0;
  IheProtocol min_slack_protocol;  // the protocol that achieved min_slack
  std::map<std::string, double> min_chain_residuals;
  struct NearSaturation {
    std::uint64_t trial;
    double slack;
    IheProtocol protocol;
    IheTrialReport report;
  };
  std::vector<NearSaturation> near_saturation;  // capped; see count
  int near_saturation_count = 0;
};

// Deterministic for a given seed: trial t uses substream(seed, t). Throws
// BoundViolationError the moment any slack drops below -numerical_slack.
FuzzSummary fuzz(const IheConfig& cfg);

}  // namespace qmd::ihe

#endif  // QMD_IHE_HPP
