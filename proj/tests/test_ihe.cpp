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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "qmd/ihe.hpp"

using namespace qmd;
using namespace qmd::ihe;

namespace {

IheProtocol identity_protocol(const IheConfig& cfg) {
  const int dsr = cfg.dim_system * cfg.dim_reservoir;
  const int dtot = cfg.dim_memory * dsr;
  IheProtocol prot;
  prot.unitary_pre = ComplexMatrix::Identity(dsr, dsr);
  prot.unitary_measure = ComplexMatrix::Identity(dtot, dtot);
  prot.feedback.assign(cfg.dim_memory, ComplexMatrix::Identity(dsr, dsr));
  return prot;
}

double min_chain_residual(const IheTrialReport& rep) {
  double worst = 1e300;
  for (const auto& c : rep.chain) worst = std::min(worst, c.residual);
  return worst;
}

}  // namespace

TEST_CASE("build_initial: Gibbs factors") {
  IheConfig cfg;
  cfg.system_spectrum_initial = {0.0, 1.0};
  const DensityMatrix rho = build_initial(cfg);
  CHECK(rho.dim() == 8);
  CHECK(rho.matrix().trace().real() == doctest::Approx(1.0).epsilon(1e-14));

  // System factor populations at T = 1: (1, e^-1)/(1 + e^-1).
  const DensityMatrix sys =
      partial_trace(partial_trace(rho, 2, 4, Subsystem::B), 2, 2, Subsystem::A);
  const double z = 1.0 + std::exp(-1.0);
  CHECK(sys(0, 0).real() == doctest::Approx(1.0 / z).epsilon(1e-14));
  CHECK(sys(1, 1).real() == doctest::Approx(std::exp(-1.0) / z).epsilon(1e-14));

  // Infinite-temperature limit: maximally mixed factors.
  IheConfig hot = cfg;
  hot.temperature = 1e9;
  const DensityMatrix sys_hot =
      partial_trace(partial_trace(build_initial(hot), 2, 4, Subsystem::B), 2, 2, Subsystem::A);
  CHECK(sys_hot(0, 0).real() == doctest::Approx(0.5).epsilon(1e-8));

  // Degenerate spectrum: maximally mixed at any temperature.
  IheConfig degenerate = cfg;
  degenerate.system_spectrum_initial = {0.7, 0.7};
  const DensityMatrix sys_deg = partial_trace(
      partial_trace(build_initial(degenerate), 2, 4, Subsystem::B), 2, 2, Subsystem::A);
  CHECK(sys_deg(0, 0).real() == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("idle protocol with a diagonal memory") {
  IheConfig cfg;
  cfg.memory_initial = DensityMatrix::diagonal({0.6, 0.4});
  const IheTrialReport rep = run_protocol(cfg, identity_protocol(cfg));
  CHECK(rep.work_extracted == doctest::Approx(0.0).scale(1.0).epsilon(1e-14));
  CHECK(rep.memory_entropy_change == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
  CHECK(rep.dc_r == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
  CHECK(rep.free_energy_change == 0.0);
  CHECK(rep.slack >= -1e-9);
  CHECK(min_chain_residual(rep) >= -1e-9);
}

TEST_CASE("idle protocol with a quenched system Hamiltonian") {
  IheConfig cfg;
  cfg.memory_initial = DensityMatrix::diagonal({1.0, 0.0});
  cfg.system_spectrum_initial = {0.0, 1.0};
  cfg.system_spectrum_final = {0.0, 2.5};
  const IheTrialReport rep = run_protocol(cfg, identity_protocol(cfg));
  // dF_S from the spectra alone.
  const double f_i = -std::log(1.0 + std::exp(-1.0));
  const double f_f = -std::log(1.0 + std::exp(-2.5));
  CHECK(rep.free_energy_change == doctest::Approx(f_f - f_i).epsilon(1e-13));
  // Quench energy is paid with no heat: still within the bound.
  CHECK(rep.slack >= -1e-9);
}

TEST_CASE("coherent memory dephases: dC_r = ln 2 with identity dynamics") {
  IheConfig cfg;  // default memory is |+><+|
  const IheTrialReport rep = run_protocol(cfg, identity_protocol(cfg));
  CHECK(rep.dc_r == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(rep.ds_classical == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
  CHECK(rep.work_extracted == doctest::Approx(0.0).scale(1.0).epsilon(1e-14));
  CHECK(rep.memory_entropy_change == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(rep.slack == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(min_chain_residual(rep) >= -1e-9);
}

TEST_CASE("haar-random protocol honours the bound and the chain") {
  IheConfig cfg;
  RngStream rng(7);
  const IheProtocol prot = sample_protocol(cfg, rng);
  const IheTrialReport rep = run_protocol(cfg, prot);
  CHECK(rep.slack >= -1e-9);
  CHECK(min_chain_residual(rep) >= -1e-9);
  double p_sum = 0.0;
  for (double p : rep.outcome_probabilities) {
    CHECK(p >= -1e-12);
    p_sum += p;
  }
  CHECK(p_sum == doctest::Approx(1.0).epsilon(1e-12));
  for (const auto& c : rep.chain) CHECK(c.holds);
}

TEST_CASE("fuzz: single trial equals a direct run, and is seed-deterministic") {
  IheConfig cfg;
  cfg.trials = 1;
  cfg.seed = 31;
  const FuzzSummary one = fuzz(cfg);
  RngStream sub = RngStream(cfg.seed).substream(0);
  const IheTrialReport direct = run_protocol(cfg, sample_protocol(cfg, sub));
  CHECK(one.min_slack == direct.slack);

  cfg.trials = 64;
  const FuzzSummary a = fuzz(cfg);
  const FuzzSummary b = fuzz(cfg);
  CHECK(a.min_slack == b.min_slack);
  CHECK(a.min_slack_trial == b.min_slack_trial);
  CHECK(a.min_chain_residuals == b.min_chain_residuals);
  CHECK(a.min_slack >= -1e-9);
}

TEST_CASE("fuzz at (2,2,4) stays within the bound") {
  IheConfig cfg;
  cfg.dim_reservoir = 4;
  cfg.trials = 100;
  cfg.seed = 5;
  const FuzzSummary s = fuzz(cfg);
  CHECK(s.min_slack >= -1e-9);
  for (const auto& [name, residual] : s.min_chain_residuals) {
    INFO(name);
    CHECK(residual >= -1e-9);
  }
}

TEST_CASE("diagonal-preserving protocols isolate the coherence term") {
  IheConfig cfg;
  cfg.diagonal_preserving = true;
  cfg.seed = 17;
  const double kt = cfg.k_boltzmann * cfg.temperature;
  for (int t = 0; t < 100; ++t) {
    RngStream sub = RngStream(cfg.seed).substream(t);
    const IheTrialReport rep = run_protocol(cfg, sample_protocol(cfg, sub));
    CHECK(std::abs(rep.ds_classical) < 1e-6);
    CHECK(rep.work_extracted <= kt * rep.dc_r + 1e-9);
  }
}

TEST_CASE("memory ends diagonal: dC_r is the initial memory coherence") {
  IheConfig cfg;
  const double initial_coherence =
      relative_entropy_of_coherence(*cfg.resolved().memory_initial);
  CHECK(initial_coherence == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  for (int t = 0; t < 20; ++t) {
    RngStream sub = RngStream(99).substream(t);
    const IheTrialReport rep = run_protocol(cfg, sample_protocol(cfg, sub));
    CHECK(rep.dc_r == doctest::Approx(initial_coherence).epsilon(1e-10));
  }
}

TEST_CASE("protocol validation") {
  IheConfig cfg;
  IheProtocol prot = identity_protocol(cfg);
  prot.unitary_pre = 1.5 * prot.unitary_pre;
  CHECK_THROWS_AS((void)run_protocol(cfg, prot), NotUnitaryError);

  prot = identity_protocol(cfg);
  prot.feedback.pop_back();
  CHECK_THROWS_AS((void)run_protocol(cfg, prot), DimensionMismatchError);

  prot = identity_protocol(cfg);
  prot.unitary_measure = ComplexMatrix::Identity(4, 4);
  CHECK_THROWS_AS((void)run_protocol(cfg, prot), DimensionMismatchError);

  IheConfig bad;
  bad.dim_memory = 0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = IheConfig{};
  bad.dim_reservoir = 40;  // product dimension over the cap
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = IheConfig{};
  bad.system_spectrum_initial = {0.0, 1.0, 2.0};
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}
