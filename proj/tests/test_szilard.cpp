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

#include "qmd/szilard.hpp"

using namespace qmd;
using namespace qmd::szilard;

namespace {

WellConfig fig3_config() {
  WellConfig cfg;  // T = 1, T_D = 0.5, gap = 0.5 are the defaults
  return cfg;
}

// Dense scan oracle: first sign change of f over a uniform grid, returned as
// the bracketing interval.
template <typename F>
std::pair<double, double> grid_bracket(F f, double lo, double hi, int points) {
  double prev_x = lo;
  double prev_f = f(lo);
  for (int i = 1; i <= points; ++i) {
    const double x = lo + (hi - lo) * i / points;
    const double fx = f(x);
    if ((fx > 0.0) != (prev_f > 0.0)) return {prev_x, x};
    prev_x = x;
    prev_f = fx;
  }
  return {std::nan(""), std::nan("")};
}

}  // namespace

TEST_CASE("energy levels in reduced units") {
  const WellConfig cfg;
  CHECK(energy_level(1, 1.0, cfg) == 1.0);
  CHECK(energy_level(3, 1.0, cfg) == 9.0);
  CHECK(energy_level(2, 2.0, cfg) == energy_level(2, 1.0, cfg) / 4.0);
}

TEST_CASE("partition function: refinement, monotonicity, cold asymptote") {
  WellConfig cfg;
  const double z = partition_function(1.0, 1.0, cfg);
  // Frozen from the doubled-n_max refinement oracle at first build.
  CHECK(z == doctest::Approx(0.38631860241332611).epsilon(1e-15));
  WellConfig refined = cfg;
  refined.n_max = 100;
  CHECK(std::abs(z - partition_function(1.0, 1.0, refined)) <= 1e-12);

  CHECK(partition_function(0.8, 1.0, cfg) < partition_function(1.0, 1.0, cfg));
  CHECK(partition_function(1.0, 1.0, cfg) < partition_function(1.2, 1.0, cfg));

  // T -> 0: the ground term dominates.
  const double t_cold = 0.05;
  const double z_cold = partition_function(1.0, t_cold, cfg);
  CHECK(z_cold == doctest::Approx(std::exp(-1.0 / t_cold)).epsilon(1e-12));
}

TEST_CASE("partition function: truncation error surfaces") {
  WellConfig cfg;
  CHECK_THROWS_AS((void)partition_function(1.0, 1e4, cfg), TruncationError);
}

TEST_CASE("insertion probabilities") {
  WellConfig cfg = fig3_config();
  cfg.insertion_point = 0.5;
  const auto [pl_mid, pr_mid] = insertion_probabilities(cfg);
  CHECK(pl_mid == 0.5);
  CHECK(pr_mid == 0.5);

  cfg.insertion_point = 0.999;
  CHECK(insertion_probabilities(cfg).first > 0.99);

  // Quantum probability at l = 0.3 differs drastically from the classical
  // l/L = 0.3: the wide side wins when level spacing beats k_B T. Frozen
  // value cross-checked against the doubled-n_max refinement oracle.
  cfg.insertion_point = 0.3;
  const auto [pl, pr] = insertion_probabilities(cfg);
  CHECK(pl == doctest::Approx(0.00011476771783150502).epsilon(1e-12));
  WellConfig refined = cfg;
  refined.n_max = 100;
  CHECK(std::abs(pl - insertion_probabilities(refined).first) <= 1e-14);
  CHECK(std::abs(pl - 0.3) > 0.1);
  CHECK(pl + pr == 1.0);

  // Inverse map round-trips.
  const double l_back = insertion_point_for(cfg, pr);
  CHECK(l_back == doctest::Approx(0.3).epsilon(1e-9));
}

TEST_CASE("thermal demon and coherence") {
  const WellConfig cfg = fig3_config();  // gap/T_D = 1
  const DemonState classical = thermal_demon(cfg, 0.0);
  CHECK(classical.ground_population == doctest::Approx(1.0 / (1.0 + std::exp(-1.0))).epsilon(1e-15));
  CHECK(std::abs(classical.coherence) == 0.0);
  CHECK(demon_coherence(classical) == 0.0);

  const DemonState pure = thermal_demon(cfg, 1.0);
  CHECK(std::norm(pure.coherence) ==
        doctest::Approx(pure.ground_population * pure.excited_population()).epsilon(1e-14));
  CHECK(demon_coherence(pure) == doctest::Approx(binary_entropy(pure.ground_population)).epsilon(1e-12));

  const DemonState mixed = thermal_demon(cfg, 0.7);
  CHECK(mixed.coherence.imag() == 0.0);
  CHECK(mixed.coherence.real() ==
        doctest::Approx(0.7 * std::sqrt(mixed.ground_population * mixed.excited_population())));

  // Closed form against the generic matrixcore pipeline.
  CHECK(demon_coherence(mixed) ==
        doctest::Approx(relative_entropy_of_coherence(mixed.density())).epsilon(1e-12));
  const DemonState half = DemonState::validated(0.5, 0.5);
  CHECK(demon_coherence(half) == doctest::Approx(std::log(2.0)).epsilon(1e-13));

  CHECK_THROWS_AS((void)DemonState::validated(0.6, Complex(0.6, 0.0)), NotPositiveError);
}

TEST_CASE("final demon") {
  const WellConfig cfg = fig3_config();
  const DemonState d = thermal_demon(cfg, 0.6, 0.4);

  const DemonState unchanged = final_demon(d, 1.0);
  CHECK(unchanged.ground_population == doctest::Approx(d.ground_population).epsilon(1e-15));
  CHECK(std::abs(unchanged.coherence - d.coherence) <= 1e-15);

  const DemonState symmetric = final_demon(DemonState::validated(0.8, 0.2), 0.5);
  CHECK(symmetric.ground_population == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(symmetric.coherence.real() == doctest::Approx(0.2).epsilon(1e-15));

  // Purely imaginary coherence cancels at P_L = 1/2: F + F* = 0.
  const DemonState imag = final_demon(DemonState::validated(0.7, Complex(0.0, 0.3)), 0.5);
  CHECK(std::abs(imag.coherence) <= 1e-16);

  // Bloch-ball closure under the cycle map.
  RngStream rng(21);
  for (int trial = 0; trial < 50; ++trial) {
    const double p_g = rng.uniform();
    const double radius = std::sqrt(p_g * (1.0 - p_g));
    const double mag = rng.uniform() * radius;
    const double phase = rng.uniform() * 2.0 * M_PI;
    const DemonState start =
        DemonState::validated(p_g, mag * Complex(std::cos(phase), std::sin(phase)));
    const DemonState end = final_demon(start, rng.uniform());
    CHECK(std::norm(end.coherence) <=
          end.ground_population * end.excited_population() + 1e-12);
  }
}

TEST_CASE("cycle report: exact split identities on random cycles") {
  const WellConfig cfg = fig3_config();
  RngStream rng(22);
  for (int trial = 0; trial < 200; ++trial) {
    const double p_g = 0.5 + 0.499 * rng.uniform();
    const double factor = rng.uniform();
    const double phase = rng.uniform() * 2.0 * M_PI;
    const double radius = std::sqrt(p_g * (1.0 - p_g));
    const DemonState d = DemonState::validated(
        p_g, factor * radius * Complex(std::cos(phase), std::sin(phase)));
    const double p_r = 0.001 + 0.998 * rng.uniform();
    const CycleReport rep = cycle_report_at(cfg, d, p_r);

    CHECK(rep.w_total == rep.q_total - rep.de_total);          // first law
    CHECK(rep.q_total == rep.q_incoherent + rep.q_coherent);   // heat split
    CHECK(rep.w_coherent == rep.q_coherent);                   // coherent work
    CHECK(rep.w_measurement == rep.de_total);                  // Eq-of-measurement work
    CHECK(rep.dc_r >= -1e-12);                                 // consumption only
    CHECK(std::abs(rep.de_total + rep.w_total - rep.q_total) <=
          1e-15 * (std::abs(rep.q_total) + std::abs(rep.w_total) + 1.0));
  }
}

TEST_CASE("cycle report: degenerate and unit-efficiency corners") {
  const WellConfig cfg = fig3_config();

  // p_g = p_e with real F: the cycle does not move the demon at all.
  const CycleReport frozen = cycle_report_at(cfg, DemonState::validated(0.5, 0.3), 0.4);
  CHECK(frozen.de_total == 0.0);
  CHECK(!frozen.eta.has_value());

  // p_g = p_e with imaginary F: no energy moves but coherence burns, eta = 1.
  const CycleReport burn =
      cycle_report_at(cfg, DemonState::validated(0.5, Complex(0.0, 0.3)), 0.4);
  CHECK(burn.de_total == 0.0);
  CHECK(burn.q_total > 0.0);
  REQUIRE(burn.eta.has_value());
  CHECK(*burn.eta == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("cycle report: Fig-3 parameter checks") {
  const WellConfig cfg = fig3_config();
  const DemonState classical = thermal_demon(cfg, 0.0);
  // Classical curve never beats Carnot on a dense grid.
  for (int i = 1; i < 1000; ++i) {
    const double p_r = i / 1000.0;
    const CycleReport rep = cycle_report_at(cfg, classical, p_r);
    REQUIRE(rep.eta.has_value());
    CHECK(*rep.eta <= rep.eta_carnot + 1e-9);
  }
  // The pure demon beats Carnot at small P_R.
  const DemonState pure = thermal_demon(cfg, 1.0);
  const CycleReport rep = cycle_report_at(cfg, pure, 0.05);
  REQUIRE(rep.eta.has_value());
  CHECK(*rep.eta > 0.5);
}

TEST_CASE("critical probability: classical has no interior crossing") {
  const WellConfig cfg = fig3_config();
  CHECK_THROWS_AS((void)critical_probability(cfg, thermal_demon(cfg, 0.0)),
                  NoSignChangeError);
}

TEST_CASE("critical probability: crossing matches the grid-scan oracle") {
  const WellConfig cfg = fig3_config();
  const DemonState pure = thermal_demon(cfg, 1.0);
  const double p_cri = critical_probability(cfg, pure);

  auto excess = [&](double p_r) {
    const CycleReport rep = cycle_report_at(cfg, pure, p_r);
    return *rep.eta - rep.eta_carnot;
  };
  const auto [lo, hi] = grid_bracket(excess, 1e-4, 1.0 - 1e-4, 4000);
  REQUIRE(std::isfinite(lo));
  CHECK(p_cri >= lo);
  CHECK(p_cri <= hi);

  // Local consistency: the curve crosses Carnot downward at the root.
  const double delta = 1e-4;
  CHECK(excess(p_cri - delta) > 0.0);
  CHECK(excess(p_cri + delta) < 0.0);

  // Defining equation residual.
  const CycleReport at_root = cycle_report_at(cfg, pure, p_cri);
  const double residual =
      cfg.demon_temperature * (at_root.ds_classical + cfg.k_boltzmann * at_root.dc_r) -
      at_root.de_total;
  CHECK(std::abs(residual) <= 1e-10);
  CHECK(std::abs(*at_root.eta - at_root.eta_carnot) <= 1e-8);
}

TEST_CASE("zero-work probability") {
  const WellConfig cfg = fig3_config();

  // p_g = p_e keeps W_tot >= 0 everywhere: no crossing.
  CHECK_THROWS_AS((void)zero_work_probability(cfg, DemonState::validated(0.5, Complex(0.0, 0.2))),
                  NoSignChangeError);

  const DemonState classical = thermal_demon(cfg, 0.0);
  const DemonState coherent = thermal_demon(cfg, 0.7);
  const double p0_classical = zero_work_probability(cfg, classical);
  const double p0_coherent = zero_work_probability(cfg, coherent);
  CHECK(p0_coherent > p0_classical);  // coherence defers the stall point

  auto w_tot = [&](double p_r) { return cycle_report_at(cfg, classical, p_r).w_total; };
  const auto [lo, hi] = grid_bracket(w_tot, 1e-4, 1.0 - 1e-4, 4000);
  REQUIRE(std::isfinite(lo));
  CHECK(p0_classical >= lo);
  CHECK(p0_classical <= hi);
  CHECK(std::abs(w_tot(p0_classical)) <= 1e-12);
  CHECK(std::abs(cycle_report_at(cfg, coherent, p0_coherent).w_total) <= 1e-12);
}

TEST_CASE("wall force: symmetry, monotonicity, finite-difference oracle") {
  const WellConfig cfg = fig3_config();
  CHECK(wall_force(0.5, 1.0, cfg) ==
        doctest::Approx(wall_force(cfg.box_length - 0.5, 1.0, cfg)).epsilon(1e-15));
  CHECK(wall_force(0.4, 1.0, cfg) > wall_force(0.6, 1.0, cfg));

  const double h = 1e-5;
  const double analytic = wall_force(0.5, 1.0, cfg);
  const double fd = cfg.k_boltzmann * 1.0 *
                    (std::log(partition_function(0.5 + h, 1.0, cfg)) -
                     std::log(partition_function(0.5 - h, 1.0, cfg))) /
                    (2.0 * h);
  CHECK(std::abs(analytic - fd) / std::abs(analytic) <= 1e-6);
}

TEST_CASE("equilibrium wall position") {
  const WellConfig cfg = fig3_config();
  CHECK(equilibrium_wall_position(cfg, 0.5, 0.5) == 0.5);

  // Heavier left ensemble pushes the wall right, toward the boundary.
  CHECK(equilibrium_wall_position(cfg, 0.999, 0.001) > 0.9);

  const double x = equilibrium_wall_position(cfg, 0.7, 0.3);
  auto imbalance = [&](double w) {
    return 0.7 * wall_force(w, 1.0, cfg) - 0.3 * wall_force(cfg.box_length - w, 1.0, cfg);
  };
  const auto [lo, hi] = grid_bracket(imbalance, 0.01, 0.99, 2000);
  REQUIRE(std::isfinite(lo));
  CHECK(x >= lo);
  CHECK(x <= hi);
  const double force_scale = 0.7 * wall_force(x, 1.0, cfg);
  CHECK(std::abs(imbalance(x)) <= 1e-10 * force_scale);

  CHECK_THROWS_AS((void)equilibrium_wall_position(cfg, 0.0, 1.0), ConfigError);
}

TEST_CASE("config validation") {
  WellConfig cfg;
  cfg.insertion_point = 1.5;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = WellConfig{};
  cfg.temperature = -1.0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = WellConfig{};
  cfg.tail_eps = 0.0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}
