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

// Heat/work accounting along a discretized (E_n(t), P_n(t)) trajectory in the
// energy representation, split into incoherent integrals and the coherent
// endpoint term k_B T dC_r. The midpoint pairing makes the discrete first law
// an algebraic identity at any step count.

#ifndef QMD_PATHTOOLS_HPP
#define QMD_PATHTOOLS_HPP

#include <optional>
#include <vector>

#include "qmd/matrixcore.hpp"

namespace qmd::path {

struct PathNode {
  std::vector<double> energies;     // E_n
  std::vector<double> populations;  // P_n, a simplex of the same length
};

struct PathSchedule {
  std::vector<PathNode> nodes;  // at least two, constant dimension
  double temperature = 1.0;     // accounting bath temperature
  double k_boltzmann = 1.0;
  // Required for the coherent terms; diagonals must match the first/last
  // node populations.
  std::optional<DensityMatrix> rho_initial;
  std::optional<DensityMatrix> rho_final;

  void validate(double diag_tol = 1e-10) const;
};

struct PathReport {
  double de = 0.0;
  double q_incoherent = 0.0;
  double q_coherent = 0.0;
  double q_total = 0.0;
  double w_incoherent = 0.0;
  double w_coherent = 0.0;
  double w_total = 0.0;
  double dc_r = 0.0;              // nats
  double first_law_residual = 0.0;  // de + w - q
  bool has_endpoints = false;     // coherent terms are zero when absent
};

// <E> = sum_n P_n E_n.
double internal_energy(const PathNode& node);

// sum over steps of sum_n ((E_n + E_n')/2) (P_n' - P_n).
double incoherent_heat(const PathSchedule& schedule);

// -sum over steps of sum_n ((P_n + P_n')/2) (E_n' - E_n).
double incoherent_work(const PathSchedule& schedule);

PathReport path_report(const PathSchedule& schedule);

}  // namespace qmd::path

#endif  // QMD_PATHTOOLS_HPP
