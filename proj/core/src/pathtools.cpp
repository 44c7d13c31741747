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

#include "qmd/pathtools.hpp"

#include <cmath>
#include <string>

namespace qmd::path {

namespace {

void check_endpoint(const DensityMatrix& rho, const PathNode& node, const char* which,
                    double diag_tol) {
  if (rho.dim() != static_cast<int>(node.populations.size())) {
    throw DimensionMismatchError(std::string(which) +
                                 " density dimension does not match the node");
  }
  for (int i = 0; i < rho.dim(); ++i) {
    const double diff = std::abs(rho(i, i).real() - node.populations[i]);
    if (diff > diag_tol) {
      throw EndpointMismatchError(std::string(which) + " diagonal entry " +
                                  std::to_string(i) + " differs from the node population by " +
                                  detail::compact(diff));
    }
  }
}

}  // namespace

void PathSchedule::validate(double diag_tol) const {
  if (nodes.size() < 2) throw ConfigError("schedule needs at least two nodes");
  if (!(temperature > 0.0)) throw ConfigError("schedule temperature must be > 0");
  if (!(k_boltzmann > 0.0)) throw ConfigError("schedule k_boltzmann must be > 0");
  const std::size_t d = nodes.front().energies.size();
  if (d == 0) throw ConfigError("schedule nodes must not be empty");
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const auto& node = nodes[i];
    if (node.energies.size() != d || node.populations.size() != d) {
      throw DimensionMismatchError("node " + std::to_string(i) +
                                   " has inconsistent dimensions");
    }
    for (double e : node.energies) {
      if (!std::isfinite(e))
        throw ConfigError("node " + std::to_string(i) + " has a non-finite energy");
    }
    ProbabilityVector::validated(node.populations, 1e-9);
  }
  if (rho_initial) check_endpoint(*rho_initial, nodes.front(), "rho_initial", diag_tol);
  if (rho_final) check_endpoint(*rho_final, nodes.back(), "rho_final", diag_tol);
}

double internal_energy(const PathNode& node) {
  double e = 0.0;
  for (std::size_t n = 0; n < node.energies.size(); ++n) {
    e += node.populations[n] * node.energies[n];
  }
  return e;
}

double incoherent_heat(const PathSchedule& schedule) {
  schedule.validate();
  double q = 0.0;
  for (std::size_t s = 0; s + 1 < schedule.nodes.size(); ++s) {
    const auto& a = schedule.nodes[s];
    const auto& b = schedule.nodes[s + 1];
    for (std::size_t n = 0; n < a.energies.size(); ++n) {
      q += 0.5 * (a.energies[n] + b.energies[n]) * (b.populations[n] - a.populations[n]);
    }
  }
  return q;
}

double incoherent_work(const PathSchedule& schedule) {
  schedule.validate();
  double w = 0.0;
  for (std::size_t s = 0; s + 1 < schedule.nodes.size(); ++s) {
    const auto& a = schedule.nodes[s];
    const auto& b = schedule.nodes[s + 1];
    for (std::size_t n = 0; n < a.energies.size(); ++n) {
      w -= 0.5 * (a.populations[n] + b.populations[n]) * (b.energies[n] - a.energies[n]);
    }
  }
  return w;
}

PathReport path_report(const PathSchedule& schedule) {
  schedule.validate();
  PathReport rep;
  rep.de = internal_energy(schedule.nodes.back()) - internal_energy(schedule.nodes.front());
  rep.q_incoherent = incoherent_heat(schedule);
  rep.w_incoherent = incoherent_work(schedule);
  rep.has_endpoints = schedule.rho_initial.has_value() && schedule.rho_final.has_value();
  if (rep.has_endpoints) {
    rep.dc_r = relative_entropy_of_coherence(*schedule.rho_initial) -
               relative_entropy_of_coherence(*schedule.rho_final);
    rep.q_coherent = schedule.k_boltzmann * schedule.temperature * rep.dc_r;
  }
  rep.w_coherent = rep.q_coherent;
  rep.q_total = rep.q_incoherent + rep.q_coherent;
  rep.w_total = rep.w_incoherent + rep.w_coherent;
  rep.first_law_residual = rep.de + rep.w_total - rep.q_total;
  return rep;
}

}  // namespace qmd::path
