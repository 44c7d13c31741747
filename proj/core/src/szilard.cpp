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

#include "qmd/szilard.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>

#include "szilard_detail.hpp"

namespace qmd::szilard {

namespace detail {

// Shifted Boltzmann series over box levels: weight_sum = sum_n
// exp(-beta (E_n - shift)), optionally with the force numerator
// sum_n exp(-beta (E_n - shift)) * 2 beta E_n / width. The shift cancels in
// every ratio these sums feed; it exists to keep narrow boxes representable.
SeriesSums thermal_series(double width, double temperature, const WellConfig& cfg,
                          double energy_shift, bool need_force) {
  const double beta = 1.0 / (cfg.k_boltzmann * temperature);
  SeriesSums out;
  int stop = 0;
  for (int n = 1; n <= cfg.n_max; ++n) {
    const double energy = cfg.energy_scale * n * n / (width * width);
    const double term = std::exp(-beta * (energy - energy_shift));
    out.weight_sum += term;
    if (need_force) out.force_sum += term * 2.0 * beta * energy / width;
    stop = n;
    if (term < cfg.tail_eps * out.weight_sum) break;
  }
  out.terms_used = stop;

  // Integral bound on the dropped terms: sum_{n>N} <= int_N^inf of the same
  // Gaussian, shifted consistently. Evaluated in log space; erfc itself
  // underflows long before the shifted bound stops mattering.
  const double a = std::sqrt(beta * cfg.energy_scale) / width;
  const double x = a * stop;
  double log_erfc;
  if (x < 25.0) {
    log_erfc = std::log(std::erfc(x));
  } else {
    log_erfc = -x * x - std::log(x * std::sqrt(M_PI));  // erfc(x) <= e^{-x^2}/(x sqrt(pi))
  }
  const double log_tail =
      std::log(0.5 * std::sqrt(M_PI) / a) + log_erfc + beta * energy_shift;
  out.tail_bound = std::exp(log_tail);
  if (!(log_tail < std::log(cfg.tail_eps) + std::log(out.weight_sum))) {
    throw TruncationError("series tail " + qmd::detail::compact(out.tail_bound) +
                          " exceeds tail_eps * sum at width " + qmd::detail::compact(width) +
                          ", T " + qmd::detail::compact(temperature) + ", n_max " +
                          std::to_string(cfg.n_max));
  }
  return out;
}

double bisect(const std::function<double(double)>& f, double lo, double hi,
              const BisectOptions& opt) {
  double flo = f(lo);
  double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0.0) == (fhi > 0.0)) {
    throw NoSignChangeError("no sign change over [" + qmd::detail::compact(lo) + ", " +
                            qmd::detail::compact(hi) + "]");
  }
  double mid = 0.5 * (lo + hi);
  double fmid = f(mid);
  for (int it = 0; it < opt.max_iter && (hi - lo) > opt.interval_floor; ++it) {
    if (fmid == 0.0) return mid;
    if ((fmid > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fmid;
    } else {
      hi = mid;
      fhi = fmid;
    }
    mid = 0.5 * (lo + hi);
    fmid = f(mid);
  }
  // Smallest residual among the bracket endpoints and the midpoint.
  double best = mid;
  double fbest = std::abs(fmid);
  if (std::abs(flo) < fbest) {
    best = lo;
    fbest = std::abs(flo);
  }
  if (std::abs(fhi) < fbest) best = hi;
  return best;
}

}  // namespace detail

void WellConfig::validate() const {
  auto bad = [](const std::string& what) { throw ConfigError("WellConfig: " + what); };
  if (!(box_length > 0.0)) bad("box_length must be > 0");
  if (!(insertion_point > 0.0 && insertion_point < box_length))
    bad("insertion_point must lie strictly inside (0, box_length)");
  if (!(temperature > 0.0)) bad("temperature must be > 0");
  if (!(demon_temperature > 0.0)) bad("demon_temperature must be > 0");
  if (!(level_gap > 0.0)) bad("level_gap must be > 0");
  if (n_max < 1) bad("n_max must be >= 1");
  if (!(tail_eps > 0.0)) bad("tail_eps must be > 0");
  if (!(energy_scale > 0.0)) bad("energy_scale must be > 0");
  if (!(k_boltzmann > 0.0)) bad("k_boltzmann must be > 0");
}

DensityMatrix DemonState::density() const {
  ComplexMatrix m(2, 2);
  m(0, 0) = ground_population;
  m(1, 1) = excited_population();
  m(0, 1) = coherence;
  m(1, 0) = std::conj(coherence);
  return DensityMatrix::unchecked(std::move(m));
}

DemonState DemonState::validated(double ground_population, Complex coherence,
                                 double psd_tol) {
  if (!(ground_population >= -psd_tol && ground_population <= 1.0 + psd_tol)) {
    throw Error("InvalidState", "demon ground population " +
                                    qmd::detail::compact(ground_population) +
                                    " outside [0, 1]");
  }
  ground_population = std::clamp(ground_population, 0.0, 1.0);
  const double excited = 1.0 - ground_population;
  const double ball = ground_population * excited;
  if (std::norm(coherence) > ball + psd_tol) {
    throw NotPositiveError(0.5 * (1.0 - std::sqrt((ground_population - excited) *
                                                      (ground_population - excited) +
                                                  4.0 * std::norm(coherence))));
  }
  return DemonState{ground_population, coherence};
}

double energy_level(int n, double width, const WellConfig& cfg) {
  return cfg.energy_scale * static_cast<double>(n) * static_cast<double>(n) /
         (width * width);
}

double partition_function(double width, double temperature, const WellConfig& cfg) {
  if (!(width > 0.0)) throw ConfigError("partition_function: width must be > 0");
  if (!(temperature > 0.0)) throw ConfigError("partition_function: T must be > 0");
  return detail::thermal_series(width, temperature, cfg, 0.0, false).weight_sum;
}

std::pair<double, double> insertion_probabilities(const WellConfig& cfg) {
  cfg.validate();
  const double l = cfg.insertion_point;
  const double r = cfg.box_length - cfg.insertion_point;
  // Each side is summed relative to its own ground energy; the ratio
  // Z(L-l)/Z(l) is then assembled in log space so that strongly lopsided
  // insertion points stay representable.
  const double beta = 1.0 / (cfg.k_boltzmann * cfg.temperature);
  const double shift_l = energy_level(1, l, cfg);
  const double shift_r = energy_level(1, r, cfg);
  const double sum_l =
      detail::thermal_series(l, cfg.temperature, cfg, shift_l, false).weight_sum;
  const double sum_r =
      detail::thermal_series(r, cfg.temperature, cfg, shift_r, false).weight_sum;
  const double log_ratio =
      -beta * (shift_r - shift_l) + std::log(sum_r) - std::log(sum_l);
  // The smaller probability is computed directly, the larger as its exact
  // complement, so P_L + P_R = 1 holds bitwise.
  if (log_ratio >= 0.0) {
    const double p_left = 1.0 / (1.0 + std::exp(log_ratio));
    return {p_left, 1.0 - p_left};
  }
  const double p_right = 1.0 / (1.0 + std::exp(-log_ratio));
  return {1.0 - p_right, p_right};
}

double insertion_point_for(const WellConfig& cfg, double p_right) {
  cfg.validate();
  if (!(p_right > 0.0 && p_right < 1.0)) {
    throw ConfigError("insertion_point_for: p_right must lie in (0, 1)");
  }
  WellConfig probe = cfg;
  const double margin = 1e-9 * cfg.box_length;
  auto f = [&](double l) {
    probe.insertion_point = l;
    return insertion_probabilities(probe).second - p_right;
  };
  return detail::bisect(f, margin, cfg.box_length - margin, {});
}

DemonState thermal_demon(const WellConfig& cfg, double coherence_factor, double phase) {
  if (!(coherence_factor >= 0.0 && coherence_factor <= 1.0)) {
    throw ConfigError("thermal_demon: coherence_factor must lie in [0, 1]");
  }
  const double p_g =
      1.0 / (1.0 + std::exp(-cfg.level_gap / (cfg.k_boltzmann * cfg.demon_temperature)));
  const double radius = std::sqrt(p_g * (1.0 - p_g));
  const Complex f = coherence_factor * radius *
                    Complex(std::cos(phase), std::sin(phase));
  return DemonState{p_g, f};
}

namespace {

// lambda_plus of the 2x2 demon state, clamped against rounding past 1.
double demon_lambda_plus(const DemonState& d) {
  const double z = d.ground_population - d.excited_population();
  const double disc = std::sqrt(z * z + 4.0 * std::norm(d.coherence));
  return std::min(1.0, 0.5 * (1.0 + disc));
}

struct CycleCore {
  double ds_classical;  // k_B * nats
  double dc_r;          // nats
  double de_total;
  DemonState demon_final;
};

CycleCore cycle_core(const WellConfig& cfg, const DemonState& d, double p_right) {
  const double p_left = 1.0 - p_right;
  const DemonState f = final_demon(d, p_left);
  const double diag_i = binary_entropy(d.ground_population);
  const double diag_f = binary_entropy(f.ground_population);
  const double full_i = binary_entropy(demon_lambda_plus(d));
  const double full_f = binary_entropy(demon_lambda_plus(f));
  CycleCore core;
  core.ds_classical = cfg.k_boltzmann * (diag_f - diag_i);
  // dC_r = C_r(initial) - C_r(final) = (S_f - S_i) - (S_diag_f - S_diag_i).
  core.dc_r = (full_f - full_i) - (diag_f - diag_i);
  core.de_total =
      p_right * (d.ground_population - d.excited_population()) * cfg.level_gap;
  core.demon_final = f;
  return core;
}

}  // namespace

double demon_coherence(const DemonState& d) {
  return binary_entropy(d.ground_population) - binary_entropy(demon_lambda_plus(d));
}

DemonState final_demon(const DemonState& d, double p_left) {
  if (!(p_left >= 0.0 && p_left <= 1.0)) {
    throw ConfigError("final_demon: p_left must lie in [0, 1]");
  }
  const double p_right = 1.0 - p_left;
  const double ground =
      d.ground_population * p_left + d.excited_population() * p_right;
  const Complex f = d.coherence * p_left + std::conj(d.coherence) * p_right;
  return DemonState::validated(ground, f, 1e-12);
}

CycleReport cycle_report_at(const WellConfig& cfg, const DemonState& d, double p_right,
                            const Tolerances& tol) {
  cfg.validate();
  if (!(p_right >= 0.0 && p_right <= 1.0)) {
    throw ConfigError("cycle_report_at: p_right must lie in [0, 1]");
  }
  const CycleCore core = cycle_core(cfg, d, p_right);
  CycleReport rep;
  rep.p_left = 1.0 - p_right;
  rep.p_right = p_right;
  rep.de_total = core.de_total;
  rep.w_measurement = core.de_total;
  rep.ds_classical = core.ds_classical;
  rep.dc_r = core.dc_r;
  rep.q_incoherent = cfg.temperature * core.ds_classical;
  rep.q_coherent = cfg.k_boltzmann * cfg.temperature * core.dc_r;
  rep.q_total = rep.q_incoherent + rep.q_coherent;
  rep.w_total = rep.q_total - rep.de_total;
  rep.w_coherent = rep.q_coherent;
  rep.w_incoherent = rep.q_incoherent - rep.de_total;
  if (std::abs(rep.q_total) > tol.eig) {
    rep.eta = 1.0 - rep.de_total / rep.q_total;
  }
  rep.eta_carnot = 1.0 - cfg.demon_temperature / cfg.temperature;
  rep.demon_final = core.demon_final;
  return rep;
}

CycleReport cycle_report(const WellConfig& cfg, const DemonState& d,
                         const Tolerances& tol) {
  const auto [p_left, p_right] = insertion_probabilities(cfg);
  (void)p_left;
  return cycle_report_at(cfg, d, p_right, tol);
}

double critical_probability(const WellConfig& cfg, const DemonState& d) {
  cfg.validate();
  if (!(d.ground_population > d.excited_population())) {
    throw ConfigError("critical_probability: requires p_g > p_e");
  }
  auto f = [&](double p_right) {
    const CycleCore core = cycle_core(cfg, d, p_right);
    return cfg.demon_temperature * (core.ds_classical + cfg.k_boltzmann * core.dc_r) -
           core.de_total;
  };
  return detail::bisect(f, 1e-8, 1.0 - 1e-8, {});
}

double zero_work_probability(const WellConfig& cfg, const DemonState& d) {
  cfg.validate();
  auto f = [&](double p_right) {
    const CycleCore core = cycle_core(cfg, d, p_right);
    return cfg.temperature * (core.ds_classical + cfg.k_boltzmann * core.dc_r) -
           core.de_total;
  };
  return detail::bisect(f, 1e-8, 1.0 - 1e-8, {});
}

double wall_force(double width, double temperature, const WellConfig& cfg) {
  if (!(width > 0.0)) throw ConfigError("wall_force: width must be > 0");
  if (!(temperature > 0.0)) throw ConfigError("wall_force: T must be > 0");
  const double shift = energy_level(1, width, cfg);
  const auto sums = detail::thermal_series(width, temperature, cfg, shift, true);
  return cfg.k_boltzmann * temperature * sums.force_sum / sums.weight_sum;
}

double equilibrium_wall_position(const WellConfig& cfg, double weight_left,
                                 double weight_right) {
  cfg.validate();
  if (!(weight_left > 0.0 && weight_right > 0.0)) {
    throw ConfigError("equilibrium_wall_position: weights must be > 0");
  }
  if (weight_left == weight_right) return 0.5 * cfg.box_length;
  const double total = weight_left + weight_right;
  const double wl = weight_left / total;
  const double wr = weight_right / total;
  auto f = [&](double x) {
    return wl * wall_force(x, cfg.temperature, cfg) -
           wr * wall_force(cfg.box_length - x, cfg.temperature, cfg);
  };
  const double margin = 1e-9 * cfg.box_length;
  return detail::bisect(f, margin, cfg.box_length - margin, {});
}

double max_report_difference(const CycleReport& a, const CycleReport& b) {
  double diff = 0.0;
  auto upd = [&diff](double x, double y) { diff = std::max(diff, std::abs(x - y)); };
  upd(a.p_left, b.p_left);
  upd(a.p_right, b.p_right);
  upd(a.w_measurement, b.w_measurement);
  upd(a.de_total, b.de_total);
  upd(a.ds_classical, b.ds_classical);
  upd(a.dc_r, b.dc_r);
  upd(a.q_incoherent, b.q_incoherent);
  upd(a.q_coherent, b.q_coherent);
  upd(a.q_total, b.q_total);
  upd(a.w_incoherent, b.w_incoherent);
  upd(a.w_coherent, b.w_coherent);
  upd(a.w_total, b.w_total);
  upd(a.eta_carnot, b.eta_carnot);
  if (a.eta.has_value() != b.eta.has_value()) {
    return std::numeric_limits<double>::infinity();
  }
  if (a.eta && b.eta) upd(*a.eta, *b.eta);
  upd(a.demon_final.ground_population, b.demon_final.ground_population);
  upd(a.demon_final.coherence.real(), b.demon_final.coherence.real());
  upd(a.demon_final.coherence.imag(), b.demon_final.coherence.imag());
  return diff;
}

}  // namespace qmd::szilard
