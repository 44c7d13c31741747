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

// Internal helpers shared by the closed-form cycle code and the matrix
// oracle. Not installed.

#ifndef QMD_SZILARD_DETAIL_HPP
#define QMD_SZILARD_DETAIL_HPP

#include <functional>

#include "qmd/szilard.hpp"

namespace qmd::szilard::detail {

struct SeriesSums {
  double weight_sum = 0.0;
  double force_sum = 0.0;
  int terms_used = 0;
  double tail_bound = 0.0;
};

SeriesSums thermal_series(double width, double temperature, const WellConfig& cfg,
                          double energy_shift, bool need_force);

struct BisectOptions {
  int max_iter = 200;
  double interval_floor = 1e-12;
};

// Bracketing bisection; throws NoSignChangeError. Returns the candidate with
// the smallest |f| once the interval floor or iteration cap is reached.
double bisect(const std::function<double(double)>& f, double lo, double hi,
              const BisectOptions& opt);

}  // namespace qmd::szilard::detail

#endif  // QMD_SZILARD_DETAIL_HPP
