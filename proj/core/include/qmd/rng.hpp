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

#ifndef QMD_RNG_HPP
#define QMD_RNG_HPP

#include <complex>
#include <cstdint>
#include <random>

namespace qmd {

// Seeded random stream. All downstream sampling (uniform, gaussian) is built
// on the raw mt19937_64 output so that a given seed reproduces the exact same
// values on every conforming standard library. Never global: callers thread a
// stream explicitly.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed);

  // Child stream decorrelated from this one, derived from (seed, index) only;
  // it does not depend on how much of the parent has been consumed.
  RngStream substream(std::uint64_t index) const;

  std::uint64_t next_u64();
  double uniform();                    // [0, 1)
  double gaussian();                   // N(0, 1), Box-Muller
  std::complex<double> complex_gaussian();  // standard complex normal

  std::uint64_t seed() const noexcept { return seed_; }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace qmd

#endif  // QMD_RNG_HPP
