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

#include "qmd/rng.hpp"

#include <cmath>

namespace qmd {

namespace {

// splitmix64, used only to decorrelate seeds of child streams.
std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

RngStream::RngStream(std::uint64_t seed) : seed_(seed), engine_(seed) {}

RngStream RngStream::substream(std::uint64_t index) const {
  return RngStream(mix64(mix64(seed_) ^ mix64(index + 1)));
}

std::uint64_t RngStream::next_u64() { return engine_(); }

double RngStream::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::gaussian() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  // u1 in (0, 1] keeps the log finite.
  const double u1 = (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
  const double u2 = static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * M_PI * u2;
  spare_ = r * std::sin(theta);
  have_spare_ = true;
  return r * std::cos(theta);
}

std::complex<double> RngStream::complex_gaussian() {
  const double re = gaussian();
  const double im = gaussian();
  return {re * M_SQRT1_2, im * M_SQRT1_2};
}

}  // namespace qmd
