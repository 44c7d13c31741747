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

#ifndef QMD_ERRORS_HPP
#define QMD_ERRORS_HPP

#include <cstdio>
#include <stdexcept>
#include <string>

namespace qmd {

namespace detail {
// std::to_string flattens small violations to 0.000000; errors need the
// actual magnitude.
inline std::string compact(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}
}  // namespace detail

// Every library failure carries a stable machine-readable kind next to the
// human-readable message; the CLI maps kinds onto its structured error JSON.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& message)
      : std::runtime_error(message), kind_(std::move(kind)) {}
  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

class NotHermitianError : public Error {
 public:
  explicit NotHermitianError(double violation)
      : Error("NotHermitian", "matrix is not Hermitian: max |m(i,j) - conj(m(j,i))| = " +
                                  detail::compact(violation)),
        violation(violation) {}
  double violation;
};

class TraceNotOneError : public Error {
 public:
  explicit TraceNotOneError(double trace)
      : Error("TraceNotOne", "trace deviates from one: tr = " + detail::compact(trace)),
        trace(trace) {}
  double trace;
};

class NotPositiveError : public Error {
 public:
  explicit NotPositiveError(double min_eigenvalue)
      : Error("NotPositive",
              "matrix is not positive semidefinite: min eigenvalue = " +
                  detail::compact(min_eigenvalue)),
        min_eigenvalue(min_eigenvalue) {}
  double min_eigenvalue;
};

class InvalidSimplexError : public Error {
 public:
  explicit InvalidSimplexError(const std::string& message)
      : Error("InvalidSimplex", message) {}
};

class NoConvergenceError : public Error {
 public:
  explicit NoConvergenceError(const std::string& message)
      : Error("NoConvergence", message) {}
};

class DimensionMismatchError : public Error {
 public:
  explicit DimensionMismatchError(const std::string& message)
      : Error("DimensionMismatch", message) {}
};

class NotUnitaryError : public Error {
 public:
  explicit NotUnitaryError(double defect)
      : Error("NotUnitary",
              "operator is not unitary: max |U^dag U - I| = " + detail::compact(defect)),
        defect(defect) {}
  double defect;
};

class TruncationError : public Error {
 public:
  explicit TruncationError(const std::string& message)
      : Error("TruncationInsufficient", message) {}
};

class NoSignChangeError : public Error {
 public:
  explicit NoSignChangeError(const std::string& message)
      : Error("NoSignChange", message) {}
};

class DegenerateCycleError : public Error {
 public:
  explicit DegenerateCycleError(const std::string& message)
      : Error("DegenerateCycle", message) {}
};

class EndpointMismatchError : public Error {
 public:
  explicit EndpointMismatchError(const std::string& message)
      : Error("EndpointDiagonalMismatch", message) {}
};

class BoundViolationError : public Error {
 public:
  explicit BoundViolationError(const std::string& message)
      : Error("BoundViolation", message) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& message) : Error("ConfigError", message) {}
};

}  // namespace qmd

#endif  // QMD_ERRORS_HPP
