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

// Dense complex Hermitian kernel: validated density matrices, spectra,
// entropies, coherence, composition and Haar-random unitaries. Everything
// here is a pure function of its inputs; entropies are in nats.

#ifndef QMD_MATRIXCORE_HPP
#define QMD_MATRIXCORE_HPP

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "qmd/errors.hpp"
#include "qmd/rng.hpp"

namespace qmd {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;

// Validation thresholds. All overridable per call site.
struct Tolerances {
  double herm = 1e-10;   // max |m(i,j) - conj(m(j,i))|
  double trace = 1e-10;  // |tr - 1|
  double psd = 1e-9;     // eigenvalues in [-psd, 0) are clamped to zero
  double eig = 1e-12;    // eigensolver accuracy contract (dim <= 64)
};

// Discrete probability distribution: entries nonnegative, summing to one.
class ProbabilityVector {
 public:
  static ProbabilityVector validated(std::vector<double> p, double trace_tol = 1e-10);
  // Caller guarantees the simplex invariants (e.g. clamped eigenvalues).
  static ProbabilityVector unchecked(std::vector<double> p);

  std::size_t size() const { return p_.size(); }
  double operator[](std::size_t k) const { return p_[k]; }
  const std::vector<double>& values() const { return p_; }

 private:
  explicit ProbabilityVector(std::vector<double> p) : p_(std::move(p)) {}
  std::vector<double> p_;
};

// Hermitian, unit-trace, positive-semidefinite matrix: the universal state
// carrier. Construction goes through validated() -- which hermitizes within
// tolerance, rejects real violations and clamps/renormalizes eigenvalues in
// [-psd, 0) -- or through unchecked() for results of operations that preserve
// the invariants by construction (tensor, conjugation, partial trace, ...).
class DensityMatrix {
 public:
  static DensityMatrix validated(const ComplexMatrix& m, const Tolerances& tol = {});
  static DensityMatrix unchecked(ComplexMatrix m);
  static DensityMatrix diagonal(const std::vector<double>& populations,
                                const Tolerances& tol = {});
  // |psi><psi| / <psi|psi>
  static DensityMatrix pure(const Eigen::VectorXcd& psi);

  int dim() const { return static_cast<int>(m_.rows()); }
  const ComplexMatrix& matrix() const { return m_; }
  Complex operator()(int i, int j) const { return m_(i, j); }

 private:
  explicit DensityMatrix(ComplexMatrix m) : m_(std::move(m)) {}
  ComplexMatrix m_;
};

// Real spectrum of a valid density matrix, sorted descending. Eigenvalues in
// [-tol.eig, 0) are clamped to zero.
ProbabilityVector hermitian_eigenvalues(const DensityMatrix& rho,
                                        const Tolerances& tol = {});

// S(rho) = -tr(rho ln rho), nats; 0 ln 0 = 0.
double von_neumann_entropy(const DensityMatrix& rho, const Tolerances& tol = {});

// H(p) = -sum p_k ln p_k, nats.
double shannon_entropy(const ProbabilityVector& p);
double shannon_entropy(const std::vector<double>& p, double trace_tol = 1e-10);

// -x ln x - (1-x) ln (1-x); arguments clamped into [0, 1].
double binary_entropy(double x);

// Deletes all off-diagonal elements (reference basis is the computational
// basis of the current representation).
DensityMatrix dephase(const DensityMatrix& rho);

// C_r(rho) = S(dephase(rho)) - S(rho) >= 0; tiny negatives clamp to zero.
double relative_entropy_of_coherence(const DensityMatrix& rho,
                                     const Tolerances& tol = {});

// Kronecker product; (a x b)[(i*db+k),(j*db+l)] = a(i,j) * b(k,l).
ComplexMatrix tensor(const ComplexMatrix& a, const ComplexMatrix& b);
DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b);

enum class Subsystem { A, B };

// Reduced state of a bipartite rho with dim = dim_a * dim_b.
DensityMatrix partial_trace(const DensityMatrix& rho, int dim_a, int dim_b,
                            Subsystem keep);

// Haar-distributed unitary: QR of an i.i.d. complex-Gaussian matrix with the
// phase of the R diagonal absorbed into Q. Deterministic for a given stream.
ComplexMatrix haar_unitary(int dim, RngStream& rng);

// u rho u^dag, checking unitarity of u within unitary_tol first.
DensityMatrix conjugate(const DensityMatrix& rho, const ComplexMatrix& u,
                        double unitary_tol = 1e-12);

// max |u^dag u - I|.
double unitarity_defect(const ComplexMatrix& u);

}  // namespace qmd

#endif  // QMD_MATRIXCORE_HPP
