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

#include "qmd/matrixcore.hpp"

#include <algorithm>
#include <cmath>

namespace qmd {

namespace {

Eigen::SelfAdjointEigenSolver<ComplexMatrix> solve_hermitian(const ComplexMatrix& m,
                                                             bool vectors) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es;
  es.compute(m, vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) {
    throw NoConvergenceError("Hermitian eigensolver did not converge at dim " +
                             std::to_string(m.rows()));
  }
  return es;
}

double entropy_of_spectrum(const Eigen::VectorXd& lam) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < lam.size(); ++i) {
    const double x = lam(i);
    if (x > 0.0) s -= x * std::log(x);
  }
  return s;
}

}  // namespace

ProbabilityVector ProbabilityVector::validated(std::vector<double> p, double trace_tol) {
  if (p.empty()) throw InvalidSimplexError("probability vector is empty");
  double sum = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    if (!std::isfinite(p[k])) {
      throw InvalidSimplexError("entry " + std::to_string(k) + " is not finite");
    }
    if (p[k] < 0.0) {
      throw InvalidSimplexError("entry " + std::to_string(k) + " is negative: " +
                                detail::compact(p[k]));
    }
    sum += p[k];
  }
  if (std::abs(sum - 1.0) > trace_tol) {
    throw InvalidSimplexError("entries sum to " + detail::compact(sum) +
                              ", expected 1 within " + detail::compact(trace_tol));
  }
  return ProbabilityVector(std::move(p));
}

ProbabilityVector ProbabilityVector::unchecked(std::vector<double> p) {
  return ProbabilityVector(std::move(p));
}

DensityMatrix DensityMatrix::validated(const ComplexMatrix& m, const Tolerances& tol) {
  if (m.rows() != m.cols() || m.rows() < 1) {
    throw DimensionMismatchError("density matrix must be square, got " +
                                 std::to_string(m.rows()) + "x" +
                                 std::to_string(m.cols()));
  }
  if (!m.allFinite()) {
    throw Error("NonFiniteEntries", "density matrix has NaN or Inf entries");
  }
  const double herm_defect = (m - m.adjoint()).cwiseAbs().maxCoeff();
  if (herm_defect > tol.herm) throw NotHermitianError(herm_defect);
  ComplexMatrix h = 0.5 * (m + m.adjoint());

  const double tr = h.trace().real();
  if (std::abs(tr - 1.0) > tol.trace) throw TraceNotOneError(tr);

  auto es = solve_hermitian(h, true);
  const double min_eig = es.eigenvalues().minCoeff();
  if (min_eig < -tol.psd) throw NotPositiveError(min_eig);
  if (min_eig < 0.0) {
    Eigen::VectorXd lam = es.eigenvalues().cwiseMax(0.0);
    lam /= lam.sum();
    h = es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().adjoint();
    h = 0.5 * (h + h.adjoint());
  }
  return DensityMatrix(std::move(h));
}

DensityMatrix DensityMatrix::unchecked(ComplexMatrix m) {
  return DensityMatrix(std::move(m));
}

DensityMatrix DensityMatrix::diagonal(const std::vector<double>& populations,
                                      const Tolerances& tol) {
  auto p = ProbabilityVector::validated(populations, tol.trace);
  ComplexMatrix m = ComplexMatrix::Zero(p.size(), p.size());
  for (std::size_t k = 0; k < p.size(); ++k) m(k, k) = p[k];
  return DensityMatrix(std::move(m));
}

DensityMatrix DensityMatrix::pure(const Eigen::VectorXcd& psi) {
  const double norm2 = psi.squaredNorm();
  if (!(norm2 > 0.0) || !std::isfinite(norm2)) {
    throw Error("InvalidState", "pure-state vector must be nonzero and finite");
  }
  ComplexMatrix m = (psi * psi.adjoint()) / norm2;
  return DensityMatrix(std::move(m));
}

ProbabilityVector hermitian_eigenvalues(const DensityMatrix& rho, const Tolerances& tol) {
  auto es = solve_hermitian(rho.matrix(), false);
  const auto& lam = es.eigenvalues();  // ascending
  std::vector<double> out(lam.size());
  for (Eigen::Index i = 0; i < lam.size(); ++i) {
    double x = lam(lam.size() - 1 - i);
    if (x < 0.0 && x >= -tol.eig) x = 0.0;
    out[static_cast<std::size_t>(i)] = x;
  }
  return ProbabilityVector::unchecked(std::move(out));
}

double von_neumann_entropy(const DensityMatrix& rho, const Tolerances& tol) {
  auto es = solve_hermitian(rho.matrix(), false);
  (void)tol;
  return entropy_of_spectrum(es.eigenvalues());
}

double shannon_entropy(const ProbabilityVector& p) {
  double s = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    const double x = p[k];
    if (x > 0.0) s -= x * std::log(x);
  }
  return s;
}

double shannon_entropy(const std::vector<double>& p, double trace_tol) {
  return shannon_entropy(ProbabilityVector::validated(p, trace_tol));
}

double binary_entropy(double x) {
  x = std::clamp(x, 0.0, 1.0);
  double s = 0.0;
  if (x > 0.0) s -= x * std::log(x);
  if (x < 1.0) s -= (1.0 - x) * std::log(1.0 - x);
  return s;
}

DensityMatrix dephase(const DensityMatrix& rho) {
  ComplexMatrix m = ComplexMatrix::Zero(rho.dim(), rho.dim());
  for (int i = 0; i < rho.dim(); ++i) m(i, i) = rho(i, i).real();
  return DensityMatrix::unchecked(std::move(m));
}

double relative_entropy_of_coherence(const DensityMatrix& rho, const Tolerances& tol) {
  const double cr = von_neumann_entropy(dephase(rho), tol) - von_neumann_entropy(rho, tol);
  if (cr < 0.0 && cr >= -tol.eig) return 0.0;
  return cr;
}

ComplexMatrix tensor(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b) {
  return DensityMatrix::unchecked(tensor(a.matrix(), b.matrix()));
}

DensityMatrix partial_trace(const DensityMatrix& rho, int dim_a, int dim_b,
                            Subsystem keep) {
  if (dim_a < 1 || dim_b < 1 || rho.dim() != dim_a * dim_b) {
    throw DimensionMismatchError("partial_trace: dim " + std::to_string(rho.dim()) +
                                 " != " + std::to_string(dim_a) + " * " +
                                 std::to_string(dim_b));
  }
  const auto& m = rho.matrix();
  if (keep == Subsystem::A) {
    ComplexMatrix out = ComplexMatrix::Zero(dim_a, dim_a);
    for (int i = 0; i < dim_a; ++i)
      for (int j = 0; j < dim_a; ++j)
        for (int k = 0; k < dim_b; ++k) out(i, j) += m(i * dim_b + k, j * dim_b + k);
    return DensityMatrix::unchecked(std::move(out));
  }
  ComplexMatrix out = ComplexMatrix::Zero(dim_b, dim_b);
  for (int k = 0; k < dim_b; ++k)
    for (int l = 0; l < dim_b; ++l)
      for (int i = 0; i < dim_a; ++i) out(k, l) += m(i * dim_b + k, i * dim_b + l);
  return DensityMatrix::unchecked(std::move(out));
}

ComplexMatrix haar_unitary(int dim, RngStream& rng) {
  if (dim < 1) throw DimensionMismatchError("haar_unitary: dim must be >= 1");
  ComplexMatrix z(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) z(i, j) = rng.complex_gaussian();
  Eigen::HouseholderQR<ComplexMatrix> qr(z);
  ComplexMatrix q = qr.householderQ();
  const ComplexMatrix r = qr.matrixQR();
  // Fixing the phase of the R diagonal makes the decomposition unique and the
  // resulting Q Haar-distributed.
  for (int j = 0; j < dim; ++j) {
    const Complex d = r(j, j);
    const double a = std::abs(d);
    const Complex phase = a > 0.0 ? d / a : Complex(1.0, 0.0);
    q.col(j) *= phase;
  }
  return q;
}

double unitarity_defect(const ComplexMatrix& u) {
  if (u.rows() != u.cols()) return std::numeric_limits<double>::infinity();
  return (u.adjoint() * u - ComplexMatrix::Identity(u.rows(), u.cols()))
      .cwiseAbs()
      .maxCoeff();
}

DensityMatrix conjugate(const DensityMatrix& rho, const ComplexMatrix& u,
                        double unitary_tol) {
  if (u.rows() != u.cols() || u.rows() != rho.dim()) {
    throw DimensionMismatchError("conjugate: operator is " + std::to_string(u.rows()) +
                                 "x" + std::to_string(u.cols()) + ", state dim " +
                                 std::to_string(rho.dim()));
  }
  const double defect = unitarity_defect(u);
  if (defect > unitary_tol) throw NotUnitaryError(defect);
  ComplexMatrix m = u * rho.matrix() * u.adjoint();
  m = 0.5 * (m + m.adjoint());
  return DensityMatrix::unchecked(std::move(m));
}

}  // namespace qmd
