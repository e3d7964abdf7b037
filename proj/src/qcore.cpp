// Copyright 2026 The zzforge Authors
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

#include "zzforge/qcore.hpp"

#include <numeric>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace zzforge {

CMatrix expm_skew_hermitian(const CMatrix& h, double t) {
  if (!is_hermitian(h)) {
    std::ostringstream msg;
    msg << "expm_skew_hermitian: generator is not Hermitian (|h - h^dag| = "
        << max_abs(h - h.adjoint()) << ")";
    throw NonHermitian(msg.str());
  }
  const CMatrix sym = 0.5 * (h + h.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> es(sym);
  const RVector& w = es.eigenvalues();
  CVector phases(w.size());
  for (Eigen::Index k = 0; k < w.size(); ++k)
    phases(k) = std::exp(-kI * (w(k) * t));
  return es.eigenvectors() * phases.asDiagonal() *
         es.eigenvectors().adjoint();
}

CMatrix partial_trace(const CMatrix& m, std::span<const int> dims, int keep) {
  if (dims.empty() || keep < 0 || keep >= static_cast<int>(dims.size()))
    throw DimensionMismatch("partial_trace: keep index out of range");
  const long total = std::accumulate(dims.begin(), dims.end(), 1L,
                                     std::multiplies<long>());
  if (m.rows() != total || m.cols() != total)
    throw DimensionMismatch("partial_trace: product of dims is " +
                            std::to_string(total) + ", matrix is " +
                            std::to_string(m.rows()) + "x" +
                            std::to_string(m.cols()));
  long left = 1, right = 1;
  for (int k = 0; k < keep; ++k) left *= dims[k];
  for (std::size_t k = keep + 1; k < dims.size(); ++k) right *= dims[k];
  const long dk = dims[keep];
  CMatrix out = CMatrix::Zero(dk, dk);
  for (long a = 0; a < dk; ++a)
    for (long b = 0; b < dk; ++b) {
      Complex acc{0.0, 0.0};
      for (long l = 0; l < left; ++l)
        for (long r = 0; r < right; ++r)
          acc += m((l * dk + a) * right + r, (l * dk + b) * right + r);
      out(a, b) = acc;
    }
  return out;
}

CMatrix pauli_i() { return CMatrix::Identity(2, 2); }

CMatrix pauli_x() {
  CMatrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

CMatrix pauli_y() {
  CMatrix m(2, 2);
  m << 0, -kI, kI, 0;
  return m;
}

CMatrix pauli_z() {
  CMatrix m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

std::vector<CMatrix> pauli_basis(int n_qubits) {
  if (n_qubits < 1 || n_qubits > 2)
    throw Unsupported("pauli_basis: only 1 or 2 qubits are supported");
  const std::vector<CMatrix> single{pauli_i(), pauli_x(), pauli_y(),
                                    pauli_z()};
  if (n_qubits == 1) return single;
  std::vector<CMatrix> out;
  out.reserve(16);
  for (const auto& a : single)
    for (const auto& b : single) out.push_back(tensor(a, b));
  return out;
}

CMatrix rotation(double nx, double ny, double nz, double angle) {
  const double norm = std::sqrt(nx * nx + ny * ny + nz * nz);
  const CMatrix n_sigma =
      (nx * pauli_x() + ny * pauli_y() + nz * pauli_z()) / norm;
  return std::cos(angle / 2) * pauli_i() - kI * std::sin(angle / 2) * n_sigma;
}

CMatrix on_qubit(const CMatrix& op, int which) {
  return which == 0 ? CMatrix(tensor(op, pauli_i()))
                    : CMatrix(tensor(pauli_i(), op));
}

CVector normalize(const CVector& ket) {
  const double n = ket.norm();
  if (n == 0.0) throw DimensionMismatch("normalize: zero vector");
  return ket / n;
}

CMatrix projector(const CVector& ket) { return ket * ket.adjoint(); }

CVector basis_ket(int dim, int index) {
  CVector k = CVector::Zero(dim);
  k(index) = 1.0;
  return k;
}

double trace_distance(const CMatrix& a, const CMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw DimensionMismatch("trace_distance: shape mismatch");
  const CMatrix d = a - b;
  Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (d + d.adjoint()),
                                            Eigen::EigenvaluesOnly);
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

CMatrix psd_part(const CMatrix& m) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (m + m.adjoint()));
  const RVector w = es.eigenvalues().cwiseMax(0.0);
  return es.eigenvectors() * w.cast<Complex>().asDiagonal() *
         es.eigenvectors().adjoint();
}

DensityMatrix::DensityMatrix(CMatrix rho, double tol) : rho_(std::move(rho)) {
  if (rho_.rows() != rho_.cols())
    throw DimensionMismatch("DensityMatrix: matrix is not square");
  if (!is_hermitian(rho_, tol))
    throw NonHermitian("DensityMatrix: matrix is not Hermitian");
  if (std::abs(rho_.trace() - Complex{1.0, 0.0}) > tol)
    throw ValidationError("DensityMatrix: trace differs from 1");
  Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (rho_ + rho_.adjoint()),
                                            Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -tol)
    throw ValidationError("DensityMatrix: negative eigenvalue " +
                          std::to_string(es.eigenvalues().minCoeff()));
}

DensityMatrix DensityMatrix::from_ket(const CVector& ket) {
  return DensityMatrix(projector(normalize(ket)));
}

DensityMatrix DensityMatrix::maximally_mixed(int dim) {
  return DensityMatrix(CMatrix::Identity(dim, dim) / static_cast<double>(dim));
}

}  // namespace zzforge
