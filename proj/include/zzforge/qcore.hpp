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

#pragma once

// Dense complex linear algebra and quantum-object primitives.
//
// Conventions used throughout the library:
//   * two-qubit basis order |00>, |01>, |10>, |11>, qubit 1 is the most
//     significant factor (index = q1 * d2 + q2);
//   * density matrices are vectorized row-major, vec(A X B) = (A (x) B^T) vec(X);
//   * Pauli ordering is lexicographic with identity first (I, X, Y, Z per
//     factor), so for two qubits index 5 is X(x)X.

#include <complex>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "zzforge/errors.hpp"

namespace zzforge {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;
inline constexpr Complex kI{0.0, 1.0};

/// Default numerical tolerances. Checks on Hamiltonians are relative to the
/// largest entry, since entries are in rad/s.
struct Tolerances {
  double hermiticity = 1e-10;
  double unitarity = 1e-9;
  double trace = 1e-9;
  double positivity = 1e-9;
};
inline constexpr Tolerances kTol{};

template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> dagger(
    const Eigen::MatrixBase<Derived>& m) {
  return m.adjoint();
}

/// Kronecker product, (a (x) b)(i*rb + k, j*cb + l) = a(i,j) b(k,l).
template <typename A, typename B>
Eigen::Matrix<typename A::Scalar, Eigen::Dynamic, Eigen::Dynamic> tensor(
    const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b) {
  using Out = Eigen::Matrix<typename A::Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  const Eigen::Index rb = b.rows(), cb = b.cols();
  Out out(a.rows() * rb, a.cols() * cb);
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * rb, j * cb, rb, cb) = a(i, j) * b;
  return out;
}

template <typename Derived>
double max_abs(const Eigen::MatrixBase<Derived>& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

/// True when |m - m^dagger| <= tol * max(1, max|m_ij|).
template <typename Derived>
bool is_hermitian(const Eigen::MatrixBase<Derived>& m,
                  double tol = kTol.hermiticity) {
  if (m.rows() != m.cols()) return false;
  const double scale = std::max(1.0, max_abs(m));
  return max_abs(m - m.adjoint()) <= tol * scale;
}

template <typename Derived>
bool is_unitary(const Eigen::MatrixBase<Derived>& m,
                double tol = kTol.unitarity) {
  if (m.rows() != m.cols()) return false;
  const auto n = m.rows();
  return max_abs(m.adjoint() * m -
                 Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic,
                               Eigen::Dynamic>::Identity(n, n)) <= tol;
}

template <typename A, typename B>
CMatrix commutator(const Eigen::MatrixBase<A>& a,
                   const Eigen::MatrixBase<B>& b) {
  return a * b - b * a;
}

/// exp(-i h t) for Hermitian h, via eigendecomposition.
/// Throws NonHermitian if h fails is_hermitian().
CMatrix expm_skew_hermitian(const CMatrix& h, double t);

/// Reduced matrix of subsystem `keep` for a tensor-product space with the
/// given factor dimensions.
CMatrix partial_trace(const CMatrix& m, std::span<const int> dims, int keep);

/// Pauli basis for one or two qubits in lexicographic order, identity first.
std::vector<CMatrix> pauli_basis(int n_qubits);

CMatrix pauli_i();
CMatrix pauli_x();
CMatrix pauli_y();
CMatrix pauli_z();

/// Single-qubit rotation exp(-i angle (n.sigma)/2) about a unit axis.
CMatrix rotation(double nx, double ny, double nz, double angle);
inline CMatrix rotation_x(double angle) { return rotation(1, 0, 0, angle); }
inline CMatrix rotation_y(double angle) { return rotation(0, 1, 0, angle); }
inline CMatrix rotation_z(double angle) { return rotation(0, 0, 1, angle); }

/// Embeds a single-qubit operator on qubit `which` (0 or 1) of two qubits.
CMatrix on_qubit(const CMatrix& op, int which);

CVector normalize(const CVector& ket);
CMatrix projector(const CVector& ket);
CVector basis_ket(int dim, int index);

/// Half the trace norm of a - b.
double trace_distance(const CMatrix& a, const CMatrix& b);

/// Projects a Hermitian matrix onto the PSD cone (Frobenius-nearest).
CMatrix psd_part(const CMatrix& m);

/// Validated density matrix: Hermitian, unit trace, eigenvalues >= -tol.
class DensityMatrix {
 public:
  DensityMatrix() = default;
  explicit DensityMatrix(CMatrix rho, double tol = kTol.trace);

  static DensityMatrix from_ket(const CVector& ket);
  static DensityMatrix maximally_mixed(int dim);

  const CMatrix& matrix() const { return rho_; }
  Eigen::Index dim() const { return rho_.rows(); }
  double purity() const { return (rho_ * rho_).trace().real(); }

 private:
  CMatrix rho_;
};

}  // namespace zzforge
