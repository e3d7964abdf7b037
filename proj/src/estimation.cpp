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

#include "zzforge/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

namespace zzforge {

std::vector<TomographySetting> tomography_settings() {
  const CMatrix ops[3] = {pauli_i(), rotation_x(kPi / 2), rotation_y(kPi / 2)};
  const char* names[3] = {"I", "X90", "Y90"};
  std::vector<TomographySetting> out;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      out.push_back({std::string(names[a]) + "_" + names[b], tensor(ops[a], ops[b])});
  return out;
}

std::vector<CMatrix> setting_povm(const CMatrix& rotation) {
  std::vector<CMatrix> povm;
  const auto d = rotation.rows();
  for (Eigen::Index k = 0; k < d; ++k) {
    CMatrix e = CMatrix::Zero(d, d);
    e(k, k) = 1.0;
    povm.push_back(rotation.adjoint() * e * rotation);
  }
  return povm;
}

namespace {

struct Flat {
  std::vector<const CMatrix*> povm;
  std::vector<double> freq;  // counts / shots of the setting
  double total = 0.0;        // sum of freq
};

Flat flatten(const std::vector<SettingCounts>& data) {
  Flat f;
  for (const auto& s : data) {
    if (s.povm.size() != s.counts.size())
      throw DimensionMismatch("setting has mismatched POVM and counts");
    double n = 0.0;
    for (double c : s.counts) {
      if (c < 0.0 || !std::isfinite(c)) throw ValidationError("counts must be >= 0");
      n += c;
    }
    if (n <= 0.0) continue;
    for (std::size_t k = 0; k < s.counts.size(); ++k) {
      f.povm.push_back(&s.povm[k]);
      f.freq.push_back(s.counts[k] / n);
      f.total += s.counts[k] / n;
    }
  }
  if (f.povm.empty()) throw ValidationError("tomography data is empty");
  return f;
}

double real_trace_product(const CMatrix& a, const CMatrix& b) {
  // Re Tr(a b)
  return (a.transpose().cwiseProduct(b)).sum().real();
}

double log_likelihood(const Flat& f, const CMatrix& rho) {
  double ll = 0.0;
  for (std::size_t i = 0; i < f.povm.size(); ++i) {
    if (f.freq[i] == 0.0) continue;
    const double p = real_trace_product(*f.povm[i], rho);
    if (!(p > 0.0)) return -std::numeric_limits<double>::infinity();
    ll += f.freq[i] * std::log(p);
  }
  return ll / f.total;
}

CMatrix rho_of(const CMatrix& t) {
  CMatrix r = t.adjoint() * t;
  return r / r.trace().real();
}

CMatrix lower_part(const CMatrix& m) {
  return m.triangularView<Eigen::Lower>();
}

// Lower-triangular T with T^dag T = rho for rho positive definite.
CMatrix lower_factor(const CMatrix& rho) {
  const auto d = rho.rows();
  CMatrix j = CMatrix::Zero(d, d);
  for (Eigen::Index k = 0; k < d; ++k) j(k, d - 1 - k) = 1.0;
  const CMatrix flipped = j * rho * j;
  Eigen::LLT<CMatrix> llt(0.5 * (flipped + flipped.adjoint()));
  const CMatrix l = llt.matrixL();
  const CMatrix u = j * l * j;  // upper, rho = u u^dag
  return u.adjoint();
}

}  // namespace

CMatrix linear_inversion_state(const std::vector<SettingCounts>& data) {
  const Flat f = flatten(data);
  const auto d = f.povm.front()->rows();
  const int nq = d == 2 ? 1 : d == 4 ? 2 : 0;
  if (nq == 0) throw Unsupported("state tomography supports 1 or 2 qubits");
  const auto paulis = pauli_basis(nq);
  const Eigen::Index n = static_cast<Eigen::Index>(f.povm.size());
  RMatrix a(n, paulis.size());
  RVector b(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < paulis.size(); ++k)
      a(i, k) = real_trace_product(*f.povm[i], paulis[k]) / static_cast<double>(d);
    b(i) = f.freq[i];
  }
  const RVector r = a.colPivHouseholderQr().solve(b);
  CMatrix rho = CMatrix::Zero(d, d);
  for (std::size_t k = 0; k < paulis.size(); ++k) rho += r(k) * paulis[k] / static_cast<double>(d);
  rho = psd_part(0.5 * (rho + rho.adjoint()));
  const double tr = rho.trace().real();
  if (!(tr > 0.0)) return CMatrix::Identity(d, d) / static_cast<double>(d);
  return rho / tr;
}

MleStateResult mle_density_matrix(const std::vector<SettingCounts>& data,
                                  const MleOptions& opt) {
  const Flat f = flatten(data);
  const auto d = f.povm.front()->rows();
  CMatrix start = linear_inversion_state(data);
  start = start + 1e-9 * CMatrix::Identity(d, d) / static_cast<double>(d);

  // Real parameters: (Re, Im) of the lower-triangular entries of T.
  const Eigen::Index n = d * (d + 1);
  auto pack = [&](const CMatrix& t) {
    RVector x(n);
    Eigen::Index k = 0;
    for (Eigen::Index r = 0; r < d; ++r)
      for (Eigen::Index c = 0; c <= r; ++c) {
        x(k++) = t(r, c).real();
        x(k++) = t(r, c).imag();
      }
    return x;
  };
  auto unpack = [&](const RVector& x) {
    CMatrix t = CMatrix::Zero(d, d);
    Eigen::Index k = 0;
    for (Eigen::Index r = 0; r < d; ++r)
      for (Eigen::Index c = 0; c <= r; ++c, k += 2) t(r, c) = Complex(x(k), x(k + 1));
    return t;
  };
  // Gradient of the mean log-likelihood, 2 T (R - I) / Tr(T^dag T).
  auto gradient = [&](const CMatrix& t) {
    const CMatrix rho = rho_of(t);
    CMatrix rr = CMatrix::Zero(d, d);
    for (std::size_t i = 0; i < f.povm.size(); ++i) {
      if (f.freq[i] == 0.0) continue;
      rr += (f.freq[i] / real_trace_product(*f.povm[i], rho)) * *f.povm[i];
    }
    rr /= f.total;
    const double tau = (t.adjoint() * t).trace().real();
    return pack(lower_part(2.0 * t * (rr - CMatrix::Identity(d, d)) / tau));
  };

  RVector x = pack(lower_factor(start / start.trace().real()));
  MleStateResult res;
  double ll = log_likelihood(f, rho_of(unpack(x)));
  res.log_likelihood.push_back(ll);
  RVector g = gradient(unpack(x));

  // Limited-memory BFGS directions with Armijo backtracking.
  constexpr int kMemory = 10;
  std::vector<RVector> mem_s, mem_y;
  for (int it = 0;; ++it) {
    res.iterations = it;
    res.gradient_norm = g.norm() * x.norm();
    if (res.gradient_norm < opt.gradient_tolerance) {
      res.converged = true;
      break;
    }
    if (it >= opt.max_iterations) break;

    RVector dir = g;
    {
      const std::size_t m = mem_s.size();
      std::vector<double> alpha(m), rho_k(m);
      for (std::size_t k = m; k-- > 0;) {
        rho_k[k] = 1.0 / mem_y[k].dot(mem_s[k]);
        alpha[k] = rho_k[k] * mem_s[k].dot(dir);
        dir -= alpha[k] * mem_y[k];
      }
      if (m > 0) dir *= mem_s.back().dot(mem_y.back()) / mem_y.back().squaredNorm();
      else dir *= 1.0 / std::max(g.norm(), 1e-300) * 1e-2 * x.norm();
      for (std::size_t k = 0; k < m; ++k) {
        const double beta = rho_k[k] * mem_y[k].dot(dir);
        dir += (alpha[k] - beta) * mem_s[k];
      }
    }
    double slope = g.dot(dir);
    if (!(slope > 0.0)) {
      mem_s.clear();
      mem_y.clear();
      dir = g * (1e-2 * x.norm() / std::max(g.norm(), 1e-300));
      slope = g.dot(dir);
    }
    bool accepted = false;
    double step = 1.0;
    RVector x_new;
    double ll_new = ll;
    for (int bt = 0; bt < 60; ++bt) {
      x_new = x + step * dir;
      ll_new = log_likelihood(f, rho_of(unpack(x_new)));
      if (ll_new >= ll + 1e-4 * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      if (!mem_s.empty()) {
        mem_s.clear();
        mem_y.clear();
        continue;
      }
      // No ascent left at machine precision.
      res.converged = res.gradient_norm < 1e-6;
      break;
    }
    const RVector g_new = gradient(unpack(x_new));
    const RVector sk = x_new - x;
    const RVector yk = g - g_new;  // curvature of -L
    if (yk.dot(sk) > 1e-12 * sk.norm() * yk.norm()) {
      mem_s.push_back(sk);
      mem_y.push_back(yk);
      if (static_cast<int>(mem_s.size()) > kMemory) {
        mem_s.erase(mem_s.begin());
        mem_y.erase(mem_y.begin());
      }
    }
    x = x_new;
    g = g_new;
    ll = ll_new;
    res.log_likelihood.push_back(ll);
  }
  CMatrix rho = rho_of(unpack(x));
  rho = 0.5 * (rho + rho.adjoint()).eval();
  res.rho = DensityMatrix(rho, 1e-9);
  return res;
}

double state_fidelity(const DensityMatrix& rho, const CVector& psi) {
  if (psi.size() != rho.dim())
    throw DimensionMismatch("state_fidelity: dimensions differ");
  const Complex f = psi.dot(rho.matrix() * psi);
  if (std::abs(f.imag()) > 1e-10)
    throw NonHermitian("state_fidelity: complex expectation value");
  return std::clamp(f.real(), 0.0, 1.0);
}

PauliTransferMatrix ptm_of_process(const QuantumProcess& p) {
  const int d = p.dim();
  const int nq = d == 2 ? 1 : d == 4 ? 2 : 0;
  if (nq == 0) throw Unsupported("PTM needs a 1- or 2-qubit process");
  const auto paulis = pauli_basis(nq);
  const auto n = static_cast<Eigen::Index>(paulis.size());
  PauliTransferMatrix r(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const CMatrix out = p.apply(paulis[j]);
    for (Eigen::Index i = 0; i < n; ++i)
      r(i, j) = (paulis[i] * out).trace().real() / d;
  }
  return r;
}

PauliTransferMatrix ptm_of_unitary(const CMatrix& u) {
  return ptm_of_process(QuantumProcess::from_unitary(u));
}

PauliTransferMatrix logical_ptm(const GateSimulation& sim) {
  const auto paulis = pauli_basis(2);
  const int n = sim.process.dim();
  PauliTransferMatrix r(16, 16);
  for (int j = 0; j < 16; ++j) {
    CMatrix in = CMatrix::Zero(n, n);
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) in(sim.logical[a], sim.logical[b]) = paulis[j](a, b);
    const CMatrix full = sim.process.apply(in);
    CMatrix out(4, 4);
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) out(a, b) = full(sim.logical[a], sim.logical[b]);
    for (int i = 0; i < 16; ++i) r(i, j) = (paulis[i] * out).trace().real() / 4.0;
  }
  return r;
}

CMatrix ptm_to_choi(const PauliTransferMatrix& r) {
  const auto paulis = pauli_basis(2);
  CMatrix c = CMatrix::Zero(16, 16);
  for (int i = 0; i < 16; ++i)
    for (int j = 0; j < 16; ++j)
      if (r(i, j) != 0.0)
        c += (r(i, j) / 4.0) * tensor(CMatrix(paulis[j].transpose()), paulis[i]);
  return c;
}

PauliTransferMatrix choi_to_ptm(const CMatrix& c) {
  const auto paulis = pauli_basis(2);
  PauliTransferMatrix r(16, 16);
  for (int i = 0; i < 16; ++i)
    for (int j = 0; j < 16; ++j)
      r(i, j) = real_trace_product(
                    c, tensor(CMatrix(paulis[j].transpose()), paulis[i])) / 4.0;
  return r;
}

namespace {

CMatrix partial_trace_out(const CMatrix& c) {
  CMatrix x = CMatrix::Zero(4, 4);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      for (int a = 0; a < 4; ++a) x(i, j) += c(i * 4 + a, j * 4 + a);
  return x;
}

CMatrix project_tp(const CMatrix& c) {
  const CMatrix x = partial_trace_out(c) - CMatrix::Identity(4, 4);
  return c - tensor(x, CMatrix(CMatrix::Identity(4, 4))) / 4.0;
}

CMatrix hermitian(const CMatrix& m) { return 0.5 * (m + m.adjoint()); }

}  // namespace

CMatrix project_cptp(const CMatrix& choi, int max_alternations, double tol,
                     int* alternations, bool* converged) {
  CMatrix x = hermitian(choi);
  CMatrix p = CMatrix::Zero(16, 16), q = CMatrix::Zero(16, 16);
  bool ok = false;
  int it = 0;
  for (; it < max_alternations; ++it) {
    const CMatrix y = project_tp(x + p);
    p = x + p - y;
    const CMatrix xn = psd_part(hermitian(y + q));
    q = y + q - xn;
    const double change = (xn - x).norm();
    x = xn;
    if (change < tol) {
      ok = true;
      ++it;
      break;
    }
  }
  if (alternations) *alternations = it;
  if (converged) *converged = ok;
  return project_tp(x);
}

namespace {

// Iterates C <- L K C K L with K = sum f/p M and L restoring Tr_out C = I.
CMatrix likelihood_refine(const CMatrix& c0, const RMatrix& rows_re,
                          const RMatrix& rows_im, const std::vector<CMatrix>& ops,
                          const RVector& freq, int iterations, int* done) {
  const double floor_p = 1e-12;
  CMatrix c = c0;
  int it = 0;
  for (; it < iterations; ++it) {
    // p_m = Tr(C M_m) via the flattened rows.
    RVector re(256), im(256);
    for (int a = 0; a < 16; ++a)
      for (int b = 0; b < 16; ++b) {
        re(a * 16 + b) = c(b, a).real();
        im(a * 16 + b) = c(b, a).imag();
      }
    const RVector p = rows_re * re - rows_im * im;
    CMatrix k = CMatrix::Zero(16, 16);
    for (Eigen::Index m = 0; m < freq.size(); ++m)
      if (freq(m) > 0.0) k += (freq(m) / std::max(p(m), floor_p)) * ops[m];
    const CMatrix kck = hermitian(k * c * k);
    Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian(partial_trace_out(kck)));
    const RVector ev = es.eigenvalues();
    if (ev.minCoeff() <= 0.0) break;
    const CMatrix lam =
        es.eigenvectors() * ev.cwiseInverse().cwiseSqrt().cast<Complex>().asDiagonal() *
        es.eigenvectors().adjoint();
    const CMatrix l = tensor(lam, CMatrix(CMatrix::Identity(4, 4)));
    c = hermitian(l * kck * l);
  }
  if (done) *done = it;
  return c;
}

}  // namespace

PtmResult mle_ptm(const std::vector<ProcessObservation>& data,
                  const PtmOptions& opt) {
  if (data.empty()) throw ValidationError("process data is empty");
  const auto paulis = pauli_basis(2);

  // Flatten observations: probability = Tr(C (rho^T (x) Pi)).
  std::vector<CMatrix> ops;
  std::vector<double> freq;
  std::vector<double> weight;  // 1 / (number of cells)
  RMatrix design;
  std::vector<RVector> design_rows;
  for (const auto& obs : data) {
    if (obs.input.rows() != 4) throw DimensionMismatch("input state must be 4x4");
    RVector b(16);
    for (int j = 0; j < 16; ++j) b(j) = real_trace_product(paulis[j], obs.input);
    for (const auto& s : obs.settings) {
      double n = 0.0;
      for (double v : s.counts) n += v;
      if (n <= 0.0) continue;
      for (std::size_t k = 0; k < s.povm.size(); ++k) {
        RVector a(16);
        for (int i = 0; i < 16; ++i) a(i) = real_trace_product(s.povm[k], paulis[i]) / 4.0;
        RVector row(256);
        for (int i = 0; i < 16; ++i)
          for (int j = 0; j < 16; ++j) row(i * 16 + j) = a(i) * b(j);
        design_rows.push_back(row);
        ops.push_back(tensor(CMatrix(obs.input.transpose()), s.povm[k]));
        freq.push_back(s.counts[k] / n);
      }
    }
  }
  const Eigen::Index nobs = static_cast<Eigen::Index>(freq.size());
  design.resize(nobs, 256);
  RVector f(nobs);
  for (Eigen::Index m = 0; m < nobs; ++m) {
    design.row(m) = design_rows[m].transpose();
    f(m) = freq[m];
  }

  PtmResult res;
  const RVector sol = design.colPivHouseholderQr().solve(f);
  res.linear = PauliTransferMatrix(16, 16);
  for (int i = 0; i < 16; ++i)
    for (int j = 0; j < 16; ++j) res.linear(i, j) = sol(i * 16 + j);

  CMatrix c = project_cptp(ptm_to_choi(res.linear), opt.max_alternations,
                           opt.projection_tolerance, &res.alternations,
                           &res.converged);

  if (opt.refine && opt.mle_iterations > 0) {
    RMatrix rows_re(nobs, 256), rows_im(nobs, 256);
    for (Eigen::Index m = 0; m < nobs; ++m)
      for (int a = 0; a < 16; ++a)
        for (int b = 0; b < 16; ++b) {
          rows_re(m, a * 16 + b) = ops[m](a, b).real();
          rows_im(m, a * 16 + b) = ops[m](a, b).imag();
        }
    // Skip refinement when the projected estimate already reproduces the
    // data: it is then the likelihood maximum.
    double worst = 0.0;
    for (Eigen::Index m = 0; m < nobs; ++m)
      worst = std::max(worst, std::abs(real_trace_product(c, ops[m]) - f(m)));
    if (worst > 1e-9) {
      const CMatrix start = 0.9 * c + 0.1 * CMatrix::Identity(16, 16) / 4.0;
      c = likelihood_refine(start, rows_re, rows_im, ops, f, opt.mle_iterations,
                            &res.mle_iterations);
    }
  }
  Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian(c), Eigen::EigenvaluesOnly);
  res.min_choi_eigenvalue = es.eigenvalues().minCoeff();
  res.r = choi_to_ptm(c);
  // Exact trace-preservation row.
  res.r.row(0).setZero();
  res.r(0, 0) = 1.0;
  return res;
}

double average_gate_fidelity(const PauliTransferMatrix& rexp,
                             const PauliTransferMatrix& rideal) {
  if (rexp.rows() != 16 || rexp.cols() != 16 || rideal.rows() != 16 ||
      rideal.cols() != 16)
    throw DimensionMismatch("average_gate_fidelity needs 16x16 PTMs");
  return ((rexp.transpose() * rideal).trace() / 4.0 + 1.0) / 5.0;
}

double ptm_purity(const PauliTransferMatrix& r) {
  if (r.rows() != 16 || r.cols() != 16)
    throw DimensionMismatch("ptm_purity needs a 16x16 PTM");
  const RMatrix ru = r.block(1, 1, 15, 15);
  return (ru.transpose() * ru).trace() / 15.0;
}

double unitary_fidelity(const CMatrix& u, const CMatrix& v) {
  if (u.rows() != v.rows() || u.cols() != v.cols())
    throw DimensionMismatch("unitary_fidelity: dimensions differ");
  const double d = static_cast<double>(u.rows());
  return std::norm((u.adjoint() * v).trace()) / (d * d);
}

std::array<double, 2> block_fidelities(const CMatrix& u, const CMatrix& v,
                                       int spectator) {
  if (u.rows() != 4 || v.rows() != 4)
    throw DimensionMismatch("block_fidelities needs 4x4 matrices");
  std::array<double, 2> out{};
  for (int b = 0; b < 2; ++b) {
    CMatrix ub(2, 2), vb(2, 2);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        const int r = spectator == 1 ? i * 2 + b : b * 2 + i;
        const int c = spectator == 1 ? j * 2 + b : b * 2 + j;
        ub(i, j) = u(r, c);
        vb(i, j) = v(r, c);
      }
    out[b] = std::norm((ub.adjoint() * vb).trace()) / 4.0;
  }
  return out;
}

namespace {

struct LinearFit {
  double a = 0.0, b = 0.0, rss = std::numeric_limits<double>::infinity();
};

// Bounded least squares for A and B at fixed p; B pinned when `fixed_b` is
// given.
LinearFit fit_ab(const std::vector<DecayPoint>& t, double p,
                 std::optional<double> fixed_b) {
  const std::size_t n = t.size();
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = std::pow(p, t[i].m);
  auto rss = [&](double a, double b) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double r = t[i].mean - a * x[i] - b;
      s += r * r;
    }
    return s;
  };
  LinearFit best;
  auto consider = [&](double a, double b) {
    if (a < 0.0 || a > 1.0 || b < 0.0 || b > 1.0) return;
    const double s = rss(a, b);
    if (s < best.rss) best = {a, b, s};
  };
  if (fixed_b) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      num += x[i] * (t[i].mean - *fixed_b);
      den += x[i] * x[i];
    }
    consider(den > 0.0 ? std::clamp(num / den, 0.0, 1.0) : 0.0, *fixed_b);
    return best;
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sx += x[i];
    sy += t[i].mean;
    sxx += x[i] * x[i];
    sxy += x[i] * t[i].mean;
  }
  const double det = n * sxx - sx * sx;
  if (std::abs(det) > 1e-14 * std::max(1.0, n * sxx)) {
    const double a = (n * sxy - sx * sy) / det;
    const double b = (sy - a * sx) / n;
    consider(a, b);
  }
  // Edges of the box.
  for (double a : {0.0, 1.0}) {
    double b = 0.0;
    for (std::size_t i = 0; i < n; ++i) b += t[i].mean - a * x[i];
    consider(a, std::clamp(b / n, 0.0, 1.0));
  }
  for (double b : {0.0, 1.0}) {
    double num = 0.0;
    for (std::size_t i = 0; i < n; ++i) num += x[i] * (t[i].mean - b);
    consider(sxx > 0.0 ? std::clamp(num / sxx, 0.0, 1.0) : 0.0, b);
  }
  return best;
}

}  // namespace

namespace {

DecayFit fit_decay_impl(const std::vector<DecayPoint>& table,
                        std::optional<double> fixed_b) {
  // Scan 1 - p on a log grid (plus p = 1), then golden-section refinement.
  auto cost = [&](double p) { return fit_ab(table, p, fixed_b).rss; };
  double best_p = 1.0, best_c = cost(1.0);
  std::vector<double> grid{1.0};
  for (int k = 0; k <= 1200; ++k) grid.push_back(1.0 - std::pow(10.0, -12.0 + 12.0 * k / 1200.0));
  std::size_t best_k = 0;
  for (std::size_t k = 1; k < grid.size(); ++k) {
    const double c = cost(grid[k]);
    if (c < best_c - 1e-15 * (1.0 + best_c)) {
      best_c = c;
      best_p = grid[k];
      best_k = k;
    }
  }
  if (best_k > 0) {
    double lo = grid[std::min(best_k + 1, grid.size() - 1)];
    double hi = best_k == 1 ? 1.0 : grid[best_k - 1];
    if (lo > hi) std::swap(lo, hi);
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
    double f1 = cost(x1), f2 = cost(x2);
    for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
      if (f1 < f2) {
        hi = x2; x2 = x1; f2 = f1;
        x1 = hi - gr * (hi - lo); f1 = cost(x1);
      } else {
        lo = x1; x1 = x2; f1 = f2;
        x2 = lo + gr * (hi - lo); f2 = cost(x2);
      }
    }
    const double pm = 0.5 * (lo + hi);
    if (cost(pm) <= best_c) best_p = pm;
  }
  if (best_p <= 0.0) throw FitFailed("fit_decay: decay base collapsed to 0");

  const LinearFit lf = fit_ab(table, best_p, fixed_b);
  if (!std::isfinite(lf.rss)) throw FitFailed("fit_decay: no feasible amplitude");
  DecayFit fit;
  fit.a = lf.a;
  fit.b = lf.b;
  fit.p = best_p;
  fit.fidelity = 1.0 - (1.0 - best_p) / 2.0;
  fit.rss = lf.rss;
  fit.offset_fixed = fixed_b.has_value();
  const auto n = static_cast<Eigen::Index>(table.size());
  const Eigen::Index np = fixed_b ? 2 : 3;
  RMatrix j(n, np);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double m = table[i].m;
    const double pm = std::pow(best_p, m);
    j(i, 0) = pm;
    j(i, 1) = m > 0.0 ? fit.a * m * std::pow(best_p, m - 1.0) : 0.0;
    if (!fixed_b) j(i, 2) = 1.0;
    fit.residuals.push_back(table[i].mean - fit.a * pm - fit.b);
  }
  const double s2 = n > np ? fit.rss / static_cast<double>(n - np) : 0.0;
  fit.covariance = RMatrix::Zero(3, 3);
  fit.covariance.topLeftCorner(np, np) =
      s2 * (j.transpose() * j).completeOrthogonalDecomposition().pseudoInverse();
  return fit;
}

}  // namespace

DecayFit fit_decay(const std::vector<DecayPoint>& table) {
  if (table.size() < 4)
    throw FitFailed("fit_decay needs at least 4 truncation points, got " +
                    std::to_string(table.size()));
  for (const auto& pt : table)
    if (!std::isfinite(pt.m) || !std::isfinite(pt.mean))
      throw FitFailed("fit_decay: non-finite table entry");
  DecayFit fit = fit_decay_impl(table, std::nullopt);
  // A free offset cannot be told apart from a small fast decay when the data
  // barely decay; fall back to the depolarized single-qubit asymptote.
  const double sd_p = std::sqrt(std::max(0.0, fit.covariance(1, 1)));
  // Same when the decay seen across the measured lengths is within noise.
  auto [lo, hi] = std::minmax_element(
      table.begin(), table.end(),
      [](const DecayPoint& x, const DecayPoint& y) { return x.m < y.m; });
  const double seen = fit.a * (std::pow(fit.p, lo->m) - std::pow(fit.p, hi->m));
  double noise = std::sqrt(fit.rss / static_cast<double>(table.size()));
  for (const auto& pt : table) noise = std::max(noise, pt.stderr_);
  const bool unresolved = !(sd_p < 1.0 - fit.p) || seen <= 3.0 * noise;
  if (fit.p < 1.0 && unresolved) fit = fit_decay_impl(table, 0.5);
  return fit;
}

}  // namespace zzforge
