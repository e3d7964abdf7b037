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

#include "zzforge/dynamics.hpp"

#include <cmath>
#include <map>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

namespace zzforge {

namespace {

void check_steps(int steps, double duration) {
  if (steps < 100) throw OutOfRange("propagation needs at least 100 steps");
  if (!(duration >= 0.0) || !std::isfinite(duration))
    throw OutOfRange("propagation duration must be finite and non-negative");
}

CMatrix unitary_product(const HamiltonianFn& h, double t0, double duration,
                        int steps) {
  const double dt = duration / steps;
  CMatrix u;
  for (int k = 0; k < steps; ++k) {
    const CMatrix hk = h(t0 + (k + 0.5) * dt);
    const CMatrix step = expm_skew_hermitian(hk, dt);
    u = k == 0 ? step : CMatrix(step * u);
  }
  return u;
}

CMatrix split_product(const HamiltonianFn& h,
                      const std::vector<CollapseOperator>& ops, double t0,
                      double duration, int steps) {
  const double dt = duration / steps;
  const CMatrix h0 = h(t0 + 0.5 * dt);
  const CMatrix d = liouvillian(CMatrix::Zero(h0.rows(), h0.cols()), ops);
  const CMatrix half = (d * (0.5 * dt)).exp();
  const CMatrix full = half * half;
  CMatrix s = half;
  for (int k = 0; k < steps; ++k) {
    const CMatrix u = expm_skew_hermitian(k == 0 ? h0 : h(t0 + (k + 0.5) * dt), dt);
    const CMatrix step = tensor(u, CMatrix(u.conjugate()));
    s = (k + 1 == steps ? half : full) * (step * s);
  }
  return s;
}

CMatrix lindblad_product(const HamiltonianFn& h,
                         const std::vector<CollapseOperator>& ops, double t0,
                         double duration, int steps, bool split) {
  if (split) return split_product(h, ops, t0, duration, steps);
  const double dt = duration / steps;
  CMatrix s;
  for (int k = 0; k < steps; ++k) {
    const CMatrix hk = h(t0 + (k + 0.5) * dt);
    if (!is_hermitian(hk))
      throw NonHermitian("propagate_lindblad: Hamiltonian is not Hermitian");
    const CMatrix step = (liouvillian(hk, ops) * dt).exp();
    s = k == 0 ? step : CMatrix(step * s);
  }
  return s;
}

void check_halving(const CMatrix& coarse, const CMatrix& fine, double tol,
                   const char* what) {
  const double change = max_abs(fine - coarse);
  if (!(change < tol))
    throw NotConverged(std::string(what) + ": halving dt changed the result by " +
                       std::to_string(change));
}

Complex carrier_phase(double omega, double t) { return std::polar(1.0, omega * t); }

}  // namespace

CMatrix propagate_unitary(const HamiltonianFn& h, double duration, int steps,
                          const StepOptions& opt) {
  check_steps(steps, duration);
  const CMatrix coarse = unitary_product(h, opt.t0, duration, steps);
  if (!opt.check_convergence) return coarse;
  const CMatrix fine = unitary_product(h, opt.t0, duration, 2 * steps);
  check_halving(coarse, fine, opt.tolerance, "propagate_unitary");
  return fine;
}

CMatrix liouvillian(const CMatrix& h, const std::vector<CollapseOperator>& ops) {
  const Eigen::Index d = h.rows();
  const CMatrix id = CMatrix::Identity(d, d);
  CMatrix l = -kI * (tensor(h, id) - tensor(id, CMatrix(h.transpose())));
  for (const auto& c : ops) {
    if (c.rate < 0.0) throw OutOfRange("collapse rate must be non-negative");
    if (c.rate == 0.0) continue;
    if (c.op.rows() != d || c.op.cols() != d)
      throw DimensionMismatch("collapse operator dimension");
    const CMatrix ldl = c.op.adjoint() * c.op;
    l += c.rate * (tensor(c.op, CMatrix(c.op.conjugate())) -
                   0.5 * tensor(ldl, id) -
                   0.5 * tensor(id, CMatrix(ldl.transpose())));
  }
  return l;
}

CMatrix propagate_lindblad_map(const HamiltonianFn& h,
                               const std::vector<CollapseOperator>& ops,
                               double duration, int steps,
                               const StepOptions& opt) {
  check_steps(steps, duration);
  const CMatrix coarse = lindblad_product(h, ops, opt.t0, duration, steps, opt.split_dissipator);
  if (!opt.check_convergence) return coarse;
  const CMatrix fine = lindblad_product(h, ops, opt.t0, duration, 2 * steps, opt.split_dissipator);
  check_halving(coarse, fine, opt.tolerance, "propagate_lindblad");
  return fine;
}

DensityMatrix propagate_lindblad(const HamiltonianFn& h,
                                 const std::vector<CollapseOperator>& ops,
                                 const DensityMatrix& rho0, double duration,
                                 int steps, const StepOptions& opt) {
  const auto map = QuantumProcess::from_superoperator(
      propagate_lindblad_map(h, ops, duration, steps, opt));
  CMatrix rho = map.apply(rho0.matrix());
  rho = 0.5 * (rho + rho.adjoint()).eval();
  return DensityMatrix(rho, 1e-7);
}

// QuantumProcess

QuantumProcess QuantumProcess::from_unitary(CMatrix u) {
  if (!is_unitary(u, 1e-8))
    throw ValidationError("QuantumProcess: matrix is not unitary");
  QuantumProcess p;
  p.kind_ = Kind::Unitary;
  p.dim_ = static_cast<int>(u.rows());
  p.u_ = std::move(u);
  return p;
}

QuantumProcess QuantumProcess::from_superoperator(CMatrix s) {
  const auto n = s.rows();
  const int d = static_cast<int>(std::lround(std::sqrt(static_cast<double>(n))));
  if (s.cols() != n || static_cast<Eigen::Index>(d) * d != n)
    throw DimensionMismatch("superoperator must be d^2 x d^2");
  QuantumProcess p;
  p.kind_ = Kind::LindbladMap;
  p.dim_ = d;
  p.s_ = std::move(s);
  return p;
}

const CMatrix& QuantumProcess::unitary() const {
  if (kind_ != Kind::Unitary)
    throw Unsupported("process is a general map, not a unitary");
  return u_;
}

CMatrix QuantumProcess::superoperator() const {
  if (kind_ == Kind::LindbladMap) return s_;
  return tensor(u_, CMatrix(u_.conjugate()));
}

CMatrix QuantumProcess::apply(const CMatrix& rho) const {
  if (rho.rows() != dim_ || rho.cols() != dim_)
    throw DimensionMismatch("process input dimension");
  if (kind_ == Kind::Unitary) return u_ * rho * u_.adjoint();
  CVector v(dim_ * dim_);
  for (int i = 0; i < dim_; ++i)
    for (int j = 0; j < dim_; ++j) v(i * dim_ + j) = rho(i, j);
  const CVector out = s_ * v;
  CMatrix r(dim_, dim_);
  for (int i = 0; i < dim_; ++i)
    for (int j = 0; j < dim_; ++j) r(i, j) = out(i * dim_ + j);
  return r;
}

QuantumProcess QuantumProcess::then(const QuantumProcess& next) const {
  if (next.dim_ != dim_) throw DimensionMismatch("process composition");
  if (kind_ == Kind::Unitary && next.kind_ == Kind::Unitary) {
    QuantumProcess p = *this;
    p.u_ = next.u_ * u_;
    return p;
  }
  return from_superoperator(next.superoperator() * superoperator());
}

CMatrix QuantumProcess::choi() const {
  const CMatrix s = superoperator();
  const int d = dim_;
  CMatrix c(d * d, d * d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b)
          c(i * d + a, j * d + b) = s(a * d + b, i * d + j);
  return c;
}

double QuantumProcess::trace_preservation_error() const {
  const CMatrix c = choi();
  const int d = dim_;
  double worst = 0.0;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      Complex acc = 0.0;
      for (int a = 0; a < d; ++a) acc += c(i * d + a, j * d + a);
      worst = std::max(worst, std::abs(acc - (i == j ? 1.0 : 0.0)));
    }
  return worst;
}

double QuantumProcess::min_choi_eigenvalue() const {
  const CMatrix c = choi();
  Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (c + c.adjoint()),
                                            Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

// Free evolution

namespace {

CMatrix sigma_minus() {
  CMatrix m = CMatrix::Zero(2, 2);
  m(0, 1) = 1.0;
  return m;
}

std::vector<CollapseOperator> logical_collapse_ops(const DecoherenceSpec& dec) {
  dec.validate();
  std::vector<CollapseOperator> ops;
  for (int q = 0; q < 2; ++q) {
    ops.push_back({on_qubit(sigma_minus(), q), 1.0 / dec.t1[q]});
    ops.push_back({on_qubit(pauli_z(), q), 0.5 * dec.dephasing_rate(q)});
  }
  return ops;
}

}  // namespace

QuantumProcess free_evolution(const EffectiveZZParams& p, double t,
                              const std::optional<DecoherenceSpec>& dec) {
  if (!(t >= 0.0)) throw OutOfRange("free evolution time must be >= 0");
  if (!dec) {
    CMatrix u = CMatrix::Identity(4, 4);
    u(3, 3) = std::polar(1.0, -p.gz * t);
    return QuantumProcess::from_unitary(u);
  }
  CMatrix h = CMatrix::Zero(4, 4);
  h(3, 3) = p.gz;
  return QuantumProcess::from_superoperator(
      (liouvillian(h, logical_collapse_ops(*dec)) * t).exp());
}

QuantumProcess free_evolution_cz(const EffectiveZZParams& p) {
  CMatrix u = CMatrix::Identity(4, 4);
  u(3, 3) = -1.0;
  (void)cz_gate_time(p.gz);  // validates g_z
  return QuantumProcess::from_unitary(u);
}

std::string to_string(ModelKind m) {
  return m == ModelKind::Logical4 ? "logical4" : "threelevel";
}

ModelKind model_from_string(const std::string& s) {
  if (s == "logical4") return ModelKind::Logical4;
  if (s == "threelevel") return ModelKind::ThreeLevel;
  throw ValidationError("unknown model '" + s + "'");
}

CMatrix logical_frame_hamiltonian(const EffectiveZZParams& p,
                                  const LogicalDriveCoefficients& c,
                                  const PulseWaveform& w, double t) {
  CMatrix h = CMatrix::Zero(4, 4);
  h(3, 3) = p.gz;
  const Complex half = std::conj(w.at(t)) * 0.5;
  if (half == Complex{0.0}) return h;
  const RMatrix& coef = w.qubit == 0 ? c.drive1 : c.drive2;
  static constexpr int kPairs[4][2] = {{0, 1}, {0, 2}, {1, 3}, {2, 3}};
  for (const auto& kl : kPairs) {
    const int k = kl[0], l = kl[1];
    if (coef(k, l) == 0.0) continue;
    const double nu = (k == 0 && l == 2) || (k == 1 && l == 3) ? p.omega1 : p.omega2;
    const Complex v = coef(k, l) * half * carrier_phase(w.carrier - nu, t);
    h(k, l) += v;
    h(l, k) += std::conj(v);
  }
  return h;
}

namespace {

int substeps_for(const PulseWaveform& w, double max_dt) {
  int sub = std::max(1, static_cast<int>(std::ceil(w.period / max_dt - 1e-9)));
  while (static_cast<long>(sub) * static_cast<long>(w.samples.size()) < 100) ++sub;
  return sub;
}

// Dressed eigenbasis of the bare ladder with columns ordered like the bare
// product states.
struct DressedFrame {
  CMatrix w;
  RVector energy;  // relative to |00>
  std::vector<int> n1, n2;
};

DressedFrame dressed_frame(const BareDevice& b) {
  if (b.coupling.topology != Topology::DirectCapacitive)
    throw WrongTopology("ThreeLevel simulation needs a direct-coupling device");
  const CMatrix h = build_capacitive_hamiltonian(b.q1, b.q2, b.coupling);
  const int l2 = b.q2.levels;
  const auto dim = h.rows();
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
  DressedFrame f;
  f.w = CMatrix::Zero(dim, dim);
  f.energy = RVector::Zero(dim);
  std::vector<bool> taken(dim, false);
  for (Eigen::Index k = 0; k < dim; ++k) {
    Eigen::Index arg = 0;
    const double ov = es.eigenvectors().col(k).cwiseAbs2().maxCoeff(&arg);
    if (ov < 0.5 || taken[arg])
      throw AmbiguousLabel("dressed state " + std::to_string(k) +
                           " has no unique bare label");
    taken[arg] = true;
    const Complex ph = es.eigenvectors()(arg, k);
    f.w.col(arg) = es.eigenvectors().col(k) * (std::abs(ph) / ph);
    f.energy(arg) = es.eigenvalues()(k);
  }
  f.energy.array() -= f.energy(0);
  for (Eigen::Index k = 0; k < dim; ++k) {
    f.n1.push_back(static_cast<int>(k) / l2);
    f.n2.push_back(static_cast<int>(k) % l2);
  }
  return f;
}

CMatrix ladder(int levels, const std::vector<double>& d) {
  CMatrix a = CMatrix::Zero(levels, levels);
  for (int j = 0; j + 1 < levels; ++j)
    a(j, j + 1) = j < static_cast<int>(d.size()) ? d[j] : std::sqrt(j + 1.0);
  return a;
}

}  // namespace

GateSimulation simulate_gate(const PulseWaveform& w, const SimulationModel& m,
                             const SimulationOptions& opt) {
  w.validate();
  if (!(opt.max_dt > 0.0)) throw OutOfRange("max_dt must be positive");
  const double duration = w.duration();
  const int steps =
      w.samples.empty() ? 0 : substeps_for(w, opt.max_dt) * static_cast<int>(w.samples.size());
  StepOptions so;
  so.check_convergence = opt.check_convergence;
  so.tolerance = opt.tolerance;
  so.split_dissipator = true;

  GateSimulation out;
  if (opt.model == ModelKind::Logical4) {
    const auto coef = logical_drive_coefficients(m.params, m.dipoles);
    const auto& p = m.params;
    HamiltonianFn h = [&](double t) { return logical_frame_hamiltonian(p, coef, w, t); };
    if (steps == 0) {
      out.process = QuantumProcess::from_unitary(CMatrix::Identity(4, 4));
    } else if (!opt.decoherence) {
      out.process = QuantumProcess::from_unitary(propagate_unitary(h, duration, steps, so));
    } else {
      out.process = QuantumProcess::from_superoperator(propagate_lindblad_map(
          h, logical_collapse_ops(*opt.decoherence), duration, steps, so));
    }
    return out;
  }

  if (!m.bare) throw ValidationError("ThreeLevel simulation needs a bare device");
  const DressedFrame f = dressed_frame(*m.bare);
  const int l1 = m.bare->q1.levels, l2 = m.bare->q2.levels;
  const Eigen::Index dim = f.w.rows();
  const double w1 = f.energy(l2), w2 = f.energy(1);
  RVector frame(dim), delta(dim);
  for (Eigen::Index k = 0; k < dim; ++k) {
    frame(k) = f.n1[k] * w1 + f.n2[k] * w2;
    delta(k) = f.energy(k) - frame(k);
  }
  const CMatrix v_bare =
      w.qubit == 0
          ? tensor(ladder(l1, m.dipoles.d1), CMatrix(CMatrix::Identity(l2, l2)))
          : tensor(CMatrix(CMatrix::Identity(l1, l1)), ladder(l2, m.dipoles.d2));
  const CMatrix v_full = v_bare + v_bare.adjoint();
  const CMatrix v = f.w.adjoint() * v_full * f.w;

  struct Term { int k, l; Complex c; double nu; };
  std::vector<Term> terms;
  for (Eigen::Index k = 0; k < dim; ++k)
    for (Eigen::Index l = 0; l < dim; ++l)
      if (f.n1[l] + f.n2[l] == f.n1[k] + f.n2[k] + 1 && std::abs(v(k, l)) > 1e-14)
        terms.push_back({static_cast<int>(k), static_cast<int>(l), v(k, l),
                         frame(l) - frame(k)});
  const bool crt = opt.counter_rotating;
  HamiltonianFn h = [&, crt](double t) {
    CMatrix hm = CMatrix(delta.cast<Complex>().asDiagonal());
    const Complex om = w.at(t);
    if (om == Complex{0.0}) return hm;
    for (const auto& tm : terms) {
      Complex val = tm.c * std::conj(om) * 0.5 * carrier_phase(w.carrier - tm.nu, t);
      if (crt) val += tm.c * om * 0.5 * carrier_phase(-(w.carrier + tm.nu), t);
      hm(tm.k, tm.l) += val;
      hm(tm.l, tm.k) += std::conj(val);
    }
    return hm;
  };

  out.logical = {0, 1, l2, l2 + 1};
  std::vector<CollapseOperator> ops;
  if (opt.decoherence) {
    opt.decoherence->validate();
    const CMatrix i1 = CMatrix::Identity(l1, l1), i2 = CMatrix::Identity(l2, l2);
    const CMatrix a1 = tensor(ladder(l1, {}), i2), a2 = tensor(i1, ladder(l2, {}));
    CMatrix n1 = CMatrix::Zero(l1, l1), n2 = CMatrix::Zero(l2, l2);
    for (int j = 0; j < l1; ++j) n1(j, j) = j;
    for (int j = 0; j < l2; ++j) n2(j, j) = j;
    ops.push_back({a1, 1.0 / opt.decoherence->t1[0]});
    ops.push_back({a2, 1.0 / opt.decoherence->t1[1]});
    ops.push_back({tensor(n1, i2), 2.0 * opt.decoherence->dephasing_rate(0)});
    ops.push_back({tensor(i1, n2), 2.0 * opt.decoherence->dephasing_rate(1)});
  }

  if (steps == 0) {
    // Idle in the frame: only the static detunings act.
    CMatrix u = CMatrix::Identity(dim, dim);
    out.process = QuantumProcess::from_unitary(u);
  } else if (!opt.decoherence) {
    out.process = QuantumProcess::from_unitary(propagate_unitary(h, duration, steps, so));
  } else {
    out.process = QuantumProcess::from_superoperator(
        propagate_lindblad_map(h, ops, duration, steps, so));
  }

  double leak = 0.0;
  for (int k : out.logical) {
    CMatrix rho = CMatrix::Zero(dim, dim);
    rho(k, k) = 1.0;
    const CMatrix r = out.process.apply(rho);
    double inside = 0.0;
    for (int l : out.logical) inside += r(l, l).real();
    leak += 1.0 - inside;
  }
  out.leakage = std::max(0.0, leak / 4.0);
  return out;
}

CMatrix logical_block(const GateSimulation& sim) {
  const CMatrix& u = sim.process.unitary();
  CMatrix b(4, 4);
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) b(r, c) = u(sim.logical[r], sim.logical[c]);
  return b;
}

CnotPhase extract_cnot_phase(const CMatrix& u) {
  if (u.rows() != 4 || u.cols() != 4)
    throw DimensionMismatch("extract_cnot_phase needs a 4x4 matrix");
  const double off = std::max(max_abs(u.block(0, 2, 2, 2)), max_abs(u.block(2, 0, 2, 2)));
  if (off > 1e-3)
    throw NotBlockDiagonal("control partition off-block magnitude " + std::to_string(off));
  const CMatrix b1 = u.block(2, 2, 2, 2);
  CnotPhase r;
  r.phi = std::remainder(std::arg(b1(1, 1)) - std::arg(b1(0, 0)), kTwoPi);
  CMatrix d = CMatrix::Zero(2, 2);
  d(0, 0) = std::polar(1.0, -r.phi / 2);
  d(1, 1) = std::polar(1.0, r.phi / 2);
  const Complex overlap = (d.adjoint() * b1).trace();
  const Complex ph = std::abs(overlap) > 0.0 ? overlap / std::abs(overlap) : Complex{1.0};
  r.residual = (b1 - ph * d).norm();
  return r;
}

CMatrix generalized_cnot(double phi) {
  CMatrix u = CMatrix::Zero(4, 4);
  u(0, 1) = -kI;
  u(1, 0) = -kI;
  u(2, 2) = std::polar(1.0, -phi / 2);
  u(3, 3) = std::polar(1.0, phi / 2);
  return u;
}

CMatrix block_phase_correction(const CMatrix& u, const CMatrix& target, int qubit) {
  if (u.rows() != 4 || target.rows() != 4)
    throw DimensionMismatch("block_phase_correction needs 4x4 matrices");
  Complex acc[2] = {0.0, 0.0};
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) {
      const int br = qubit == 0 ? r >> 1 : r & 1;
      const int bc = qubit == 0 ? c >> 1 : c & 1;
      if (br == bc) acc[br] += std::conj(target(r, c)) * u(r, c);
    }
  CMatrix z = CMatrix::Identity(2, 2);
  z(1, 1) = std::polar(1.0, std::arg(acc[0]) - std::arg(acc[1]));
  return z;
}

}  // namespace zzforge
