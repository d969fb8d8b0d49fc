#include "repqed/qmath.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

namespace repqed::qm {

namespace {

void require(bool cond, const char* msg) {
  if (!cond) throw std::invalid_argument(msg);
}

bool is_power_of_two(Eigen::Index x) { return x > 0 && (x & (x - 1)) == 0; }

int log2_dim(Eigen::Index x) {
  int n = 0;
  while ((Eigen::Index{1} << n) < x) ++n;
  return n;
}

}  // namespace

PureState::PureState(ComplexVector a, bool is_normalized)
    : amps(std::move(a)), normalized(is_normalized) {
  require(amps.size() > 0, "PureState: empty amplitude vector");
  require(amps.allFinite(), "PureState: non-finite amplitude");
  if (normalized) {
    require(std::abs(norm2() - 1.0) < 1e-12,
            "PureState: amplitudes not normalized");
  }
}

PureState PureState::qubit(Complex alpha, Complex beta) {
  ComplexVector v(2);
  v << alpha, beta;
  return PureState(std::move(v));
}

PureState PureState::basis(Eigen::Index dim, Eigen::Index index) {
  require(index >= 0 && index < dim, "PureState::basis: index out of range");
  ComplexVector v = ComplexVector::Zero(dim);
  v(index) = 1.0;
  return PureState(std::move(v));
}

PureState BlochPoint::state() const {
  return PureState::qubit(std::cos(theta / 2.0),
                          std::polar(std::sin(theta / 2.0), phi));
}

ComplexMatrix identity(Eigen::Index dim) {
  return ComplexMatrix::Identity(dim, dim);
}

ComplexMatrix pauli(Axis axis) {
  ComplexMatrix m(2, 2);
  const Complex i(0.0, 1.0);
  switch (axis) {
    case Axis::x: m << 0, 1, 1, 0; break;
    case Axis::y: m << 0, -i, i, 0; break;
    case Axis::z: m << 1, 0, 0, -1; break;
  }
  return m;
}

ComplexMatrix pauli_x() { return pauli(Axis::x); }
ComplexMatrix pauli_y() { return pauli(Axis::y); }
ComplexMatrix pauli_z() { return pauli(Axis::z); }

ComplexMatrix rotation_gate(Axis axis, double angle) {
  require(std::isfinite(angle), "rotation_gate: non-finite angle");
  const double c = std::cos(angle / 2.0);
  const double s = std::sin(angle / 2.0);
  const Complex i(0.0, 1.0);
  ComplexMatrix m(2, 2);
  switch (axis) {
    case Axis::x: m << c, -i * s, -i * s, c; break;
    case Axis::y: m << c, -s, s, c; break;
    case Axis::z: m << std::exp(-i * (angle / 2.0)), 0, 0,
                       std::exp(i * (angle / 2.0)); break;
  }
  return m;
}

ComplexMatrix cnot() {
  ComplexMatrix m = ComplexMatrix::Zero(4, 4);
  m(0, 0) = m(1, 1) = m(2, 3) = m(3, 2) = 1.0;
  return m;
}

ComplexMatrix cz() {
  ComplexMatrix m = ComplexMatrix::Identity(4, 4);
  m(3, 3) = -1.0;
  return m;
}

ComplexMatrix tensor(const ComplexMatrix& a, const ComplexMatrix& b) {
  require(a.size() > 0 && b.size() > 0, "tensor: empty operand");
  require(a.rows() <= kMaxDim / b.rows() && a.cols() <= kMaxDim / b.cols(),
          "tensor: product dimension exceeds 2^14");
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

ComplexVector tensor(const ComplexVector& a, const ComplexVector& b) {
  require(a.size() > 0 && b.size() > 0, "tensor: empty operand");
  require(a.size() <= kMaxDim / b.size(),
          "tensor: product dimension exceeds 2^14");
  ComplexVector out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i)
    out.segment(i * b.size(), b.size()) = a(i) * b;
  return out;
}

ComplexMatrix embed_gate(const ComplexMatrix& gate,
                         std::span<const int> targets, int n_qubits) {
  require(n_qubits >= 1 && n_qubits <= 14, "embed_gate: bad qubit count");
  const int k = static_cast<int>(targets.size());
  require(k >= 1 && k <= n_qubits, "embed_gate: bad target count");
  require(gate.rows() == gate.cols() &&
              gate.rows() == (Eigen::Index{1} << k),
          "embed_gate: gate dimension does not match target count");
  unsigned seen = 0;
  for (int t : targets) {
    require(t >= 0 && t < n_qubits, "embed_gate: target out of range");
    require(!(seen & (1u << t)), "embed_gate: duplicate target");
    seen |= 1u << t;
  }

  const Eigen::Index dim = Eigen::Index{1} << n_qubits;
  // Bit position of qubit q in the basis index (qubit 0 is the MSB).
  auto bit_of = [n_qubits](int q) { return n_qubits - 1 - q; };

  ComplexMatrix out = ComplexMatrix::Zero(dim, dim);
  const Eigen::Index rest_count = dim >> k;
  for (Eigen::Index rest = 0; rest < rest_count; ++rest) {
    // Scatter the rest-bits into the non-target positions.
    Eigen::Index base = 0;
    Eigen::Index r = rest;
    for (int q = n_qubits - 1; q >= 0; --q) {
      if (seen & (1u << q)) continue;
      base |= (r & 1) << bit_of(q);
      r >>= 1;
    }
    for (Eigen::Index gi = 0; gi < gate.rows(); ++gi) {
      Eigen::Index row = base;
      for (int j = 0; j < k; ++j)
        row |= ((gi >> (k - 1 - j)) & 1) << bit_of(targets[j]);
      for (Eigen::Index gj = 0; gj < gate.cols(); ++gj) {
        if (gate(gi, gj) == Complex(0.0, 0.0)) continue;
        Eigen::Index col = base;
        for (int j = 0; j < k; ++j)
          col |= ((gj >> (k - 1 - j)) & 1) << bit_of(targets[j]);
        out(row, col) = gate(gi, gj);
      }
    }
  }
  return out;
}

ComplexVector apply_gate(const ComplexVector& state, const ComplexMatrix& gate,
                         std::span<const int> targets, bool raw) {
  require(is_power_of_two(state.size()), "apply_gate: state dim not 2^n");
  if (!raw) require(is_unitary(gate), "apply_gate: gate is not unitary");
  const int n = log2_dim(state.size());
  return embed_gate(gate, targets, n) * state;
}

ComplexMatrix apply_gate(const ComplexMatrix& rho, const ComplexMatrix& gate,
                         std::span<const int> targets, bool raw) {
  require(rho.rows() == rho.cols() && is_power_of_two(rho.rows()),
          "apply_gate: density matrix dim not 2^n");
  if (!raw) require(is_unitary(gate), "apply_gate: gate is not unitary");
  const int n = log2_dim(rho.rows());
  ComplexMatrix u = embed_gate(gate, targets, n);
  return u * rho * u.adjoint();
}

ComplexMatrix partial_trace(const ComplexMatrix& rho, int keep, int n_qubits) {
  require(n_qubits >= 1 && n_qubits <= 14, "partial_trace: bad qubit count");
  require(keep >= 0 && keep < n_qubits, "partial_trace: keep out of range");
  const Eigen::Index dim = Eigen::Index{1} << n_qubits;
  require(rho.rows() == dim && rho.cols() == dim,
          "partial_trace: dimension mismatch");
  const int bit = n_qubits - 1 - keep;
  ComplexMatrix out = ComplexMatrix::Zero(2, 2);
  const Eigen::Index rest_count = dim >> 1;
  for (Eigen::Index rest = 0; rest < rest_count; ++rest) {
    const Eigen::Index low = rest & ((Eigen::Index{1} << bit) - 1);
    const Eigen::Index high = (rest >> bit) << (bit + 1);
    const Eigen::Index base = high | low;
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b)
        out(a, b) += rho(base | (Eigen::Index{a} << bit),
                         base | (Eigen::Index{b} << bit));
  }
  return out;
}

double state_fidelity(const ComplexMatrix& rho, const PureState& psi) {
  require(rho.rows() == rho.cols(), "state_fidelity: rho not square");
  require(rho.rows() == psi.dim(), "state_fidelity: dimension mismatch");
  return (psi.amps.adjoint() * rho * psi.amps)(0, 0).real();
}

bool is_hermitian(const ComplexMatrix& m, double tol) {
  return m.rows() == m.cols() && (m - m.adjoint()).cwiseAbs().maxCoeff() < tol;
}

bool is_unitary(const ComplexMatrix& m, double tol) {
  if (m.rows() != m.cols()) return false;
  return (m.adjoint() * m - identity(m.rows())).cwiseAbs().maxCoeff() < tol;
}

double min_hermitian_eigenvalue(const ComplexMatrix& m) {
  require(is_hermitian(m, 1e-8), "min_hermitian_eigenvalue: not hermitian");
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(
      m, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

const std::vector<PureState>& six_states() {
  static const std::vector<PureState> states = [] {
    const double r = 1.0 / std::sqrt(2.0);
    const Complex i(0.0, 1.0);
    return std::vector<PureState>{
        PureState::qubit(1.0, 0.0),    PureState::qubit(0.0, 1.0),
        PureState::qubit(r, r),        PureState::qubit(r, -r),
        PureState::qubit(r, i * r),    PureState::qubit(r, -i * r)};
  }();
  return states;
}

}  // namespace repqed::qm
