#pragma once

#include <Eigen/Dense>
#include <complex>
#include <span>
#include <stdexcept>
#include <vector>

// Small dense linear-algebra layer for multi-qubit states and operators.
// Qubit 0 is the leftmost tensor factor (most significant bit of the basis
// index); |0> is the ground state everywhere.

namespace repqed::qm {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

// Tensor-product dimensions above this are rejected before allocation.
inline constexpr Eigen::Index kMaxDim = 1 << 14;

// Pure state; amplitudes normalized to 1 within 1e-12 unless the
// `normalized` flag is cleared (sub-normalized branch states).
struct PureState {
  ComplexVector amps;
  bool normalized = true;

  PureState() = default;
  explicit PureState(ComplexVector a, bool is_normalized = true);

  Eigen::Index dim() const { return amps.size(); }
  double norm2() const { return amps.squaredNorm(); }
  ComplexMatrix density() const { return amps * amps.adjoint(); }

  // Single-qubit state alpha|0> + beta|1>.
  static PureState qubit(Complex alpha, Complex beta);
  // Basis state |index> of dimension dim.
  static PureState basis(Eigen::Index dim, Eigen::Index index);
};

// Point on the Bloch sphere; state() gives cos(theta/2)|0> +
// e^{i phi} sin(theta/2)|1>.
struct BlochPoint {
  double theta = 0.0;
  double phi = 0.0;
  PureState state() const;
};

enum class Axis { x, y, z };

ComplexMatrix identity(Eigen::Index dim);
ComplexMatrix pauli(Axis axis);
ComplexMatrix pauli_x();
ComplexMatrix pauli_y();
ComplexMatrix pauli_z();
// exp(-i angle/2 * sigma_axis).
ComplexMatrix rotation_gate(Axis axis, double angle);
ComplexMatrix cnot();  // control = qubit 0 (leftmost factor)
ComplexMatrix cz();

// Kronecker product; rejects results above kMaxDim without allocating.
ComplexMatrix tensor(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexVector tensor(const ComplexVector& a, const ComplexVector& b);

// Embed a k-qubit gate acting on `targets` (each in [0, n_qubits)) into the
// full 2^n space.  Target order maps gate qubit j to circuit qubit
// targets[j].
ComplexMatrix embed_gate(const ComplexMatrix& gate,
                         std::span<const int> targets, int n_qubits);

// Apply a gate to the listed qubits of a state / density matrix.  The gate
// must be unitary within 1e-10 unless `raw` is set (Kraus operators and
// projectors go through raw).
ComplexVector apply_gate(const ComplexVector& state, const ComplexMatrix& gate,
                         std::span<const int> targets, bool raw = false);
ComplexMatrix apply_gate(const ComplexMatrix& rho, const ComplexMatrix& gate,
                         std::span<const int> targets, bool raw = false);

// Trace out every qubit except `keep`, returning the 2x2 reduced matrix.
ComplexMatrix partial_trace(const ComplexMatrix& rho, int keep, int n_qubits);

// Re(<psi| rho |psi>); rho may be sub-normalized (trace-decreasing branches).
double state_fidelity(const ComplexMatrix& rho, const PureState& psi);

bool is_hermitian(const ComplexMatrix& m, double tol = 1e-10);
bool is_unitary(const ComplexMatrix& m, double tol = 1e-10);
double min_hermitian_eigenvalue(const ComplexMatrix& m);

// The six-state tomography set |0>, |1>, |+>, |->, |+i>, |-i>.
const std::vector<PureState>& six_states();

}  // namespace repqed::qm
