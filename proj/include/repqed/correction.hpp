#pragma once

#include <functional>
#include <span>

#include "repqed/qmath.hpp"

namespace repqed::correction {

// Linear (not necessarily trace-preserving) map on single-qubit density
// matrices, represented by its action on the probe states |0>, |1>, |+>,
// |+i>.  Four linearly independent probes determine the map; apply() extends
// by linearity assuming the map preserves hermiticity.
class LinearQubitOp {
 public:
  static LinearQubitOp identity();
  static LinearQubitOp from_probe_images(const qm::ComplexMatrix& rho0,
                                         const qm::ComplexMatrix& rho1,
                                         const qm::ComplexMatrix& rho_plus,
                                         const qm::ComplexMatrix& rho_plus_i);
  // Applies `map` to the four probe densities.
  static LinearQubitOp from_map(
      const std::function<qm::ComplexMatrix(const qm::ComplexMatrix&)>& map);
  // rho -> sum_k A_k rho A_k^dag with no completeness requirement, so the
  // result may be trace-decreasing (or -increasing).
  static LinearQubitOp from_kraus(std::span<const qm::ComplexMatrix> kraus);

  qm::ComplexMatrix apply(const qm::ComplexMatrix& rho) const;

  const qm::ComplexMatrix& rho0() const { return rho0_; }
  const qm::ComplexMatrix& rho1() const { return rho1_; }
  const qm::ComplexMatrix& rho_plus() const { return rho_plus_; }
  const qm::ComplexMatrix& rho_plus_i() const { return rho_plus_i_; }
  // Image of the fully mixed state, (rho0 + rho1)/2.
  qm::ComplexMatrix rho_c() const { return 0.5 * (rho0_ + rho1_); }

 private:
  LinearQubitOp() = default;
  qm::ComplexMatrix rho0_, rho1_, rho_plus_, rho_plus_i_;
};

// One measurement-outcome branch of the two-qubit code reduced to the main
// qubit: an incoherent mixture of two linear operations with strengths k
// (amplitude-preserving piece) and k_tilde (|1> -> |0> transfer piece).
struct BranchKK {
  enum class OutcomeClass { no_error_0, error_result };
  double k = 0.0;
  double k_tilde = 0.0;
  OutcomeClass outcome_class = OutcomeClass::no_error_0;
};

enum class UnitaryClass { identity_like, bit_flip };

struct OptimalCorrection {
  UnitaryClass u_class;
  double f_bar_max;
};

struct SearchResult {
  qm::ComplexMatrix best_u;
  double f_bar;
  double phi1, phi2, phi3;  // Euler angles, U = Rz(phi3) Ry(phi2) Rz(phi1)
  double abs_u10;           // |<1|U|0>| = |sin(phi2/2)|
};

// Bloch-sphere average of Tr[(U psi U^dag) op(|psi><psi|)], evaluated in
// closed form from the probe images.
double avg_fidelity_vs_unitary(const LinearQubitOp& op,
                               const qm::ComplexMatrix& u);

// Mean of the same fidelity over the six cardinal states; equals the
// Bloch-sphere average for any linear op.
double six_state_fidelity(const LinearQubitOp& op, const qm::ComplexMatrix& u);

// Mean selection probability <Tr op(psi)> over the sphere, from the two
// antipodal probes alone.
double two_point_selection_probability(const LinearQubitOp& op);

// Closed-form optimal unitary correction per outcome class.
OptimalCorrection optimal_correction(const BranchKK& branch);

// Probability-weighted post-selected fidelity of the no_error_0 branch.
double branch_weighted_fidelity(const BranchKK& branch);

// Mean branch probability <Tr rho> over the sphere.
double branch_selection_probability(const BranchKK& branch);

// The branch as an explicit operation, for cross-checking the closed forms.
LinearQubitOp branch_op(const BranchKK& branch);

// Uniform-average fidelity gained by the conditional flip in the two-qubit
// code: f_qec - f_ign = (p1 - min(p1, p2))/6.
double qec_gain_2q(double p1, double p2);

// Exhaustive Euler-angle grid search maximizing avg_fidelity_vs_unitary.
// phi1 and phi3 take `resolution` points on [0, 2pi); phi2 takes
// `resolution` points on [0, pi] inclusive, so both poles are on the grid.
// Ties resolve to the first maximum in (phi1, phi2, phi3) scan order.
SearchResult numeric_unitary_search(const LinearQubitOp& op, int resolution);

}  // namespace repqed::correction
