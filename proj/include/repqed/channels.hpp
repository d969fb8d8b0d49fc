#pragma once

#include <limits>
#include <span>
#include <utility>

#include "repqed/qmath.hpp"

// Zero-temperature amplitude damping and pure dephasing, as discrete Kraus
// channels.  Damping strength p = 1 - e^{-t/T1}; the dephasing parameter is
// chosen so one step of duration t scales target-qubit off-diagonals by
// exactly e^{-t/Tphi}, which makes stepping a semigroup: two steps of dt
// compose to one step of 2*dt with no splitting error.

namespace repqed::channels {

inline constexpr double kInfiniteTime =
    std::numeric_limits<double>::infinity();

struct DampingParams {
  double p = 0.0;  // relaxation probability in [0, 1]
  static DampingParams from_time(double t, double t1);
};

struct DephasingParams {
  double lambda = 0.0;  // off-diagonals scale by sqrt(1 - lambda)
  static DephasingParams from_time(double t, double t_phi);
};

// Per-qubit relaxation and pure-dephasing times (same unit as the step dt;
// kInfiniteTime disables the corresponding process).  1/T2 = 1/(2 T1) +
// 1/Tphi.
struct QubitNoise {
  double t1 = kInfiniteTime;
  double t_phi = kInfiniteTime;

  static QubitNoise from_t1_t2(double t1, double t2);
  double t2() const;
};

// Kraus pair {A_relax, A_none}: A_relax maps |1> to |0> with amplitude
// sqrt(p), A_none = diag(1, sqrt(1-p)).
std::pair<qm::ComplexMatrix, qm::ComplexMatrix> damping_kraus(double p);

// Apply amplitude damping of strength p to one qubit of an n-qubit density
// matrix.
qm::ComplexMatrix apply_damping(const qm::ComplexMatrix& rho, double p,
                                int target);

// Apply dephasing to one qubit: its off-diagonals scale by sqrt(1 - lambda).
qm::ComplexMatrix apply_dephasing(const qm::ComplexMatrix& rho, double lambda,
                                  int target);

// One time step of duration dt with per-qubit noise (noise.size() qubits).
qm::ComplexMatrix step_decoherence(const qm::ComplexMatrix& rho, double dt,
                                   std::span<const QubitNoise> noise);

}  // namespace repqed::channels
