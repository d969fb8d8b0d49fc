#pragma once

#include <array>
#include <span>
#include <utility>
#include <vector>

#include "repqed/analytic.hpp"
#include "repqed/channels.hpp"
#include "repqed/qmath.hpp"

namespace repqed::protocol {

// Two-qubit encode/error/decode sequences built from a CZ entangler and
// ancilla Y/2 pulses.  fig7a wraps the error slot in main-qubit +-Y/2
// pulses; fig7b wraps it in ancilla -+Y/2 pulses, which also puts the code
// into the energy eigenbasis for relaxation detection during storage.
enum class Protocol { fig4, fig7a, fig7b };

// Intentional single-qubit error rotations R(2 theta) on the main qubit (1)
// or the ancilla (2), plus the damping-only storage mode of fig7b.
enum class ErrorKind { r1x, r1y, r1z, r2x, r2y, r2z, damp_storage };

struct ProtocolConfig {
  Protocol protocol = Protocol::fig4;
  ErrorKind error = ErrorKind::r1x;
  double theta2 = 0.0;  // full rotation angle, radians
  std::array<double, 2> t1_ns{channels::kInfiniteTime,
                              channels::kInfiniteTime};
  std::array<double, 2> t2_ns{channels::kInfiniteTime,
                              channels::kInfiniteTime};
  double storage_p = 0.0;  // per-qubit damping probability, fig7b storage
  double dt_ns = 1.0;      // time-step ceiling for the stepped evolution
  bool decohere_during_gates = true;
  bool validate_steps = true;  // per-step trace and positivity checks
};

struct GateEvent {
  enum class Kind {
    prepare_main,
    rot_y_half,
    cz,
    error_rotation,
    pi_correction,
    idle,
    storage_damping
  };
  Kind kind;
  double start_ns = 0.0;
  double duration_ns = 0.0;
  std::vector<int> targets;
  int sign = 1;                 // rot_y_half direction
  qm::Axis axis = qm::Axis::x;  // error_rotation axis
  double angle = 0.0;           // error_rotation full angle
};

struct ProtocolResult {
  std::array<qm::ComplexMatrix, 6> rho0, rho1;  // unnormalized 2x2, per j
  std::array<double, 6> p0{}, p1{};
  analytic::FidelityReport report;
};

// Gate schedule for the configured protocol: single-qubit pulses take 10 ns,
// CZ takes 40 ns, segments are separated by 5 ns idles.  The active span is
// 135 ns for fig4 and 155 ns for fig7a/fig7b (storage is instantaneous).
std::vector<GateEvent> build_schedule(const ProtocolConfig& config);

// Evolves the two-qubit density matrix through the schedule for initial
// state j in {1..6} = {|0>,|1>,|+>,|->,|+i>,|-i>} and projects the ancilla,
// returning the unnormalized reduced main-qubit matrices for ancilla
// results 0 and 1.
std::pair<qm::ComplexMatrix, qm::ComplexMatrix> simulate(
    const ProtocolConfig& config, int initial_state_index);

// Ideal post-processing correction applied to the result-1 branch.  Throws
// for the storage mode, where no unitary can undo the damping.
qm::ComplexMatrix correction_unitary(Protocol protocol, ErrorKind error);

// Runs all six tomography inputs and assembles the fidelity estimates:
//   F_ign      = (1/6) sum_j Tr[(rho0_j + rho1_j) psi_j]
//   F~_qed     = sum_j Tr(rho0_j psi_j) / sum_j Tr rho0_j
//   F_qec      = (1/6) sum_j Tr[(rho0_j + U rho1_j U^dag) psi_j]
//   p_select   = (1/6) sum_j Tr rho0_j
// F_qec stays unset for the storage mode.
ProtocolResult protocol_fidelities(const ProtocolConfig& config);

// One report per grid value of the full rotation angle 2 theta.
std::vector<analytic::FidelityReport> sweep_theta(
    const ProtocolConfig& config, std::span<const double> theta2_grid);

// One report per storage damping probability (fig7b storage mode).
std::vector<analytic::FidelityReport> sweep_storage(
    const ProtocolConfig& config, std::span<const double> p_grid);

}  // namespace repqed::protocol
