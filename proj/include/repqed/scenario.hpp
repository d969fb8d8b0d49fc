#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "repqed/analytic.hpp"
#include "repqed/qmath.hpp"

// Brute-force oracle for the repetition code: unravel per-qubit amplitude
// damping into its 2^N relaxation scenarios, decode with the explicit CNOT
// fan-out circuit, group by ancilla measurement result, and average
// fidelities over the Bloch sphere of initial states.  Qubit 0 is the main
// (logical) qubit; qubits 1..N-1 are ancillas prepared in |0>.

namespace repqed::scenario {

using analytic::FidelityReport;

// One relaxation scenario.  Bit i of relax_mask set means qubit i relaxed.
// encoded_state is the normalized N-qubit state before decoding;
// main_state the normalized main-qubit state after the decode circuit
// (ancilla registers factor out exactly in every scenario).
struct Scenario {
  std::uint32_t relax_mask = 0;
  double probability = 0.0;
  qm::PureState encoded_state;
  qm::PureState main_state;
};

// One ancilla measurement result.  Bit i of result_bits is ancilla i's
// outcome (qubit i+1); rho is the unnormalized 2x2 main-qubit state with
// trace equal to `probability`.
struct OutcomeBranch {
  std::uint32_t result_bits = 0;
  qm::ComplexMatrix rho;
  double probability = 0.0;
};

// Decoding strategies.  qec_optimal conditions one correction on the
// detected-error class as a whole: exchange |0> and |1> on every nonzero
// result, or on none, whichever gives the higher average fidelity.
enum class Mode { ignore, qed_uniform, qed_weighted, qec_optimal };

// Averaging rule over initial states.
struct BlochAverager {
  enum class Kind { quadrature, six_state, monte_carlo };
  Kind kind = Kind::quadrature;
  int nodes = 64;        // Gauss-Legendre nodes in cos(theta); >= 32
  int phi_nodes = 16;    // uniform azimuthal points
  long long samples = 0; // monte_carlo only
  std::uint64_t seed = 0;

  static BlochAverager quadrature(int nodes = 64, int phi_nodes = 16);
  static BlochAverager six_state();
  static BlochAverager monte_carlo(long long samples, std::uint64_t seed);
};

// All 2^N damping scenarios of the encoded state alpha|0..0> + beta|1..1>.
// |alpha|^2 + |beta|^2 must be 1 within 1e-12; p_list needs one entry in
// [0, 1] per qubit.
std::vector<Scenario> unravel(int n_qubits, std::span<const double> p_list,
                              qm::Complex alpha, qm::Complex beta);

// Run the decode circuit on each scenario and group by ancilla result.
// Branches come out sorted by result_bits; probabilities sum to 1 and each
// result aggregates exactly two scenarios.
std::vector<OutcomeBranch> decode_and_measure(
    const std::vector<Scenario>& scenarios, int n_qubits);

// The CNOT fan-out encode/decode circuit (self-inverse) as one matrix.
qm::ComplexMatrix decode_circuit(int n_qubits);

// Average fn over the Bloch sphere.  The six-state shortcut is only valid
// for functionals linear in the initial density matrix; ratio-of-averages
// quantities must reject it at the call site.
double bloch_average(const std::function<double(const qm::PureState&)>& fn,
                     const BlochAverager& averager);

// Sphere-averaged fidelity of one decoding strategy.  qed_uniform averages
// the post-selected ratio pointwise and is not linear in the initial state,
// so it rejects six_state averaging.
double scenario_fidelity(int n_qubits, std::span<const double> p_list,
                         Mode mode, const BlochAverager& averager);

// Full report at one parameter point: all four strategies, the mean
// selection probability, the unencoded-qubit column (main qubit's p), and
// f_chi annotating the non-selective average.  `mode` picks the strategy
// the caller is interested in (validated; the report carries the rest too).
FidelityReport fidelity_sweep(int n_qubits, std::span<const double> p_list,
                              Mode mode, const BlochAverager& averager);

// Trajectory Monte Carlo: Haar-random initial states and relaxation events
// sampled per scenario probabilities.  Deterministic for a fixed seed.
struct McEstimate {
  double estimate;
  double std_error;
};
McEstimate monte_carlo_fidelity(int n_qubits, std::span<const double> p_list,
                                Mode mode, long long n_samples,
                                std::uint64_t seed);

// ---- Multicycle storage QED ----

enum class PiPulsePlacement {
  encoded,  // X on all N physical qubits right after each re-encode
  decoded,  // X on the logical qubit after each cycle's measurement
};

struct MulticycleResult {
  double fidelity;  // probability-weighted post-selected fidelity
  double p_select;  // mean probability that all M results read no-error
};

// M equal detection cycles over total storage time t (per-cycle strength
// p_c = 1 - e^{-t/(M T1)}), post-selecting the no-error result every cycle.
// pi_pulses inserts the drift-compensation pulses at the given placement.
MulticycleResult multicycle_simulate(
    int n_qubits, int m_cycles, double t, double t1, bool pi_pulses,
    PiPulsePlacement placement = PiPulsePlacement::encoded,
    const BlochAverager& averager = BlochAverager::quadrature());

}  // namespace repqed::scenario
