#pragma once

#include <limits>
#include <vector>

// Closed-form fidelities for the repetition code under zero-temperature
// amplitude damping: the unencoded qubit, the two-qubit code with per-qubit
// damping strengths (p1, p2), and the N-qubit code with uniform p.  Three
// decoding strategies throughout: ignore the ancilla result, post-select on
// the no-error result (QED; uniform or probability-weighted Bloch average),
// and apply the optimal correction (QEC).

namespace repqed::analytic {

inline constexpr double kUnset = std::numeric_limits<double>::quiet_NaN();

// Carrier for a set of fidelities at one parameter point.  Fields a producer
// does not define stay NaN; populated fields lie in [0, 1] (up to roundoff),
// and f_chi = (3 f - 1)/2 annotates the non-selective fidelity (f_ign, or
// f_1q for the unencoded column).
struct FidelityReport {
  double f_1q = kUnset;
  double f_ign = kUnset;
  double f_qed = kUnset;           // uniform Bloch average
  double f_qed_weighted = kUnset;  // selection-probability-weighted average
  double f_qec = kUnset;
  double f_chi = kUnset;
  double p_select = kUnset;
};

// ---- Bloch-sphere averages over the initial state ----
//
// <.> is the uniform average over the sphere; a = |alpha|^2 = cos^2(theta/2),
// b = |beta|^2 = 1 - a.  The log forms average b^m or a^2 b^m over
// 1/(A + B b); closed forms cancel catastrophically as B -> 0, so |B/A|
// below 1e-2 switches to a 12th-order series (see design notes).

enum class BlochKind {
  a4,          // <a^2>   = 1/3
  a2b2,        // <a b>   = 1/6
  a2,          // <a>     = 1/2
  a6,          // <a^3>   = 1/4
  a2b4,        // <a b^2> = 1/12
  a4b4,        // <a^2 b^2> = 1/30
  inv,         // <1/(A + B b)>
  b2_inv,      // <b/(A + B b)>
  b4_inv,      // <b^2/(A + B b)>
  a4_inv,      // <a^2/(A + B b)>
  a2b2_inv,    // <a b/(A + B b)>
};

// Moment kinds ignore (A, B); log kinds require A > 0 and A + B > 0.
double bloch_average_closed(BlochKind kind, double A = 1.0, double B = 0.0);

// ---- Unencoded qubit ----

// Average state fidelity after damping of strength p.
double f_av_1q(double p);
// Process fidelity from an average state fidelity: (3 f - 1)/2.
double f_chi_from_av(double f_av);

// Relax/no-relax branch conditionals for one qubit: uniform and weighted
// averages plus mean branch probabilities.
struct Conditional1q {
  double f_av_relax;
  double f_av_none;
  double f_av_relax_weighted;
  double f_av_none_weighted;
  double p_relax_avg;
  double p_none_avg;
};
Conditional1q conditional_fidelities_1q(double p);

// ---- Two-qubit code, per-qubit strengths ----

double f_ign_2q(double p1, double p2);
double f_qed_2q(double p1, double p2);
double f_qed_2q_weighted(double p1, double p2);
double f_qec_2q(double p1, double p2);

// ---- N-qubit code, uniform p (N >= 1) ----

double f_ign_nq(int n, double p);
double f_qed_nq(int n, double p);
double f_qed_nq_weighted(int n, double p);
double f_qec_nq(int n, double p);

// Mean probability of the all-zeros ancilla result (QED selection).
double p_select_nq(int n, double p);

// Smallest N whose repetition decoder can also identify single phase flips:
// first N with 2^(N-1) >= 1 + 2N.
struct HammingScan {
  int n;
  struct Row { int n; long long codewords; long long needed; };
  std::vector<Row> trace;
};
HammingScan hamming_min_qubits();

// ---- Multicycle QED estimate ----
//
// M detection cycles with pi-pulse compensation over total storage time t:
// selected-state infidelity M (t/(M T1))^N / 3 and selection probability
// exp(-t N / (2 T1)).  Valid for N t / (M T1) << 1; M must be even (the
// pi-pulse drift compensation closes only over pulse pairs).
struct MulticycleEstimate {
  double fidelity;
  double p_select;
  double validity_ratio;  // N t / (M T1)
};
MulticycleEstimate f_qed_multicycle_estimate(int n, int m, double t,
                                             double t1);

}  // namespace repqed::analytic
