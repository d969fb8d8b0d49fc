#include "repqed/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace repqed::analytic {

namespace {

void require(bool cond, const char* msg) {
  if (!cond) throw std::invalid_argument(msg);
}

void check_p(double p, const char* msg) {
  require(p >= 0.0 && p <= 1.0, msg);
}

// j_m(x) = integral_0^1 b^m / (1 + x b) db, m = 0, 1, 2.  Closed forms lose
// ~x^-2 digits of cancellation as x -> 0; below |x| = 1e-2 a 12th-order
// series (error ~ |x|^13) is both cheaper and exact to double precision.
double j_m(int m, double x) {
  if (std::abs(x) < 1e-2) {
    double sum = 0.0;
    for (int k = 12; k >= 0; --k) sum = 1.0 / (k + m + 1) - sum * x;
    return sum;
  }
  const double l = std::log1p(x);
  switch (m) {
    case 0: return l / x;
    case 1: return (1.0 - l / x) / x;
    default: return 0.5 / x - 1.0 / (x * x) + l / (x * x * x);
  }
}

// <b^m / (A + B b)> with the uniform sphere measure (b uniform in [0, 1]).
double avg_bm_inv(int m, double A, double B) {
  require(A > 0.0 && A + B > 0.0,
          "bloch_average_closed: log form requires A > 0 and A + B > 0");
  return j_m(m, B / A) / A;
}

double avg_inv(double A, double B) { return avg_bm_inv(0, A, B); }
double avg_b2_inv(double A, double B) { return avg_bm_inv(1, A, B); }
double avg_b4_inv(double A, double B) { return avg_bm_inv(2, A, B); }
// a^2 = (1 - b)^2 = 1 - 2b + b^2.
double avg_a4_inv(double A, double B) {
  return avg_bm_inv(0, A, B) - 2.0 * avg_bm_inv(1, A, B) + avg_bm_inv(2, A, B);
}
// a b = b - b^2.
double avg_a2b2_inv(double A, double B) {
  return avg_bm_inv(1, A, B) - avg_bm_inv(2, A, B);
}

}  // namespace

double bloch_average_closed(BlochKind kind, double A, double B) {
  switch (kind) {
    case BlochKind::a4: return 1.0 / 3.0;
    case BlochKind::a2b2: return 1.0 / 6.0;
    case BlochKind::a2: return 1.0 / 2.0;
    case BlochKind::a6: return 1.0 / 4.0;
    case BlochKind::a2b4: return 1.0 / 12.0;
    case BlochKind::a4b4: return 1.0 / 30.0;
    case BlochKind::inv: return avg_inv(A, B);
    case BlochKind::b2_inv: return avg_b2_inv(A, B);
    case BlochKind::b4_inv: return avg_b4_inv(A, B);
    case BlochKind::a4_inv: return avg_a4_inv(A, B);
    case BlochKind::a2b2_inv: return avg_a2b2_inv(A, B);
  }
  throw std::invalid_argument("bloch_average_closed: unknown kind");
}

double f_av_1q(double p) {
  check_p(p, "f_av_1q: p outside [0, 1]");
  return 2.0 / 3.0 + std::sqrt(1.0 - p) / 3.0 - p / 6.0;
}

double f_chi_from_av(double f_av) {
  require(f_av >= 1.0 / 3.0 - 1e-12,
          "f_chi_from_av: average fidelity below 1/3");
  return (3.0 * f_av - 1.0) / 2.0;
}

Conditional1q conditional_fidelities_1q(double p) {
  check_p(p, "conditional_fidelities_1q: p outside [0, 1]");
  Conditional1q out{};
  out.f_av_relax = 0.5;
  out.f_av_relax_weighted = 1.0 / 3.0;
  out.p_relax_avg = p / 2.0;
  out.p_none_avg = 1.0 - p / 2.0;
  const double s = std::sqrt(1.0 - p);
  if (1.0 - p < 1e-15) {
    // Survivor state is |0> exactly; <a>/<1> uniform, <a^2>/<a> weighted.
    out.f_av_none = 0.5;
  } else {
    // F = <(a + s b)^2 / (a + (1-p) b)>, denominator A + B b with A = 1,
    // B = -p.
    out.f_av_none = avg_a4_inv(1.0, -p) + 2.0 * s * avg_a2b2_inv(1.0, -p) +
                    (1.0 - p) * avg_b4_inv(1.0, -p);
  }
  out.f_av_none_weighted = (2.0 - p + s) / (3.0 - 1.5 * p);
  return out;
}

double f_ign_2q(double p1, double p2) {
  check_p(p1, "f_ign_2q: p1 outside [0, 1]");
  check_p(p2, "f_ign_2q: p2 outside [0, 1]");
  return 2.0 / 3.0 + std::sqrt((1.0 - p1) * (1.0 - p2)) / 3.0 - p1 / 6.0;
}

double f_qed_2q(double p1, double p2) {
  check_p(p1, "f_qed_2q: p1 outside [0, 1]");
  check_p(p2, "f_qed_2q: p2 outside [0, 1]");
  const double s = std::sqrt((1.0 - p1) * (1.0 - p2));
  const double B = 2.0 * p1 * p2 - p1 - p2;
  if (1.0 + B < 1e-12) {
    // {p1, p2} = {0, 1}: the kept state is |0> with weight a.
    return 0.5;
  }
  // F = <(a + s b)^2 + p1 p2 a b> / (1 + B b) averaged over the sphere.
  return avg_a4_inv(1.0, B) + (2.0 * s + p1 * p2) * avg_a2b2_inv(1.0, B) +
         s * s * avg_b4_inv(1.0, B);
}

double f_qed_2q_weighted(double p1, double p2) {
  check_p(p1, "f_qed_2q_weighted: p1 outside [0, 1]");
  check_p(p2, "f_qed_2q_weighted: p2 outside [0, 1]");
  const double s = std::sqrt((1.0 - p1) * (1.0 - p2));
  return (2.0 - p1 - p2 + 1.5 * p1 * p2 + s) /
         (3.0 * (1.0 + p1 * p2 - 0.5 * (p1 + p2)));
}

double f_qec_2q(double p1, double p2) {
  check_p(p1, "f_qec_2q: p1 outside [0, 1]");
  check_p(p2, "f_qec_2q: p2 outside [0, 1]");
  return 2.0 / 3.0 + std::sqrt((1.0 - p1) * (1.0 - p2)) / 3.0 -
         std::min(p1, p2) / 6.0;
}

namespace {

void check_n(int n, const char* msg) { require(n >= 1 && n <= 14, msg); }

}  // namespace

double f_ign_nq(int n, double p) {
  check_n(n, "f_ign_nq: n outside [1, 14]");
  check_p(p, "f_ign_nq: p outside [0, 1]");
  return 2.0 / 3.0 + std::pow(1.0 - p, n / 2.0) / 3.0 - p / 6.0;
}

double f_qed_nq(int n, double p) {
  check_n(n, "f_qed_nq: n outside [1, 14]");
  check_p(p, "f_qed_nq: p outside [0, 1]");
  const double qn = std::pow(1.0 - p, n);      // no-relax weight factor
  const double pn = std::pow(p, n);            // all-relax weight factor
  const double q = std::pow(1.0 - p, n / 2.0);  // surviving |1> amplitude
  const double B = qn + pn - 1.0;
  // F = <(a + q b)^2 + pn a b> / (1 + B b).
  return avg_a4_inv(1.0, B) + (2.0 * q + pn) * avg_a2b2_inv(1.0, B) +
         qn * avg_b4_inv(1.0, B);
}

double f_qed_nq_weighted(int n, double p) {
  check_n(n, "f_qed_nq_weighted: n outside [1, 14]");
  check_p(p, "f_qed_nq_weighted: p outside [0, 1]");
  const double qn = std::pow(1.0 - p, n);
  const double pn = std::pow(p, n);
  const double q = std::pow(1.0 - p, n / 2.0);
  return (2.0 / 3.0) * (1.0 + qn + q + 0.5 * pn) / (1.0 + qn + pn);
}

double f_qec_nq(int n, double p) {
  check_n(n, "f_qec_nq: n outside [1, 14]");
  check_p(p, "f_qec_nq: p outside [0, 1]");
  const double qn = std::pow(1.0 - p, n);
  const double pn = std::pow(p, n);
  const double q = std::pow(1.0 - p, n / 2.0);
  return 0.5 + q / 3.0 + qn / 6.0 +
         std::max(p - pn, (1.0 - p) - qn) / 6.0;
}

double p_select_nq(int n, double p) {
  check_n(n, "p_select_nq: n outside [1, 14]");
  check_p(p, "p_select_nq: p outside [0, 1]");
  // <a + b ((1-p)^n + p^n)> = (1 + (1-p)^n + p^n) / 2.
  return 0.5 * (1.0 + std::pow(1.0 - p, n) + std::pow(p, n));
}

HammingScan hamming_min_qubits() {
  HammingScan scan{};
  for (int n = 1;; ++n) {
    const long long codewords = 1LL << (n - 1);
    const long long needed = 1 + 2LL * n;
    scan.trace.push_back({n, codewords, needed});
    if (codewords >= needed) {
      scan.n = n;
      return scan;
    }
  }
}

MulticycleEstimate f_qed_multicycle_estimate(int n, int m, double t,
                                             double t1) {
  check_n(n, "f_qed_multicycle_estimate: n outside [1, 14]");
  require(m >= 2 && m % 2 == 0,
          "f_qed_multicycle_estimate: cycle count must be even");
  require(t >= 0.0, "f_qed_multicycle_estimate: negative storage time");
  require(t1 > 0.0, "f_qed_multicycle_estimate: T1 must be positive");
  MulticycleEstimate out{};
  out.validity_ratio = n * t / (m * t1);
  out.fidelity = 1.0 - m * std::pow(t / (m * t1), n) / 3.0;
  out.p_select = std::exp(-t * n / (2.0 * t1));
  return out;
}

}  // namespace repqed::analytic
