#include "repqed/channels.hpp"

#include <cmath>
#include <stdexcept>

namespace repqed::channels {

namespace {

void require(bool cond, const char* msg) {
  if (!cond) throw std::invalid_argument(msg);
}

void check_positive_time(double t, const char* msg) {
  // Infinite is allowed (process disabled); zero or negative is not.
  require(t > 0.0 && !std::isnan(t), msg);
}

int qubit_count(const qm::ComplexMatrix& rho) {
  require(rho.rows() == rho.cols() && rho.rows() > 0,
          "channel: density matrix not square");
  int n = 0;
  while ((Eigen::Index{1} << n) < rho.rows()) ++n;
  require((Eigen::Index{1} << n) == rho.rows(),
          "channel: density matrix dim not 2^n");
  return n;
}

}  // namespace

DampingParams DampingParams::from_time(double t, double t1) {
  require(t >= 0.0, "DampingParams: negative duration");
  check_positive_time(t1, "DampingParams: T1 must be positive");
  return {std::isinf(t1) ? 0.0 : -std::expm1(-t / t1)};
}

DephasingParams DephasingParams::from_time(double t, double t_phi) {
  require(t >= 0.0, "DephasingParams: negative duration");
  check_positive_time(t_phi, "DephasingParams: Tphi must be positive");
  return {std::isinf(t_phi) ? 0.0 : -std::expm1(-2.0 * t / t_phi)};
}

QubitNoise QubitNoise::from_t1_t2(double t1, double t2) {
  check_positive_time(t1, "QubitNoise: T1 must be positive");
  check_positive_time(t2, "QubitNoise: T2 must be positive");
  if (std::isinf(t2)) {
    require(std::isinf(t1), "QubitNoise: T2 infinite requires T1 infinite");
    return {t1, kInfiniteTime};
  }
  // 1/Tphi = 1/T2 - 1/(2 T1) must be non-negative (T2 <= 2 T1).
  const double inv_t1 = std::isinf(t1) ? 0.0 : 1.0 / t1;
  const double inv_phi = 1.0 / t2 - 0.5 * inv_t1;
  require(inv_phi > -1e-12 / t2, "QubitNoise: T2 exceeds 2*T1");
  return {t1, inv_phi <= 0.0 ? kInfiniteTime : 1.0 / inv_phi};
}

double QubitNoise::t2() const {
  const double inv = (std::isinf(t1) ? 0.0 : 0.5 / t1) +
                     (std::isinf(t_phi) ? 0.0 : 1.0 / t_phi);
  return inv == 0.0 ? kInfiniteTime : 1.0 / inv;
}

std::pair<qm::ComplexMatrix, qm::ComplexMatrix> damping_kraus(double p) {
  require(p >= 0.0 && p <= 1.0, "damping_kraus: p outside [0, 1]");
  qm::ComplexMatrix relax = qm::ComplexMatrix::Zero(2, 2);
  relax(0, 1) = std::sqrt(p);
  qm::ComplexMatrix none = qm::ComplexMatrix::Identity(2, 2);
  none(1, 1) = std::sqrt(1.0 - p);
  return {relax, none};
}

qm::ComplexMatrix apply_damping(const qm::ComplexMatrix& rho, double p,
                                int target) {
  const int n = qubit_count(rho);
  require(target >= 0 && target < n, "apply_damping: target out of range");
  auto [relax, none] = damping_kraus(p);
  const int targets[] = {target};
  return qm::apply_gate(rho, relax, targets, /*raw=*/true) +
         qm::apply_gate(rho, none, targets, /*raw=*/true);
}

qm::ComplexMatrix apply_dephasing(const qm::ComplexMatrix& rho, double lambda,
                                  int target) {
  const int n = qubit_count(rho);
  require(target >= 0 && target < n, "apply_dephasing: target out of range");
  require(lambda >= 0.0 && lambda <= 1.0,
          "apply_dephasing: lambda outside [0, 1]");
  // Phase-flip Kraus pair with Z probability q: off-diagonal factor
  // 1 - 2q = sqrt(1 - lambda).
  const double q = 0.5 * (1.0 - std::sqrt(1.0 - lambda));
  qm::ComplexMatrix keep =
      std::sqrt(1.0 - q) * qm::ComplexMatrix::Identity(2, 2);
  qm::ComplexMatrix flip = std::sqrt(q) * qm::pauli_z();
  const int targets[] = {target};
  return qm::apply_gate(rho, keep, targets, /*raw=*/true) +
         qm::apply_gate(rho, flip, targets, /*raw=*/true);
}

qm::ComplexMatrix step_decoherence(const qm::ComplexMatrix& rho, double dt,
                                   std::span<const QubitNoise> noise) {
  const int n = qubit_count(rho);
  require(static_cast<int>(noise.size()) == n,
          "step_decoherence: noise entry per qubit required");
  require(dt >= 0.0, "step_decoherence: negative dt");
  qm::ComplexMatrix out = rho;
  for (int q = 0; q < n; ++q) {
    const double p = DampingParams::from_time(dt, noise[q].t1).p;
    if (p > 0.0) out = apply_damping(out, p, q);
    const double lambda = DephasingParams::from_time(dt, noise[q].t_phi).lambda;
    if (lambda > 0.0) out = apply_dephasing(out, lambda, q);
  }
  return out;
}

}  // namespace repqed::channels
