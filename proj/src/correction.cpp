#include "repqed/correction.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace repqed::correction {

namespace {

void require(bool cond, const char* msg) {
  if (!cond) throw std::invalid_argument(msg);
}

void check_image(const qm::ComplexMatrix& rho, const char* what) {
  require(rho.rows() == 2 && rho.cols() == 2, "LinearQubitOp: image not 2x2");
  require(rho.allFinite(), "LinearQubitOp: non-finite image");
  if (!qm::is_hermitian(rho, 1e-10))
    throw std::invalid_argument(std::string("LinearQubitOp: image of ") +
                                what + " is not hermitian");
}

void check_branch(const BranchKK& b) {
  require(b.k >= 0.0 && b.k_tilde >= 0.0, "BranchKK: strengths must be >= 0");
  require(b.k * b.k + b.k_tilde * b.k_tilde <= 1.0 + 1e-12,
          "BranchKK: k^2 + k_tilde^2 exceeds 1");
}

// Real Bloch components Re Tr[(rho_x - rho_c) sigma_i] for one probe image.
Eigen::Vector3d bloch_deficit(const qm::ComplexMatrix& rho_x,
                              const qm::ComplexMatrix& rho_c) {
  const qm::ComplexMatrix d = rho_x - rho_c;
  Eigen::Vector3d v;
  v(0) = (d(0, 1) + d(1, 0)).real();
  v(1) = (qm::Complex(0, 1) * (d(0, 1) - d(1, 0))).real();
  v(2) = (d(0, 0) - d(1, 1)).real();
  return v;
}

Eigen::Matrix3d so3_z(double phi) {
  const double c = std::cos(phi), s = std::sin(phi);
  Eigen::Matrix3d r;
  r << c, -s, 0, s, c, 0, 0, 0, 1;
  return r;
}

Eigen::Matrix3d so3_y(double phi) {
  const double c = std::cos(phi), s = std::sin(phi);
  Eigen::Matrix3d r;
  r << c, 0, s, 0, 1, 0, -s, 0, c;
  return r;
}

}  // namespace

LinearQubitOp LinearQubitOp::identity() {
  return from_map([](const qm::ComplexMatrix& rho) { return rho; });
}

LinearQubitOp LinearQubitOp::from_probe_images(
    const qm::ComplexMatrix& rho0, const qm::ComplexMatrix& rho1,
    const qm::ComplexMatrix& rho_plus, const qm::ComplexMatrix& rho_plus_i) {
  check_image(rho0, "|0>");
  check_image(rho1, "|1>");
  check_image(rho_plus, "|+>");
  check_image(rho_plus_i, "|+i>");
  LinearQubitOp op;
  op.rho0_ = rho0;
  op.rho1_ = rho1;
  op.rho_plus_ = rho_plus;
  op.rho_plus_i_ = rho_plus_i;
  return op;
}

LinearQubitOp LinearQubitOp::from_map(
    const std::function<qm::ComplexMatrix(const qm::ComplexMatrix&)>& map) {
  require(static_cast<bool>(map), "LinearQubitOp: empty map");
  const auto probes = qm::six_states();
  return from_probe_images(map(probes[0].density()), map(probes[1].density()),
                           map(probes[2].density()),
                           map(probes[4].density()));
}

LinearQubitOp LinearQubitOp::from_kraus(
    std::span<const qm::ComplexMatrix> kraus) {
  require(!kraus.empty(), "LinearQubitOp: empty Kraus list");
  for (const auto& k : kraus)
    require(k.rows() == 2 && k.cols() == 2 && k.allFinite(),
            "LinearQubitOp: Kraus operators must be finite 2x2");
  return from_map([&](const qm::ComplexMatrix& rho) {
    qm::ComplexMatrix out = qm::ComplexMatrix::Zero(2, 2);
    for (const auto& k : kraus) out += k * rho * k.adjoint();
    return out;
  });
}

qm::ComplexMatrix LinearQubitOp::apply(const qm::ComplexMatrix& rho) const {
  require(rho.rows() == 2 && rho.cols() == 2 && rho.allFinite(),
          "LinearQubitOp: input must be a finite 2x2 matrix");
  const qm::ComplexMatrix rc = rho_c();
  // Images of the off-diagonal units, from hermiticity preservation:
  // E(|0><1|) = (E(X) + i E(Y))/2 with E(X) = 2(rho_plus - rho_c), etc.
  const qm::ComplexMatrix m01 =
      (rho_plus_ - rc) + qm::Complex(0, 1) * (rho_plus_i_ - rc);
  const qm::ComplexMatrix m10 =
      (rho_plus_ - rc) - qm::Complex(0, 1) * (rho_plus_i_ - rc);
  return rho(0, 0) * rho0_ + rho(1, 1) * rho1_ + rho(0, 1) * m01 +
         rho(1, 0) * m10;
}

double avg_fidelity_vs_unitary(const LinearQubitOp& op,
                               const qm::ComplexMatrix& u) {
  require(u.rows() == 2 && u.cols() == 2, "avg_fidelity: unitary not 2x2");
  if (!qm::is_unitary(u, 1e-10))
    throw std::invalid_argument("avg_fidelity: matrix is not unitary");
  const qm::ComplexMatrix rc = op.rho_c();
  const qm::ComplexMatrix half = 0.5 * qm::identity(2);
  const auto probes = qm::six_states();
  const qm::ComplexMatrix targets[3] = {
      u * probes[2].density() * u.adjoint(),  // |+>
      u * probes[4].density() * u.adjoint(),  // |+i>
      u * probes[0].density() * u.adjoint(),  // |0>
  };
  const qm::ComplexMatrix images[3] = {op.rho_plus(), op.rho_plus_i(),
                                       op.rho0()};
  double f = 0.5 * rc.trace().real();
  for (int i = 0; i < 3; ++i)
    f += ((images[i] - rc) * (targets[i] - half)).trace().real() / 3.0;
  return f;
}

double six_state_fidelity(const LinearQubitOp& op,
                          const qm::ComplexMatrix& u) {
  require(u.rows() == 2 && u.cols() == 2, "six_state_fidelity: not 2x2");
  if (!qm::is_unitary(u, 1e-10))
    throw std::invalid_argument("six_state_fidelity: matrix is not unitary");
  const auto probes = qm::six_states();
  double sum = 0.0;
  for (const qm::PureState& psi : probes) {
    const qm::ComplexMatrix target = u * psi.density() * u.adjoint();
    sum += (target * op.apply(psi.density())).trace().real();
  }
  return sum / 6.0;
}

double two_point_selection_probability(const LinearQubitOp& op) {
  return 0.5 * (op.rho0().trace() + op.rho1().trace()).real();
}

OptimalCorrection optimal_correction(const BranchKK& branch) {
  check_branch(branch);
  const double k2 = branch.k * branch.k;
  const double kt2 = branch.k_tilde * branch.k_tilde;
  switch (branch.outcome_class) {
    case BranchKK::OutcomeClass::no_error_0:
      return {UnitaryClass::identity_like,
              (1.0 + branch.k + k2 + 0.5 * kt2) / 3.0};
    case BranchKK::OutcomeClass::error_result:
      if (branch.k >= branch.k_tilde)
        return {UnitaryClass::identity_like, (2.0 * k2 + kt2) / 6.0};
      return {UnitaryClass::bit_flip, (k2 + 2.0 * kt2) / 6.0};
  }
  throw std::invalid_argument("optimal_correction: unknown outcome class");
}

double branch_weighted_fidelity(const BranchKK& branch) {
  check_branch(branch);
  require(branch.outcome_class == BranchKK::OutcomeClass::no_error_0,
          "branch_weighted_fidelity: defined for the no-error branch");
  const double k2 = branch.k * branch.k;
  const double kt2 = branch.k_tilde * branch.k_tilde;
  return (2.0 / 3.0) * (1.0 + branch.k + k2 + 0.5 * kt2) / (1.0 + k2 + kt2);
}

double branch_selection_probability(const BranchKK& branch) {
  check_branch(branch);
  const double k2 = branch.k * branch.k;
  const double kt2 = branch.k_tilde * branch.k_tilde;
  if (branch.outcome_class == BranchKK::OutcomeClass::no_error_0)
    return 0.5 * (1.0 + k2 + kt2);
  return 0.5 * (k2 + kt2);
}

LinearQubitOp branch_op(const BranchKK& branch) {
  check_branch(branch);
  qm::ComplexMatrix m1 = qm::ComplexMatrix::Zero(2, 2);
  qm::ComplexMatrix m2 = qm::ComplexMatrix::Zero(2, 2);
  if (branch.outcome_class == BranchKK::OutcomeClass::no_error_0) {
    m1(0, 0) = 1.0;
    m1(1, 1) = branch.k;
  } else {
    m1(1, 1) = branch.k;
  }
  m2(0, 1) = branch.k_tilde;
  const qm::ComplexMatrix kraus[] = {m1, m2};
  return LinearQubitOp::from_kraus(kraus);
}

double qec_gain_2q(double p1, double p2) {
  require(p1 >= 0.0 && p1 <= 1.0 && p2 >= 0.0 && p2 <= 1.0,
          "qec_gain_2q: probabilities outside [0, 1]");
  return (p1 - std::min(p1, p2)) / 6.0;
}

SearchResult numeric_unitary_search(const LinearQubitOp& op, int resolution) {
  require(resolution >= 24, "numeric_unitary_search: resolution < 24");
  const qm::ComplexMatrix rc = op.rho_c();
  // F(U) = Tr(rho_c)/2 + (1/6) sum_ij R_ij D_ij, with R the SO(3) image of
  // U and D's columns the Bloch deficits of the |+>, |+i>, |0> images.
  Eigen::Matrix3d d;
  d.col(0) = bloch_deficit(op.rho_plus(), rc);
  d.col(1) = bloch_deficit(op.rho_plus_i(), rc);
  d.col(2) = bloch_deficit(op.rho0(), rc);
  const Eigen::Matrix3d dt = d.transpose();
  const double base = 0.5 * rc.trace().real();

  std::vector<double> c3(resolution), s3(resolution);
  for (int i = 0; i < resolution; ++i) {
    const double phi = 2.0 * M_PI * i / resolution;
    c3[i] = std::cos(phi);
    s3[i] = std::sin(phi);
  }

  SearchResult best;
  best.f_bar = -1e300;
  for (int i1 = 0; i1 < resolution; ++i1) {
    const double phi1 = 2.0 * M_PI * i1 / resolution;
    const Eigen::Matrix3d m1 = so3_z(phi1) * dt;
    for (int i2 = 0; i2 < resolution; ++i2) {
      const double phi2 = M_PI * i2 / (resolution - 1);
      const Eigen::Matrix3d m2 = so3_y(phi2) * m1;
      const double diag01 = m2(0, 0) + m2(1, 1);
      // Tr(so3_z(phi3) M) = cos phi3 (M00 + M11) + sin phi3 (M01 - M10) + M22
      const double skew = m2(0, 1) - m2(1, 0);
      const double fixed = m2(2, 2);
      for (int i3 = 0; i3 < resolution; ++i3) {
        const double f =
            base + (c3[i3] * diag01 + s3[i3] * skew + fixed) / 6.0;
        if (f > best.f_bar) {
          best.f_bar = f;
          best.phi1 = phi1;
          best.phi2 = phi2;
          best.phi3 = 2.0 * M_PI * i3 / resolution;
        }
      }
    }
  }
  best.best_u = qm::rotation_gate(qm::Axis::z, best.phi3) *
                qm::rotation_gate(qm::Axis::y, best.phi2) *
                qm::rotation_gate(qm::Axis::z, best.phi1);
  best.abs_u10 = std::abs(std::sin(0.5 * best.phi2));
  return best;
}

}  // namespace repqed::correction
