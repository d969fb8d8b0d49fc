#include "doctest.h"

#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>

#include "repqed/channels.hpp"
#include "repqed/qmath.hpp"

using namespace repqed;
using qm::Complex;
using qm::ComplexMatrix;
using qm::ComplexVector;

TEST_CASE("damping strength from time") {
  // p = 1 - e^{-t/T1}.
  CHECK(channels::DampingParams::from_time(0.0, 500.0).p == 0.0);
  CHECK(channels::DampingParams::from_time(100.0, 500.0).p ==
        doctest::Approx(1.0 - std::exp(-0.2)).epsilon(1e-14));
  CHECK(channels::DampingParams::from_time(100.0, channels::kInfiniteTime).p ==
        0.0);
  CHECK_THROWS_AS(channels::DampingParams::from_time(-1.0, 500.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(channels::DampingParams::from_time(1.0, 0.0),
                  std::invalid_argument);
}

TEST_CASE("dephasing strength from time") {
  // off-diagonals scale by e^{-t/Tphi}, so
  // sqrt(1 - lambda) = e^{-t/Tphi} and lambda = 1 - e^{-2t/Tphi}.
  auto d = channels::DephasingParams::from_time(100.0, 400.0);
  CHECK(d.lambda == doctest::Approx(1.0 - std::exp(-0.5)).epsilon(1e-14));
  CHECK(std::sqrt(1.0 - d.lambda) ==
        doctest::Approx(std::exp(-0.25)).epsilon(1e-14));
  CHECK(channels::DephasingParams::from_time(50.0, channels::kInfiniteTime)
            .lambda == 0.0);
}

TEST_CASE("kraus pair") {
  auto [relax, none] = channels::damping_kraus(0.19);
  // A_none = diag(1, sqrt(0.81)) = diag(1, 0.9).
  CHECK(std::abs(none(0, 0) - Complex(1, 0)) < 1e-15);
  CHECK(std::abs(none(1, 1) - Complex(0.9, 0)) < 1e-12);
  CHECK(std::abs(none(0, 1)) < 1e-15);
  // A_relax maps |1> to |0> with amplitude sqrt(0.19).
  CHECK(std::abs(relax(0, 1) - Complex(std::sqrt(0.19), 0)) < 1e-12);
  CHECK(std::abs(relax(0, 0)) < 1e-15);
  CHECK(std::abs(relax(1, 0)) < 1e-15);
  CHECK(std::abs(relax(1, 1)) < 1e-15);
  // Completeness: A_relax^dag A_relax + A_none^dag A_none = I.
  ComplexMatrix sum = relax.adjoint() * relax + none.adjoint() * none;
  CHECK((sum - qm::identity(2)).cwiseAbs().maxCoeff() < 1e-14);

  CHECK_THROWS_AS(channels::damping_kraus(-0.1), std::invalid_argument);
  CHECK_THROWS_AS(channels::damping_kraus(1.1), std::invalid_argument);
}

TEST_CASE("single-qubit damping") {
  // damping |+>: rho = [[1+p, sqrt(1-p)], [sqrt(1-p), 1-p]] / 2.
  const double p = 0.5;
  auto plus = qm::PureState::qubit(1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0));
  auto rho = channels::apply_damping(plus.density(), p, 0);
  CHECK(std::abs(rho(0, 0) - Complex((1 + p) / 2, 0)) < 1e-12);
  CHECK(std::abs(rho(1, 1) - Complex((1 - p) / 2, 0)) < 1e-12);
  CHECK(std::abs(rho(0, 1) - Complex(std::sqrt(1 - p) / 2, 0)) < 1e-12);
  // fidelity with |+> is (1 + sqrt(1-p))/2 = 0.8535533905932738.
  CHECK(qm::state_fidelity(rho, plus) ==
        doctest::Approx(0.8535533905932738).epsilon(1e-14));

  // p = 1 empties the excited state entirely.
  auto ground = channels::apply_damping(qm::PureState::qubit(0, 1).density(),
                                        1.0, 0);
  CHECK(std::abs(ground(0, 0) - Complex(1, 0)) < 1e-14);
  CHECK(std::abs(ground(1, 1)) < 1e-14);
}

TEST_CASE("damping one qubit of an entangled pair") {
  // 0.6|00> + 0.8|11>, damping qubit 1 with p = 0.19:
  // coherence 0.48 -> 0.48 * 0.9 = 0.432, population 0.64 splits into
  // 0.64 * 0.81 on |11> and 0.64 * 0.19 on |10>.
  ComplexVector v = ComplexVector::Zero(4);
  v(0) = 0.6;
  v(3) = 0.8;
  auto rho = channels::apply_damping(ComplexMatrix(v * v.adjoint()), 0.19, 1);
  CHECK(std::abs(rho(0, 0) - Complex(0.36, 0)) < 1e-12);
  CHECK(std::abs(rho(3, 3) - Complex(0.64 * 0.81, 0)) < 1e-12);
  CHECK(std::abs(rho(2, 2) - Complex(0.64 * 0.19, 0)) < 1e-12);
  CHECK(std::abs(rho(0, 3) - Complex(0.432, 0)) < 1e-12);
  CHECK(std::abs(rho.trace() - Complex(1, 0)) < 1e-12);

  // Damping qubit 0 instead parks the relaxed weight on |01>.
  auto rho0 = channels::apply_damping(ComplexMatrix(v * v.adjoint()), 0.19, 0);
  CHECK(std::abs(rho0(1, 1) - Complex(0.64 * 0.19, 0)) < 1e-12);
  CHECK(std::abs(rho0(2, 2)) < 1e-14);
}

TEST_CASE("dephasing") {
  auto plus = qm::PureState::qubit(1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0));
  auto rho = channels::apply_dephasing(plus.density(), 0.36, 0);
  // Populations untouched, off-diagonals scale by sqrt(0.64) = 0.8.
  CHECK(std::abs(rho(0, 0) - Complex(0.5, 0)) < 1e-14);
  CHECK(std::abs(rho(0, 1) - Complex(0.4, 0)) < 1e-14);
}

TEST_CASE("t1 t2 bookkeeping") {
  // 1/Tphi = 1/T2 - 1/(2 T1); T1 = 500, T2 = 400 gives Tphi =
  // 1/(1/400 - 1/1000) = 2000/3.
  auto n = channels::QubitNoise::from_t1_t2(500.0, 400.0);
  CHECK(n.t1 == 500.0);
  CHECK(n.t_phi == doctest::Approx(2000.0 / 3.0).epsilon(1e-12));
  CHECK(n.t2() == doctest::Approx(400.0).epsilon(1e-12));

  // T2 = 2 T1 is the no-dephasing limit.
  auto pure_t1 = channels::QubitNoise::from_t1_t2(500.0, 1000.0);
  CHECK(pure_t1.t_phi == channels::kInfiniteTime);
  CHECK(pure_t1.t2() == doctest::Approx(1000.0));

  // T2 above 2 T1 is unphysical.
  CHECK_THROWS_AS(channels::QubitNoise::from_t1_t2(500.0, 1001.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(channels::QubitNoise::from_t1_t2(500.0, 0.0),
                  std::invalid_argument);

  auto ideal = channels::QubitNoise{};
  CHECK(ideal.t2() == channels::kInfiniteTime);
}

TEST_CASE("decoherence step semigroup") {
  // Two steps of dt equal one step of 2*dt exactly, because both damping and
  // dephasing parameters are exponentials in t.
  ComplexVector v = ComplexVector::Zero(4);
  v(0) = Complex(0.5, 0.1);
  v(1) = Complex(0.3, -0.2);
  v(2) = Complex(0.4, 0.0);
  v.normalize();
  ComplexMatrix rho = v * v.adjoint();
  std::array<channels::QubitNoise, 2> noise{
      channels::QubitNoise::from_t1_t2(500.0, 400.0),
      channels::QubitNoise::from_t1_t2(300.0, 550.0)};

  auto two_small = channels::step_decoherence(
      channels::step_decoherence(rho, 1.0, noise), 1.0, noise);
  auto one_big = channels::step_decoherence(rho, 2.0, noise);
  CHECK((two_small - one_big).cwiseAbs().maxCoeff() < 1e-13);

  // Infinite times leave the state alone.
  std::array<channels::QubitNoise, 2> ideal{channels::QubitNoise{},
                                            channels::QubitNoise{}};
  auto same = channels::step_decoherence(rho, 5.0, ideal);
  CHECK((same - rho).cwiseAbs().maxCoeff() < 1e-14);

  std::array<channels::QubitNoise, 1> wrong{channels::QubitNoise{}};
  CHECK_THROWS_AS(channels::step_decoherence(rho, 1.0, wrong),
                  std::invalid_argument);
}
