#include "doctest.h"

#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <stdexcept>
#include <vector>

#include "repqed/analytic.hpp"
#include "repqed/channels.hpp"
#include "repqed/qmath.hpp"
#include "repqed/scenario.hpp"

using namespace repqed;
using qm::Complex;
using qm::ComplexMatrix;
using qm::ComplexVector;

namespace {

// Dense-path oracle: rebuild the per-result main-qubit density matrices at
// one initial state through unravel + decode_and_measure, then score a
// strategy directly on the matrices.
struct DensePoint {
  double f_ign = 0.0;
  double f_sel = 0.0;
  double p_sel = 0.0;
  double f_flip = 0.0;  // every flagged result corrected by a bit flip
};

DensePoint dense_point(int n, std::span<const double> p_list,
                       const qm::PureState& psi) {
  auto branches =
      scenario::decode_and_measure(scenario::unravel(n, p_list, psi.amps(0),
                                                     psi.amps(1)),
                                   n);
  const ComplexMatrix x = qm::pauli_x();
  DensePoint out;
  for (const auto& br : branches) {
    const double fid = qm::state_fidelity(br.rho, psi);
    out.f_ign += fid;
    if (br.result_bits == 0) {
      out.f_sel = fid;
      out.p_sel = br.probability;
      out.f_flip += fid;
    } else {
      out.f_flip += qm::state_fidelity(ComplexMatrix(x * br.rho * x), psi);
    }
  }
  return out;
}

double quad_average(const std::function<double(const qm::PureState&)>& fn) {
  return scenario::bloch_average(fn, scenario::BlochAverager::quadrature(64));
}

}  // namespace

TEST_CASE("decode circuit") {
  for (int n : {1, 2, 3, 4}) {
    CAPTURE(n);
    const ComplexMatrix dec = scenario::decode_circuit(n);
    const Eigen::Index dim = Eigen::Index{1} << n;
    REQUIRE(dec.rows() == dim);
    CHECK(qm::is_unitary(dec));
    // The CNOT fan-out is its own inverse.
    CHECK((dec * dec - qm::identity(dim)).cwiseAbs().maxCoeff() < 1e-12);
    // Encoding |psi>|0...0> produces alpha|0...0> + beta|1...1>.
    ComplexVector in = ComplexVector::Zero(dim);
    in(0) = 0.6;
    in(dim / 2) = Complex(0.0, 0.8);
    ComplexVector code = dec * in;
    CHECK(std::abs(code(0) - Complex(0.6, 0)) < 1e-12);
    CHECK(std::abs(code(dim - 1) - Complex(0.0, 0.8)) < 1e-12);
    CHECK(code.squaredNorm() == doctest::Approx(1.0).epsilon(1e-12));
  }
  CHECK_THROWS_AS(scenario::decode_circuit(0), std::invalid_argument);
  CHECK_THROWS_AS(scenario::decode_circuit(11), std::invalid_argument);
}

TEST_CASE("unravel enumerates relaxation scenarios") {
  const std::array<double, 2> p{0.2, 0.4};
  auto scen = scenario::unravel(2, p, 0.6, 0.8);
  REQUIRE(scen.size() == 4);

  // weights at alpha = 0.6, beta = 0.8, b = 0.64:
  //   no relax:     0.36 + 0.64 * 0.8 * 0.6 = 0.6672
  //   qubit 0 only: 0.64 * 0.2 * 0.6       = 0.0768
  //   qubit 1 only: 0.64 * 0.8 * 0.4       = 0.2048
  //   both:         0.64 * 0.2 * 0.4       = 0.0512
  CHECK(scen[0].relax_mask == 0);
  CHECK(scen[0].probability == doctest::Approx(0.6672).epsilon(1e-13));
  CHECK(scen[1].probability == doctest::Approx(0.0768).epsilon(1e-13));
  CHECK(scen[2].probability == doctest::Approx(0.2048).epsilon(1e-13));
  CHECK(scen[3].probability == doctest::Approx(0.0512).epsilon(1e-13));
  double total = 0.0;
  for (const auto& s : scen) total += s.probability;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-13));

  // Coherent branch keeps alpha and the damped beta amplitude.
  const double surv = 0.8 * std::sqrt(0.8 * 0.6);
  const double norm = std::sqrt(0.36 + surv * surv);
  CHECK(std::abs(scen[0].encoded_state.amps(0) - Complex(0.6 / norm, 0)) <
        1e-12);
  CHECK(std::abs(scen[0].encoded_state.amps(3) - Complex(surv / norm, 0)) <
        1e-12);
  CHECK(std::abs(scen[0].main_state.amps(1) - Complex(surv / norm, 0)) <
        1e-12);

  // Qubit 0 relaxing leaves |01>, which decodes to main |0>; qubit 1
  // relaxing leaves |10>, which decodes to main |1>.
  CHECK(std::abs(scen[1].encoded_state.amps(1) - Complex(1, 0)) < 1e-12);
  CHECK(std::abs(scen[1].main_state.amps(0) - Complex(1, 0)) < 1e-12);
  CHECK(std::abs(scen[2].encoded_state.amps(2) - Complex(1, 0)) < 1e-12);
  CHECK(std::abs(scen[2].main_state.amps(1) - Complex(1, 0)) < 1e-12);
  // Both relaxing funnels into |00>: the undetected error.
  CHECK(std::abs(scen[3].main_state.amps(0) - Complex(1, 0)) < 1e-12);

  CHECK_THROWS_AS(scenario::unravel(2, p, 0.6, 0.7), std::invalid_argument);
  const std::array<double, 1> short_list{0.2};
  CHECK_THROWS_AS(scenario::unravel(2, short_list, 0.6, 0.8),
                  std::invalid_argument);
}

TEST_CASE("decode_and_measure groups scenarios by ancilla result") {
  const std::array<double, 2> p{0.2, 0.4};
  auto branches =
      scenario::decode_and_measure(scenario::unravel(2, p, 0.6, 0.8), 2);
  REQUIRE(branches.size() == 2);
  CHECK(branches[0].result_bits == 0);
  CHECK(branches[1].result_bits == 1);

  // accepted result: coherent outer product of (0.6, 0.8 sqrt(.48))
  // plus the all-relax weight 0.0512 on |0><0|.
  const double surv = 0.8 * std::sqrt(0.48);
  CHECK(branches[0].probability == doctest::Approx(0.7184).epsilon(1e-13));
  CHECK(std::abs(branches[0].rho(0, 0) - Complex(0.36 + 0.0512, 0)) < 1e-12);
  CHECK(std::abs(branches[0].rho(1, 1) - Complex(surv * surv, 0)) < 1e-12);
  CHECK(std::abs(branches[0].rho(0, 1) - Complex(0.6 * surv, 0)) < 1e-12);

  // Flagged result: incoherent mixture of the two single-relax scenarios.
  CHECK(branches[1].probability == doctest::Approx(0.2816).epsilon(1e-13));
  CHECK(std::abs(branches[1].rho(0, 0) - Complex(0.0768, 0)) < 1e-12);
  CHECK(std::abs(branches[1].rho(1, 1) - Complex(0.2048, 0)) < 1e-12);
  CHECK(std::abs(branches[1].rho(0, 1)) < 1e-14);
}

TEST_CASE("single ancilla relaxations flag their own result bit") {
  const std::array<double, 3> p{0.1, 0.2, 0.3};
  auto scen = scenario::unravel(3, p, 1.0 / std::sqrt(2.0),
                                1.0 / std::sqrt(2.0));
  // Mask bit j set = qubit j relaxed.  Ancilla i is qubit i + 1 and drives
  // result bit i; a main-qubit relaxation flips every ancilla instead.
  for (const auto& s : scen) {
    auto one = scenario::decode_and_measure({s}, 3);
    REQUIRE(one.size() == 1);
    const std::uint32_t mask = s.relax_mask;
    std::uint32_t expected = 0;
    if (mask != 0) {
      expected = (mask >> 1) & 0x3;       // ancilla relaxations
      if (mask & 1) expected ^= 0x3;      // main relaxation complements
    }
    CAPTURE(mask);
    CHECK(one[0].result_bits == expected);
  }
}

TEST_CASE("scenario sum reproduces the kraus map") {
  // Summing the unnormalized branch matrices over all results must equal
  // running the code density matrix through per-qubit damping channels and
  // reading out the decoded main qubit.
  const Complex alpha(0.5, 0.3);
  const Complex beta = std::sqrt(1.0 - std::norm(alpha)) *
                       std::exp(Complex(0, 0.7));
  std::vector<double> p_all{0.15, 0.4, 0.05, 0.3, 0.2, 0.45};
  for (int n : {2, 3, 6}) {
    CAPTURE(n);
    std::span<const double> p(p_all.data(), static_cast<std::size_t>(n));
    auto branches =
        scenario::decode_and_measure(scenario::unravel(n, p, alpha, beta), n);
    ComplexMatrix sum = ComplexMatrix::Zero(2, 2);
    double total = 0.0;
    for (const auto& br : branches) {
      sum += br.rho;
      total += br.probability;
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));

    const Eigen::Index dim = Eigen::Index{1} << n;
    ComplexVector code = ComplexVector::Zero(dim);
    code(0) = alpha;
    code(dim - 1) = beta;
    ComplexMatrix rho = code * code.adjoint();
    for (int q = 0; q < n; ++q) rho = channels::apply_damping(rho, p[q], q);
    const ComplexMatrix dec = scenario::decode_circuit(n);
    rho = dec * rho * dec.adjoint();
    const ComplexMatrix main = qm::partial_trace(rho, 0, n);
    CHECK((sum - main).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("fast sweep equals the dense path") {
  std::vector<double> p3{0.35, 0.1, 0.2};
  std::vector<double> p2{0.25, 0.5};
  for (const auto& p_list : {p2, p3}) {
    const int n = static_cast<int>(p_list.size());
    CAPTURE(n);
    std::span<const double> p(p_list);
    const auto avg = scenario::BlochAverager::quadrature(64);

    const double ign = quad_average(
        [&](const qm::PureState& s) { return dense_point(n, p, s).f_ign; });
    CHECK(scenario::scenario_fidelity(n, p, scenario::Mode::ignore, avg) ==
          doctest::Approx(ign).epsilon(1e-12));

    const double sel_ratio = quad_average([&](const qm::PureState& s) {
      const auto v = dense_point(n, p, s);
      return v.f_sel / v.p_sel;
    });
    CHECK(scenario::scenario_fidelity(n, p, scenario::Mode::qed_uniform,
                                      avg) ==
          doctest::Approx(sel_ratio).epsilon(1e-12));

    const double sel_num = quad_average(
        [&](const qm::PureState& s) { return dense_point(n, p, s).f_sel; });
    const double sel_den = quad_average(
        [&](const qm::PureState& s) { return dense_point(n, p, s).p_sel; });
    CHECK(scenario::scenario_fidelity(n, p, scenario::Mode::qed_weighted,
                                      avg) ==
          doctest::Approx(sel_num / sel_den).epsilon(1e-12));

    // The correction strategy commits to one decision for all flagged
    // results; its average is the better of flip-everything and flip-nothing.
    const double flip = quad_average(
        [&](const qm::PureState& s) { return dense_point(n, p, s).f_flip; });
    CHECK(scenario::scenario_fidelity(n, p, scenario::Mode::qec_optimal,
                                      avg) ==
          doctest::Approx(std::max(ign, flip)).epsilon(1e-12));
  }
}

TEST_CASE("sweep matches the closed forms at uniform p") {
  const auto avg = scenario::BlochAverager::quadrature(128);
  for (int n : {1, 2, 3, 4}) {
    for (double pv : {0.1, 0.3, 0.5, 0.7, 0.9}) {
      CAPTURE(n);
      CAPTURE(pv);
      std::vector<double> p(n, pv);
      auto rep = scenario::fidelity_sweep(n, p, scenario::Mode::ignore, avg);
      CHECK(rep.f_1q ==
            doctest::Approx(analytic::f_av_1q(pv)).epsilon(1e-13));
      CHECK(rep.f_ign ==
            doctest::Approx(analytic::f_ign_nq(n, pv)).epsilon(1e-10));
      CHECK(rep.f_qed ==
            doctest::Approx(analytic::f_qed_nq(n, pv)).epsilon(1e-10));
      CHECK(rep.f_qed_weighted ==
            doctest::Approx(analytic::f_qed_nq_weighted(n, pv))
                .epsilon(1e-10));
      CHECK(rep.f_qec ==
            doctest::Approx(analytic::f_qec_nq(n, pv)).epsilon(1e-10));
      CHECK(rep.p_select ==
            doctest::Approx(analytic::p_select_nq(n, pv)).epsilon(1e-12));
      CHECK(rep.f_chi ==
            doctest::Approx(analytic::f_chi_from_av(rep.f_ign))
                .epsilon(1e-13));
    }
  }
  // Pinned point: the four-qubit correction average.
  std::vector<double> p4(4, 0.2);
  CHECK(scenario::scenario_fidelity(4, p4, scenario::Mode::qec_optimal,
                                    scenario::BlochAverager::quadrature(256))
        == doctest::Approx(analytic::f_qec_nq(4, 0.2)).epsilon(1e-9));
}

TEST_CASE("trivial one-qubit code") {
  std::vector<double> p{0.37};
  auto rep = scenario::fidelity_sweep(1, p, scenario::Mode::ignore,
                                      scenario::BlochAverager::quadrature(64));
  const double f = analytic::f_av_1q(0.37);
  CHECK(rep.f_ign == doctest::Approx(f).epsilon(1e-12));
  CHECK(rep.f_qed == doctest::Approx(f).epsilon(1e-12));
  CHECK(rep.f_qed_weighted == doctest::Approx(f).epsilon(1e-12));
  CHECK(rep.f_qec == doctest::Approx(f).epsilon(1e-12));
  CHECK(rep.p_select == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("six-state averaging matches quadrature on linear functionals") {
  const auto six = scenario::BlochAverager::six_state();
  const auto quad = scenario::BlochAverager::quadrature(64);
  for (int n : {2, 3}) {
    for (double pv : {0.15, 0.45, 0.75}) {
      CAPTURE(n);
      CAPTURE(pv);
      std::vector<double> p(n, pv);
      auto a = scenario::fidelity_sweep(n, p, scenario::Mode::ignore, six);
      auto b = scenario::fidelity_sweep(n, p, scenario::Mode::ignore, quad);
      CHECK(a.f_ign == doctest::Approx(b.f_ign).epsilon(1e-12));
      CHECK(a.f_qec == doctest::Approx(b.f_qec).epsilon(1e-12));
      CHECK(a.f_qed_weighted ==
            doctest::Approx(b.f_qed_weighted).epsilon(1e-12));
      CHECK(a.p_select == doctest::Approx(b.p_select).epsilon(1e-12));
      // The pointwise-ratio column cannot come from six states.
      CHECK(std::isnan(a.f_qed));
    }
  }
  std::vector<double> p2{0.3, 0.3};
  CHECK_THROWS_AS(scenario::scenario_fidelity(
                      2, p2, scenario::Mode::qed_uniform, six),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      scenario::fidelity_sweep(2, p2, scenario::Mode::qed_uniform, six),
      std::invalid_argument);
}

TEST_CASE("averager validation") {
  CHECK_THROWS_AS(scenario::BlochAverager::quadrature(16),
                  std::invalid_argument);
  CHECK_THROWS_AS(scenario::BlochAverager::quadrature(64, 0),
                  std::invalid_argument);
  CHECK_THROWS_AS(scenario::BlochAverager::monte_carlo(0, 1),
                  std::invalid_argument);

  // bloch_average over |alpha|^4 is the second Bloch moment 1/3; six states
  // reproduce it exactly, and a seeded monte-carlo run is reproducible.
  auto fn = [](const qm::PureState& s) {
    const double a = std::norm(s.amps(0));
    return a * a;
  };
  CHECK(scenario::bloch_average(fn, scenario::BlochAverager::quadrature(64)) ==
        doctest::Approx(1.0 / 3.0).epsilon(1e-13));
  CHECK(scenario::bloch_average(fn, scenario::BlochAverager::six_state()) ==
        doctest::Approx(1.0 / 3.0).epsilon(1e-13));
  const auto mc = scenario::BlochAverager::monte_carlo(20000, 321);
  const double m1 = scenario::bloch_average(fn, mc);
  const double m2 = scenario::bloch_average(fn, mc);
  CHECK(m1 == m2);
  CHECK(std::abs(m1 - 1.0 / 3.0) < 0.02);
}

TEST_CASE("monte carlo fidelity") {
  std::vector<double> p{0.3, 0.3};
  // Reference values from the closed forms.
  const double ref_w = analytic::f_qed_2q_weighted(0.3, 0.3);
  const double ref_i = analytic::f_ign_2q(0.3, 0.3);

  auto w = scenario::monte_carlo_fidelity(2, p, scenario::Mode::qed_weighted,
                                          1000000, 42);
  CHECK(w.std_error > 0.0);
  CHECK(w.std_error < 1e-3);
  CHECK(std::abs(w.estimate - ref_w) < 4.0 * w.std_error);

  auto i = scenario::monte_carlo_fidelity(2, p, scenario::Mode::ignore,
                                          200000, 7);
  CHECK(std::abs(i.estimate - ref_i) < 4.0 * i.std_error);

  auto u = scenario::monte_carlo_fidelity(2, p, scenario::Mode::qed_uniform,
                                          200000, 8);
  CHECK(std::abs(u.estimate - analytic::f_qed_2q(0.3, 0.3)) <
        4.0 * u.std_error);

  std::vector<double> p3(3, 0.6);
  auto c = scenario::monte_carlo_fidelity(3, p3, scenario::Mode::qec_optimal,
                                          200000, 9);
  CHECK(std::abs(c.estimate - analytic::f_qec_nq(3, 0.6)) <
        4.0 * c.std_error);

  // Same seed, same stream: bit-identical repeat.
  auto w2 = scenario::monte_carlo_fidelity(2, p, scenario::Mode::qed_weighted,
                                           1000000, 42);
  CHECK(w.estimate == w2.estimate);
  CHECK(w.std_error == w2.std_error);
  auto w3 = scenario::monte_carlo_fidelity(2, p, scenario::Mode::qed_weighted,
                                           100000, 43);
  CHECK(w.estimate != w3.estimate);

  CHECK_THROWS_AS(scenario::monte_carlo_fidelity(
                      2, p, scenario::Mode::ignore, 1, 42),
                  std::invalid_argument);
}

TEST_CASE("multicycle reduces to the static code at one cycle") {
  const double t1 = 500.0;
  const double t = 150.0;
  const double pv = 1.0 - std::exp(-t / t1);
  for (int n : {2, 3}) {
    CAPTURE(n);
    auto res = scenario::multicycle_simulate(n, 1, t, t1, false);
    CHECK(res.fidelity ==
          doctest::Approx(analytic::f_qed_nq_weighted(n, pv)).epsilon(1e-10));
    CHECK(res.p_select ==
          doctest::Approx(analytic::p_select_nq(n, pv)).epsilon(1e-10));
  }
}

TEST_CASE("splitting the storage time preserves the coherent amplitude") {
  // Without pulses, encode -> damp -> decode -> select is a semigroup on the
  // coherent component: M cycles of t/M leave exactly the same off-diagonal
  // as one cycle of t.  (The discarded-scenario populations differ, which is
  // what the repeated detection is for.)
  const int n = 2;
  const double t1 = 500.0, t = 200.0;
  const Eigen::Index half = 2;
  const ComplexMatrix dec = scenario::decode_circuit(n);
  ComplexMatrix anc0 = ComplexMatrix::Zero(half, half);
  anc0(0, 0) = 1.0;

  auto run_cycles = [&](int m) {
    const double p_c = 1.0 - std::exp(-t / (m * t1));
    ComplexMatrix rho2(2, 2);
    const double a = 0.3;
    rho2 << a, std::sqrt(a * (1 - a)), std::sqrt(a * (1 - a)), 1 - a;
    for (int cycle = 0; cycle < m; ++cycle) {
      ComplexMatrix rho = qm::tensor(rho2, anc0);
      rho = dec * rho * dec.adjoint();
      for (int q = 0; q < n; ++q) rho = channels::apply_damping(rho, p_c, q);
      rho = dec * rho * dec.adjoint();
      rho2 << rho(0, 0), rho(0, half), rho(half, 0), rho(half, half);
    }
    return rho2;
  };

  const ComplexMatrix one = run_cycles(1);
  const ComplexMatrix four = run_cycles(4);
  CHECK(std::abs(one(0, 1) - four(0, 1)) < 1e-13);
  CHECK(std::abs(one(1, 1) - four(1, 1)) < 1e-13);
  // The all-relax leakage into |0> does depend on the split.
  CHECK(std::abs(one(0, 0) - four(0, 0)) > 1e-6);
}

TEST_CASE("multicycle with pulses tracks the estimate") {
  const double t1 = 500.0;
  const double t = 0.2 * t1;
  auto sim = scenario::multicycle_simulate(2, 4, t, t1, true);
  auto est = analytic::f_qed_multicycle_estimate(2, 4, t, t1);
  CHECK(sim.fidelity > 0.99);
  CHECK((1.0 - sim.fidelity) / (1.0 - est.fidelity) ==
        doctest::Approx(1.0).epsilon(0.2));
  CHECK(sim.p_select == doctest::Approx(est.p_select).epsilon(0.02));

  // Pulse placement on the decoded qubit compensates as well.
  auto dec_sim = scenario::multicycle_simulate(
      2, 4, t, t1, true, scenario::PiPulsePlacement::decoded);
  CHECK((1.0 - dec_sim.fidelity) / (1.0 - est.fidelity) ==
        doctest::Approx(1.0).epsilon(0.2));

  CHECK_THROWS_AS(scenario::multicycle_simulate(2, 0, t, t1, true),
                  std::invalid_argument);
  CHECK_THROWS_AS(scenario::multicycle_simulate(2, 2, -1.0, t1, true),
                  std::invalid_argument);
}
