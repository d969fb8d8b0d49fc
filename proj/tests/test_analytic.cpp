#include "doctest.h"

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "repqed/analytic.hpp"

using namespace repqed;

namespace {

// Independent oracle: Simpson integration over a = |alpha|^2 in [0, 1]
// (uniform in a is the Haar measure marginal used by every closed form here).
double simpson(const std::function<double(double)>& f, int panels = 2000) {
  const double h = 1.0 / panels;
  double sum = f(0.0) + f(1.0);
  for (int i = 1; i < panels; ++i) {
    sum += (i % 2 ? 4.0 : 2.0) * f(i * h);
  }
  return sum * h / 3.0;
}

double pow_n(double x, int n) { return std::pow(x, n); }

// Post-selected numerator / selection probability of the uniform-p code at
// one Bloch point, written from the branch structure: the coherent no-relax
// branch keeps amplitude (1-p)^{n/2} on |1...1>, and the all-relax branch
// (weight b p^n) also lands in the accepted all-zeros result with main |0>.
struct QedPoint {
  double numerator;
  double probability;
};
QedPoint qed_point(int n, double p, double a) {
  const double b = 1.0 - a;
  const double overlap = a + b * std::pow(1.0 - p, n / 2.0);
  return {overlap * overlap + b * pow_n(p, n) * a,
          a + b * pow_n(1.0 - p, n) + b * pow_n(p, n)};
}

}  // namespace

TEST_CASE("bloch moments") {
  using analytic::BlochKind;
  // plain powers of a, b uniform in a.
  CHECK(analytic::bloch_average_closed(BlochKind::a2) == doctest::Approx(0.5));
  CHECK(analytic::bloch_average_closed(BlochKind::a4) ==
        doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  CHECK(analytic::bloch_average_closed(BlochKind::a6) ==
        doctest::Approx(0.25).epsilon(1e-14));
  CHECK(analytic::bloch_average_closed(BlochKind::a2b2) ==
        doctest::Approx(1.0 / 6.0).epsilon(1e-14));
  CHECK(analytic::bloch_average_closed(BlochKind::a2b4) ==
        doctest::Approx(1.0 / 12.0).epsilon(1e-14));
  CHECK(analytic::bloch_average_closed(BlochKind::a4b4) ==
        doctest::Approx(1.0 / 30.0).epsilon(1e-14));
}

TEST_CASE("bloch log-form averages") {
  using analytic::BlochKind;
  // with L = ln((A+B)/A):
  //   <1/(A+Bb)>   = L/B
  //   <b/(A+Bb)>   = (B - A L)/B^2
  //   <b^2/(A+Bb)> = (B^2/2 - A B + A^2 L)/B^3
  const double A = 1.0, B = 0.8;
  const double L = std::log((A + B) / A);
  CHECK(analytic::bloch_average_closed(BlochKind::inv, A, B) ==
        doctest::Approx(L / B).epsilon(1e-13));
  CHECK(analytic::bloch_average_closed(BlochKind::b2_inv, A, B) ==
        doctest::Approx((B - A * L) / (B * B)).epsilon(1e-13));
  CHECK(analytic::bloch_average_closed(BlochKind::b4_inv, A, B) ==
        doctest::Approx((B * B / 2 - A * B + A * A * L) / (B * B * B))
            .epsilon(1e-13));

  // a = 1 - b reduces the a-weighted forms to combinations of the above.
  const double inv = analytic::bloch_average_closed(BlochKind::inv, A, B);
  const double b2 = analytic::bloch_average_closed(BlochKind::b2_inv, A, B);
  const double b4 = analytic::bloch_average_closed(BlochKind::b4_inv, A, B);
  CHECK(analytic::bloch_average_closed(BlochKind::a4_inv, A, B) ==
        doctest::Approx(inv - 2 * b2 + b4).epsilon(1e-13));
  CHECK(analytic::bloch_average_closed(BlochKind::a2b2_inv, A, B) ==
        doctest::Approx(b2 - b4).epsilon(1e-13));

  // Negative B (the relax-free denominator 1 - p b) and the pinned case
  // A = B = 1, where <1/(1 + b)> = ln 2.
  CHECK(analytic::bloch_average_closed(BlochKind::inv, 1.0, 1.0) ==
        doctest::Approx(std::log(2.0)).epsilon(1e-14));
  const double Bn = -0.5;
  CHECK(analytic::bloch_average_closed(BlochKind::inv, 1.0, Bn) ==
        doctest::Approx(std::log(0.5) / Bn).epsilon(1e-13));

  // The small-B series branch must agree with log1p to full precision.
  const double Bs = 1e-3;
  CHECK(analytic::bloch_average_closed(BlochKind::inv, 1.0, Bs) ==
        doctest::Approx(std::log1p(Bs) / Bs).epsilon(1e-14));
  CHECK(analytic::bloch_average_closed(BlochKind::b2_inv, 1.0, Bs) ==
        doctest::Approx(simpson([&](double a) {
          return (1 - a) / (1.0 + Bs * (1 - a));
        })).epsilon(1e-12));
  // B = 0 exactly falls back to the plain moments over 1/A.
  CHECK(analytic::bloch_average_closed(BlochKind::inv, 2.0, 0.0) ==
        doctest::Approx(0.5).epsilon(1e-14));
  CHECK(analytic::bloch_average_closed(BlochKind::b4_inv, 1.0, 0.0) ==
        doctest::Approx(1.0 / 3.0).epsilon(1e-14));

  CHECK_THROWS_AS(analytic::bloch_average_closed(BlochKind::inv, 0.0, 1.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(analytic::bloch_average_closed(BlochKind::inv, 1.0, -1.0),
                  std::invalid_argument);
}

TEST_CASE("unencoded qubit average fidelity") {
  // f = 2/3 + sqrt(1-p)/3 - p/6.
  CHECK(analytic::f_av_1q(0.0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(analytic::f_av_1q(1.0) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(analytic::f_av_1q(0.5) ==
        doctest::Approx(0.8190355937288492).epsilon(1e-14));
  // Numeric cross-check at one interior point.
  const double p = 0.37;
  const double direct = simpson([&](double a) {
    const double b = 1 - a;
    const double c = a + b * std::sqrt(1 - p);
    return c * c + p * b * a;
  });
  CHECK(analytic::f_av_1q(p) == doctest::Approx(direct).epsilon(1e-10));

  CHECK(analytic::f_chi_from_av(analytic::f_av_1q(0.5)) ==
        doctest::Approx(0.7285533905932738).epsilon(1e-14));
  CHECK(analytic::f_chi_from_av(1.0) == doctest::Approx(1.0));

  CHECK_THROWS_AS(analytic::f_av_1q(-0.1), std::invalid_argument);
  CHECK_THROWS_AS(analytic::f_av_1q(1.1), std::invalid_argument);
}

TEST_CASE("single-qubit branch conditionals") {
  const double p = 0.4;
  auto c = analytic::conditional_fidelities_1q(p);
  // relax branch collapses to |0>: uniform average <a> = 1/2,
  // weighted average <ab>/<b> = 1/3, mean probability p/2.
  CHECK(c.f_av_relax == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(c.f_av_relax_weighted ==
        doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  CHECK(c.p_relax_avg == doctest::Approx(p / 2).epsilon(1e-14));
  CHECK(c.p_none_avg == doctest::Approx(1 - p / 2).epsilon(1e-14));
  // weighted no-relax branch: (2 - p + sqrt(1-p)) / (3 - 3p/2).
  CHECK(c.f_av_none_weighted ==
        doctest::Approx(0.9894152788506181).epsilon(1e-14));
  // Uniform no-relax branch against direct integration of the conditional.
  const double direct = simpson([&](double a) {
    const double b = 1 - a;
    const double amp = a + b * std::sqrt(1 - p);
    return amp * amp / (1 - p * b);
  });
  CHECK(c.f_av_none == doctest::Approx(direct).epsilon(1e-10));

  // The weighted conditionals reassemble the unconditioned average exactly.
  CHECK(c.f_av_relax_weighted * c.p_relax_avg +
            c.f_av_none_weighted * c.p_none_avg ==
        doctest::Approx(analytic::f_av_1q(p)).epsilon(1e-14));
}

TEST_CASE("two-qubit closed forms") {
  // hand evaluation at (0.1, 0.2); see the term-by-term sum:
  // 1/3 + sqrt(0.72)/3 + 0.72/3 + 0.9*0.2/3 + 0.1/6.
  CHECK(analytic::f_ign_2q(0.1, 0.2) ==
        doctest::Approx(0.932842712474619).epsilon(1e-14));
  // Correcting only helps when the main qubit is the noisier one, and the
  // best exchange then makes (p1, p2) behave like the swapped pair.
  CHECK(analytic::f_qec_2q(0.1, 0.2) ==
        doctest::Approx(analytic::f_ign_2q(0.1, 0.2)).epsilon(1e-15));
  CHECK(analytic::f_qec_2q(0.2, 0.1) ==
        doctest::Approx(0.932842712474619).epsilon(1e-14));
  CHECK(analytic::f_qec_2q(0.2, 0.1) - analytic::f_ign_2q(0.2, 0.1) ==
        doctest::Approx(0.1 / 6).epsilon(1e-12));

  // p1 = p2 = 0.3: numerator and selection probability are both
  // linear in a, so F = int (0.49 + 0.51 a)/(0.58 + 0.42 a) da
  //                  = (0.51 + (3/14) ln 0.58)/0.42.
  const double closed = (0.51 + (3.0 / 14.0) * std::log(0.58)) / 0.42;
  CHECK(analytic::f_qed_2q(0.3, 0.3) ==
        doctest::Approx(closed).epsilon(1e-13));
  CHECK(analytic::f_qed_2q(0.3, 0.3) ==
        doctest::Approx(simpson([](double a) {
          return (0.49 + 0.51 * a) / (0.58 + 0.42 * a);
        })).epsilon(1e-11));
  // weighted variant is the ratio of the mean numerator to the
  // mean selection probability: 0.745 / 0.79.
  CHECK(analytic::f_qed_2q_weighted(0.3, 0.3) ==
        doctest::Approx(0.745 / 0.79).epsilon(1e-13));

  // Asymmetric damping: integrate the branch construction directly.
  const double p1 = 0.15, p2 = 0.35;
  const double q = (1 - p1) * (1 - p2);
  const double direct_u = simpson([&](double a) {
    const double b = 1 - a;
    const double amp = a + b * std::sqrt(q);
    return (amp * amp + b * p1 * p2 * a) / (a + b * q + b * p1 * p2);
  });
  const double direct_num = simpson([&](double a) {
    const double b = 1 - a;
    const double amp = a + b * std::sqrt(q);
    return amp * amp + b * p1 * p2 * a;
  });
  const double direct_den = simpson(
      [&](double a) { return a + (1 - a) * q + (1 - a) * p1 * p2; });
  CHECK(analytic::f_qed_2q(p1, p2) ==
        doctest::Approx(direct_u).epsilon(1e-10));
  CHECK(analytic::f_qed_2q_weighted(p1, p2) ==
        doctest::Approx(direct_num / direct_den).epsilon(1e-10));
  const double direct_ign = simpson([&](double a) {
    const double b = 1 - a;
    const double amp = a + b * std::sqrt(q);
    // Accepted result keeps amp^2 + all-relax weight on |0>; the flagged
    // result holds the single-relax scenarios, whose decoded main qubit is
    // |1> when the ancilla relaxed and |0> when the main qubit did.
    return amp * amp + b * p1 * p2 * a + b * (1 - p1) * p2 * b +
           b * p1 * (1 - p2) * a;
  });
  CHECK(analytic::f_ign_2q(p1, p2) ==
        doctest::Approx(direct_ign).epsilon(1e-10));

  // Degenerate pair (p1, p2) = (0, 1): the ancilla always relaxes, so the
  // accepted result keeps only the alpha|00> amplitude and the conditional
  // fidelity integrates to <a^2 / a> = 1/2.
  CHECK(analytic::f_qed_2q(0.0, 1.0) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("n-qubit closed forms reduce to the small cases") {
  for (double p : {0.0, 0.1, 0.3, 0.5, 0.7, 0.9, 1.0}) {
    CAPTURE(p);
    CHECK(analytic::f_ign_nq(2, p) ==
          doctest::Approx(analytic::f_ign_2q(p, p)).epsilon(1e-13));
    CHECK(analytic::f_qed_nq(2, p) ==
          doctest::Approx(analytic::f_qed_2q(p, p)).epsilon(1e-13));
    CHECK(analytic::f_qed_nq_weighted(2, p) ==
          doctest::Approx(analytic::f_qed_2q_weighted(p, p)).epsilon(1e-13));
    CHECK(analytic::f_qec_nq(2, p) ==
          doctest::Approx(analytic::f_qec_2q(p, p)).epsilon(1e-13));
    // N = 1 is the bare qubit under every strategy.
    CHECK(analytic::f_ign_nq(1, p) ==
          doctest::Approx(analytic::f_av_1q(p)).epsilon(1e-13));
    CHECK(analytic::f_qed_nq(1, p) ==
          doctest::Approx(analytic::f_av_1q(p)).epsilon(1e-13));
    CHECK(analytic::f_qec_nq(1, p) ==
          doctest::Approx(analytic::f_av_1q(p)).epsilon(1e-13));
    CHECK(analytic::p_select_nq(1, p) == doctest::Approx(1.0).epsilon(1e-14));
  }
}

TEST_CASE("n-qubit closed forms against direct integration") {
  for (int n : {3, 4, 5}) {
    for (double p : {0.05, 0.3, 0.6, 0.85}) {
      CAPTURE(n);
      CAPTURE(p);
      const double direct_u = simpson([&](double a) {
        auto pt = qed_point(n, p, a);
        return pt.numerator / pt.probability;
      });
      const double direct_num =
          simpson([&](double a) { return qed_point(n, p, a).numerator; });
      const double direct_den =
          simpson([&](double a) { return qed_point(n, p, a).probability; });
      CHECK(analytic::f_qed_nq(n, p) ==
            doctest::Approx(direct_u).epsilon(1e-9));
      CHECK(analytic::f_qed_nq_weighted(n, p) ==
            doctest::Approx(direct_num / direct_den).epsilon(1e-9));
      CHECK(analytic::p_select_nq(n, p) ==
            doctest::Approx(direct_den).epsilon(1e-10));
      // <P_select> = 1/2 + ((1-p)^n + p^n)/2.
      CHECK(analytic::p_select_nq(n, p) ==
            doctest::Approx(0.5 + (pow_n(1 - p, n) + pow_n(p, n)) / 2)
                .epsilon(1e-13));
      CHECK(analytic::f_ign_nq(n, p) ==
            doctest::Approx(2.0 / 3.0 + std::pow(1 - p, n / 2.0) / 3 - p / 6)
                .epsilon(1e-13));
    }
  }
}

TEST_CASE("qec equals ignore up to half and beats it beyond") {
  for (int n : {2, 3, 4, 5}) {
    for (double p : {0.0, 0.1, 0.25, 0.4, 0.5}) {
      CAPTURE(n);
      CAPTURE(p);
      CHECK(analytic::f_qec_nq(n, p) ==
            doctest::Approx(analytic::f_ign_nq(n, p)).epsilon(1e-15));
    }
  }
  for (int n : {3, 4, 5}) {
    for (double p : {0.6, 0.75, 0.9}) {
      CAPTURE(n);
      CAPTURE(p);
      CHECK(analytic::f_qec_nq(n, p) > analytic::f_ign_nq(n, p) + 1e-6);
    }
  }
  // The two-qubit code gains nothing from correction at uniform p.
  for (double p : {0.6, 0.9}) {
    CHECK(analytic::f_qec_nq(2, p) ==
          doctest::Approx(analytic::f_ign_nq(2, p)).epsilon(1e-15));
  }
}

TEST_CASE("full-relaxation endpoint") {
  // at p = 1 every outcome funnels into the accepted result and
  // only |0> survives: every strategy gives <a> = 1/2.
  for (int n : {2, 3, 4}) {
    CHECK(analytic::f_qed_nq(n, 1.0) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(analytic::f_qed_nq_weighted(n, 1.0) ==
          doctest::Approx(0.5).epsilon(1e-12));
    CHECK(analytic::p_select_nq(n, 1.0) == doctest::Approx(1.0));
  }
}

TEST_CASE("phase-flip capacity scan") {
  auto scan = analytic::hamming_min_qubits();
  CHECK(scan.n == 5);
  REQUIRE(scan.trace.size() == 5);
  // 2^(n-1) vs 1 + 2n: 8 < 9 at n = 4, 16 >= 11 at n = 5.
  CHECK(scan.trace[3].codewords == 8);
  CHECK(scan.trace[3].needed == 9);
  CHECK(scan.trace[4].codewords == 16);
  CHECK(scan.trace[4].needed == 11);
  for (std::size_t i = 0; i + 1 < scan.trace.size(); ++i) {
    CHECK(scan.trace[i].codewords < scan.trace[i].needed);
  }
}

TEST_CASE("multicycle estimate") {
  // n = 2, m = 4, t = 0.2 T1: infidelity 4 (0.05)^2 / 3 and
  // selection probability e^{-0.2}.
  auto est = analytic::f_qed_multicycle_estimate(2, 4, 100.0, 500.0);
  CHECK(1.0 - est.fidelity ==
        doctest::Approx(4 * 0.05 * 0.05 / 3).epsilon(1e-12));
  CHECK(est.p_select == doctest::Approx(std::exp(-0.2)).epsilon(1e-12));
  CHECK(est.validity_ratio == doctest::Approx(0.1).epsilon(1e-12));

  CHECK_THROWS_AS(analytic::f_qed_multicycle_estimate(2, 3, 100.0, 500.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(analytic::f_qed_multicycle_estimate(2, 0, 100.0, 500.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(analytic::f_qed_multicycle_estimate(2, 4, -1.0, 500.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(analytic::f_qed_multicycle_estimate(2, 4, 100.0, 0.0),
                  std::invalid_argument);
}

TEST_CASE("argument validation on the n-qubit forms") {
  CHECK_THROWS_AS(analytic::f_ign_nq(0, 0.3), std::invalid_argument);
  CHECK_THROWS_AS(analytic::f_ign_nq(15, 0.3), std::invalid_argument);
  CHECK_THROWS_AS(analytic::f_qed_nq(2, -0.01), std::invalid_argument);
  CHECK_THROWS_AS(analytic::f_qec_nq(2, 1.01), std::invalid_argument);
}
