#include "repqed/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "repqed/channels.hpp"
#include "repqed/rng.hpp"

namespace repqed::scenario {

namespace {

void require(bool cond, const char* msg) {
  if (!cond) throw std::invalid_argument(msg);
}

void check_inputs(int n_qubits, std::span<const double> p_list) {
  require(n_qubits >= 1 && n_qubits <= 10,
          "scenario: qubit count outside [1, 10]");
  require(static_cast<int>(p_list.size()) == n_qubits,
          "scenario: one damping strength per qubit required");
  for (double p : p_list)
    require(p >= 0.0 && p <= 1.0, "scenario: p outside [0, 1]");
}

// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration on the
// recurrence-evaluated Legendre polynomial.
struct GlRule {
  std::vector<double> x, w;
};

GlRule gauss_legendre(int n) {
  GlRule rule;
  rule.x.resize(n);
  rule.w.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    rule.x[i] = -x;
    rule.x[n - 1 - i] = x;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.w[i] = w;
    rule.w[n - 1 - i] = w;
  }
  return rule;
}

// Enumerate averaging points for the repetition-code integrands, which are
// azimuth-free by phase covariance (asserted by tests): each point is a
// weight and a = |alpha|^2.  Monte-carlo draws (cos theta, phi) pairs to
// keep the documented stream layout even though phi drops out.
template <typename Fn>
void for_each_weight_a(const BlochAverager& avg, Fn&& fn) {
  switch (avg.kind) {
    case BlochAverager::Kind::quadrature: {
      require(avg.nodes >= 32, "BlochAverager: quadrature needs >= 32 nodes");
      const GlRule rule = gauss_legendre(avg.nodes);
      for (int i = 0; i < avg.nodes; ++i)
        fn(0.5 * rule.w[i], 0.5 * (1.0 + rule.x[i]));
      return;
    }
    case BlochAverager::Kind::six_state: {
      const double sixth = 1.0 / 6.0;
      for (double a : {1.0, 0.0, 0.5, 0.5, 0.5, 0.5}) fn(sixth, a);
      return;
    }
    case BlochAverager::Kind::monte_carlo: {
      require(avg.samples > 0, "BlochAverager: sample count must be positive");
      Rng rng(avg.seed);
      const double w = 1.0 / static_cast<double>(avg.samples);
      for (long long i = 0; i < avg.samples; ++i) {
        const BlochSample s = haar_bloch_sample(rng);
        fn(w, 0.5 * (1.0 + s.cos_theta));
      }
      return;
    }
  }
  throw std::invalid_argument("BlochAverager: unknown kind");
}

// Ancilla result bits of a decoded basis index (ancilla i = qubit i+1).
std::uint32_t ancilla_bits(Eigen::Index idx, int n) {
  std::uint32_t res = 0;
  for (int i = 0; i + 1 < n; ++i)
    res |= ((idx >> (n - 2 - i)) & 1) << i;
  return res;
}

// The decode circuit permutes basis states; extract the permutation from the
// explicitly built CNOT cascade.
std::vector<Eigen::Index> decode_permutation(int n) {
  const qm::ComplexMatrix dec = decode_circuit(n);
  const Eigen::Index dim = dec.rows();
  std::vector<Eigen::Index> perm(dim, -1);
  for (Eigen::Index col = 0; col < dim; ++col) {
    for (Eigen::Index row = 0; row < dim; ++row) {
      const double mag = std::abs(dec(row, col));
      if (mag < 1e-12) continue;
      require(std::abs(mag - 1.0) < 1e-12 && perm[col] == -1,
              "decode_permutation: circuit is not a basis permutation");
      perm[col] = row;
    }
    require(perm[col] >= 0, "decode_permutation: empty circuit column");
  }
  return perm;
}

// Precomputed per-parameter tables driving the fast sphere sweeps.  All
// outcome grouping comes from the explicitly simulated decode circuit via
// its basis permutation; tests pin this path against the dense
// decode_and_measure matrices.
struct Engine {
  int n;
  double big_q;        // prod (1 - p_j): no-relax survival of |1..1>
  double sqrt_big_q;   // surviving |1> amplitude factor
  double w_all;        // prod p_j: all-relax weight factor
  // Per nonzero result r: weight factors (excluding |beta|^2) of the two
  // contributing scenarios.
  std::vector<double> w_main1, w_main0;
  // One correction decision for the whole error class: exchange |0> and |1>
  // on every nonzero result, or on none, whichever side carries more total
  // weight.  A per-result choice could do slightly better for n >= 3 at
  // intermediate p, but the closed-form benchmark fixes one correction for
  // all detected errors (which is also why it coincides with the ignore
  // strategy at p <= 1/2).
  bool flip_errors = false;

  Engine(int n_qubits, std::span<const double> p_list) : n(n_qubits) {
    check_inputs(n_qubits, p_list);
    const auto perm = decode_permutation(n);
    const Eigen::Index dim = Eigen::Index{1} << n;
    const Eigen::Index results = dim >> 1;
    big_q = 1.0;
    for (double p : p_list) big_q *= 1.0 - p;
    sqrt_big_q = std::sqrt(big_q);
    w_all = 1.0;
    for (double p : p_list) w_all *= p;
    w_main1.assign(results, -1.0);
    w_main0.assign(results, -1.0);
    for (Eigen::Index mask = 1; mask < dim; ++mask) {
      // Basis index of the partially relaxed |1..1> component: qubit j
      // stays |1> iff it did not relax.
      Eigen::Index idx = 0;
      double w = 1.0;
      for (int j = 0; j < n; ++j) {
        const bool relaxed = (mask >> j) & 1;
        w *= relaxed ? p_list[j] : 1.0 - p_list[j];
        if (!relaxed) idx |= Eigen::Index{1} << (n - 1 - j);
      }
      const Eigen::Index didx = perm[idx];
      const std::uint32_t result = ancilla_bits(didx, n);
      const int main_bit = static_cast<int>(didx >> (n - 1));
      if (result == 0) {
        require(main_bit == 0, "Engine: unexpected no-error relax scenario");
        continue;  // all-relax scenario, folded in via w_all
      }
      (main_bit ? w_main1 : w_main0)[result] = w;
    }
    double total_main1 = 0.0, total_main0 = 0.0;
    for (Eigen::Index r = 1; r < results; ++r) {
      require(w_main1[r] >= 0.0 && w_main0[r] >= 0.0,
              "Engine: result missing a scenario");
      total_main1 += w_main1[r];
      total_main0 += w_main0[r];
    }
    flip_errors = total_main1 < total_main0;
  }

  struct PointVals {
    double f_ign, f_sel, p_sel, f_qec;
  };

  PointVals eval(double a) const {
    const double b = 1.0 - a;
    PointVals v{};
    // No-error result: the coherent no-relax branch plus the all-relax one.
    const double amp2 = a + b * sqrt_big_q;
    v.f_sel = amp2 * amp2 + b * w_all * a;
    v.p_sel = a + b * big_q + b * w_all;
    v.f_ign = v.f_sel;
    v.f_qec = v.f_sel;
    const std::size_t results = w_main1.size();
    for (std::size_t r = 1; r < results; ++r) {
      const double q1 = b * w_main1[r];
      const double q0 = b * w_main0[r];
      v.f_ign += q1 * b + q0 * a;
      v.f_qec += flip_errors ? q1 * a + q0 * b : q1 * b + q0 * a;
    }
    return v;
  }
};

}  // namespace

BlochAverager BlochAverager::quadrature(int nodes, int phi_nodes) {
  require(nodes >= 32, "BlochAverager: quadrature needs >= 32 nodes");
  require(phi_nodes >= 1, "BlochAverager: need >= 1 azimuthal node");
  BlochAverager avg;
  avg.kind = Kind::quadrature;
  avg.nodes = nodes;
  avg.phi_nodes = phi_nodes;
  return avg;
}

BlochAverager BlochAverager::six_state() {
  BlochAverager avg;
  avg.kind = Kind::six_state;
  return avg;
}

BlochAverager BlochAverager::monte_carlo(long long samples,
                                         std::uint64_t seed) {
  require(samples > 0, "BlochAverager: sample count must be positive");
  BlochAverager avg;
  avg.kind = Kind::monte_carlo;
  avg.samples = samples;
  avg.seed = seed;
  return avg;
}

qm::ComplexMatrix decode_circuit(int n_qubits) {
  require(n_qubits >= 1 && n_qubits <= 10,
          "decode_circuit: qubit count outside [1, 10]");
  const Eigen::Index dim = Eigen::Index{1} << n_qubits;
  qm::ComplexMatrix out = qm::identity(dim);
  for (int anc = 1; anc < n_qubits; ++anc) {
    const int targets[] = {0, anc};
    out = qm::embed_gate(qm::cnot(), targets, n_qubits) * out;
  }
  return out;
}

std::vector<Scenario> unravel(int n_qubits, std::span<const double> p_list,
                              qm::Complex alpha, qm::Complex beta) {
  check_inputs(n_qubits, p_list);
  require(std::abs(std::norm(alpha) + std::norm(beta) - 1.0) < 1e-12,
          "unravel: |alpha|^2 + |beta|^2 must be 1");
  const auto perm = decode_permutation(n_qubits);
  const Eigen::Index dim = Eigen::Index{1} << n_qubits;
  const double b = std::norm(beta);

  auto main_from_decoded = [&](const qm::ComplexVector& encoded) {
    // Decoded state must factor as main x |ancilla pattern>; pick out the
    // two amplitudes sharing the single occupied ancilla pattern.
    qm::ComplexVector decoded = qm::ComplexVector::Zero(dim);
    for (Eigen::Index i = 0; i < dim; ++i)
      if (encoded(i) != qm::Complex(0.0, 0.0)) decoded(perm[i]) = encoded(i);
    const Eigen::Index half = dim >> 1;
    Eigen::Index pattern = -1;
    for (Eigen::Index i = 0; i < dim; ++i) {
      if (std::abs(decoded(i)) < 1e-12) continue;
      const Eigen::Index pat = i & (half - 1);
      require(pattern == -1 || pattern == pat,
              "unravel: decoded state did not factor over one ancilla "
              "pattern");
      pattern = pat;
    }
    if (pattern == -1) pattern = 0;
    qm::ComplexVector main(2);
    main << decoded(pattern), decoded(half | pattern);
    return main;
  };

  std::vector<Scenario> out;
  out.reserve(static_cast<std::size_t>(dim));
  for (Eigen::Index mask = 0; mask < dim; ++mask) {
    Scenario s;
    s.relax_mask = static_cast<std::uint32_t>(mask);
    qm::ComplexVector enc = qm::ComplexVector::Zero(dim);
    if (mask == 0) {
      qm::Complex surv = beta;
      for (double p : p_list) surv *= std::sqrt(1.0 - p);
      enc(0) = alpha;
      enc(dim - 1) = surv;
      s.probability = enc.squaredNorm();
    } else {
      Eigen::Index idx = 0;
      double w = 1.0;
      for (int j = 0; j < n_qubits; ++j) {
        const bool relaxed = (mask >> j) & 1;
        w *= relaxed ? p_list[j] : 1.0 - p_list[j];
        if (!relaxed) idx |= Eigen::Index{1} << (n_qubits - 1 - j);
      }
      enc(idx) = 1.0;
      s.probability = b * w;
    }
    const double norm = std::sqrt(enc.squaredNorm());
    if (norm > 0.0) enc /= norm;
    else enc(0) = 1.0;  // zero-probability branch; keep a valid state
    qm::ComplexVector main = main_from_decoded(enc);
    s.encoded_state = qm::PureState(std::move(enc));
    s.main_state = qm::PureState(std::move(main));
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<OutcomeBranch> decode_and_measure(
    const std::vector<Scenario>& scenarios, int n_qubits) {
  require(n_qubits >= 1 && n_qubits <= 10,
          "decode_and_measure: qubit count outside [1, 10]");
  const Eigen::Index dim = Eigen::Index{1} << n_qubits;
  const Eigen::Index half = dim >> 1;
  const qm::ComplexMatrix dec = decode_circuit(n_qubits);
  std::map<std::uint32_t, OutcomeBranch> grouped;
  for (const Scenario& s : scenarios) {
    require(s.encoded_state.dim() == dim,
            "decode_and_measure: scenario dimension mismatch");
    const qm::ComplexVector decoded = dec * s.encoded_state.amps;
    Eigen::Index pattern = -1;
    for (Eigen::Index i = 0; i < dim; ++i) {
      if (std::abs(decoded(i)) < 1e-12) continue;
      const Eigen::Index pat = i & (half - 1);
      require(pattern == -1 || pattern == pat,
              "decode_and_measure: branch did not factor over one ancilla "
              "pattern");
      pattern = pat;
    }
    if (pattern == -1) pattern = 0;
    qm::ComplexVector main(2);
    main << decoded(pattern), decoded(half | pattern);
    const std::uint32_t result = ancilla_bits(pattern, n_qubits);
    OutcomeBranch& branch = grouped[result];
    branch.result_bits = result;
    if (branch.rho.size() == 0) branch.rho = qm::ComplexMatrix::Zero(2, 2);
    branch.rho += s.probability * (main * main.adjoint());
    branch.probability += s.probability;
  }
  std::vector<OutcomeBranch> out;
  out.reserve(grouped.size());
  for (auto& [result, branch] : grouped) out.push_back(std::move(branch));
  return out;
}

double bloch_average(const std::function<double(const qm::PureState&)>& fn,
                     const BlochAverager& avg) {
  require(static_cast<bool>(fn), "bloch_average: empty function");
  auto state_at = [](double cos_theta, double phi) {
    const double a = std::sqrt(0.5 * (1.0 + cos_theta));
    const double b = std::sqrt(0.5 * (1.0 - cos_theta));
    return qm::PureState::qubit(a, std::polar(b, phi));
  };
  switch (avg.kind) {
    case BlochAverager::Kind::quadrature: {
      require(avg.nodes >= 32, "BlochAverager: quadrature needs >= 32 nodes");
      require(avg.phi_nodes >= 1, "BlochAverager: need >= 1 azimuthal node");
      const GlRule rule = gauss_legendre(avg.nodes);
      double sum = 0.0;
      for (int i = 0; i < avg.nodes; ++i) {
        double phi_sum = 0.0;
        for (int j = 0; j < avg.phi_nodes; ++j)
          phi_sum += fn(state_at(rule.x[i], 2.0 * M_PI * j / avg.phi_nodes));
        sum += 0.5 * rule.w[i] * phi_sum / avg.phi_nodes;
      }
      return sum;
    }
    case BlochAverager::Kind::six_state: {
      double sum = 0.0;
      for (const qm::PureState& s : qm::six_states()) sum += fn(s);
      return sum / 6.0;
    }
    case BlochAverager::Kind::monte_carlo: {
      require(avg.samples > 0, "BlochAverager: sample count must be positive");
      Rng rng(avg.seed);
      double sum = 0.0;
      for (long long i = 0; i < avg.samples; ++i) {
        const BlochSample s = haar_bloch_sample(rng);
        sum += fn(state_at(s.cos_theta, s.phi));
      }
      return sum / static_cast<double>(avg.samples);
    }
  }
  throw std::invalid_argument("BlochAverager: unknown kind");
}

double scenario_fidelity(int n_qubits, std::span<const double> p_list,
                         Mode mode, const BlochAverager& avg) {
  if (mode == Mode::qed_uniform &&
      avg.kind == BlochAverager::Kind::six_state) {
    throw std::invalid_argument(
        "scenario_fidelity: six-state averaging is only valid for "
        "functionals linear in the initial state; the uniform post-selected "
        "fidelity is a pointwise ratio, use quadrature or monte_carlo");
  }
  const Engine engine(n_qubits, p_list);
  double acc = 0.0;
  switch (mode) {
    case Mode::ignore:
      for_each_weight_a(avg, [&](double w, double a) {
        acc += w * engine.eval(a).f_ign;
      });
      return acc;
    case Mode::qed_uniform:
      for_each_weight_a(avg, [&](double w, double a) {
        const auto v = engine.eval(a);
        require(v.p_sel > 0.0,
                "scenario_fidelity: zero selection probability point");
        acc += w * v.f_sel / v.p_sel;
      });
      return acc;
    case Mode::qed_weighted: {
      double num = 0.0, den = 0.0;
      for_each_weight_a(avg, [&](double w, double a) {
        const auto v = engine.eval(a);
        num += w * v.f_sel;
        den += w * v.p_sel;
      });
      require(den > 0.0, "scenario_fidelity: zero mean selection probability");
      return num / den;
    }
    case Mode::qec_optimal:
      for_each_weight_a(avg, [&](double w, double a) {
        acc += w * engine.eval(a).f_qec;
      });
      return acc;
  }
  throw std::invalid_argument("scenario_fidelity: unknown mode");
}

FidelityReport fidelity_sweep(int n_qubits, std::span<const double> p_list,
                              Mode mode, const BlochAverager& avg) {
  if (mode == Mode::qed_uniform &&
      avg.kind == BlochAverager::Kind::six_state) {
    throw std::invalid_argument(
        "fidelity_sweep: six-state averaging cannot produce the uniform "
        "post-selected fidelity (pointwise ratio); use quadrature");
  }
  switch (mode) {
    case Mode::ignore:
    case Mode::qed_uniform:
    case Mode::qed_weighted:
    case Mode::qec_optimal:
      break;
    default:
      throw std::invalid_argument("fidelity_sweep: unknown mode");
  }
  const Engine engine(n_qubits, p_list);
  const bool six = avg.kind == BlochAverager::Kind::six_state;
  double f_ign = 0.0, f_qed = 0.0, num = 0.0, den = 0.0, f_qec = 0.0;
  for_each_weight_a(avg, [&](double w, double a) {
    const auto v = engine.eval(a);
    f_ign += w * v.f_ign;
    num += w * v.f_sel;
    den += w * v.p_sel;
    f_qec += w * v.f_qec;
    if (!six) {
      require(v.p_sel > 0.0, "fidelity_sweep: zero selection probability");
      f_qed += w * v.f_sel / v.p_sel;
    }
  });
  FidelityReport report;
  report.f_1q = analytic::f_av_1q(p_list[0]);
  report.f_ign = f_ign;
  report.f_qed = six ? analytic::kUnset : f_qed;
  report.f_qed_weighted = num / den;
  report.f_qec = f_qec;
  report.f_chi = analytic::f_chi_from_av(f_ign);
  report.p_select = den;
  return report;
}

McEstimate monte_carlo_fidelity(int n_qubits, std::span<const double> p_list,
                                Mode mode, long long n_samples,
                                std::uint64_t seed) {
  require(n_samples > 1, "monte_carlo_fidelity: need at least 2 samples");
  const Engine engine(n_qubits, p_list);
  // Scenario walk order: the no-relax branch, then every mask >= 1 in the
  // Engine's result table order, with the all-relax branch folded last.
  struct Draw {
    double w;       // probability factor (times |beta|^2 for mask != 0)
    int main_bit;   // decoded main-qubit basis value
    bool selected;  // result == 0
    bool flip;      // QEC correction flips this branch
  };
  std::vector<Draw> draws;
  for (std::size_t r = 1; r < engine.w_main1.size(); ++r) {
    draws.push_back({engine.w_main1[r], 1, false, engine.flip_errors});
    draws.push_back({engine.w_main0[r], 0, false, engine.flip_errors});
  }
  draws.push_back({engine.w_all, 0, true, false});

  Rng rng(seed);
  double sum = 0.0, sum2 = 0.0;         // plain-mean modes
  double sum_a = 0.0, sum_b = 0.0;      // weighted-ratio numerator/denominator
  std::vector<double> ratio_a, ratio_b;
  if (mode == Mode::qed_weighted) {
    ratio_a.reserve(static_cast<std::size_t>(n_samples));
    ratio_b.reserve(static_cast<std::size_t>(n_samples));
  }
  for (long long i = 0; i < n_samples; ++i) {
    const BlochSample s = haar_bloch_sample(rng);
    const double a = 0.5 * (1.0 + s.cos_theta);
    const double b = 1.0 - a;
    const double p_none = a + b * engine.big_q;
    const double amp = a + b * engine.sqrt_big_q;
    const double p_sel = p_none + b * engine.w_all;
    // Sample the relaxation scenario.
    double r = rng.uniform();
    double fid = 0.0;       // uncorrected fidelity of the branch state
    double fid_corr = 0.0;  // fidelity after the optimal-correction flip
    bool selected = false;
    if (r < p_none) {
      fid = amp * amp / p_none;
      fid_corr = fid;
      selected = true;
    } else {
      r -= p_none;
      const Draw* hit = &draws.back();
      for (const Draw& d : draws) {
        const double pr = b * d.w;
        if (r < pr) {
          hit = &d;
          break;
        }
        r -= pr;
      }
      selected = hit->selected;
      fid = hit->main_bit ? b : a;
      const int value = hit->flip ? 1 - hit->main_bit : hit->main_bit;
      fid_corr = value ? b : a;
    }
    double x = 0.0;
    switch (mode) {
      case Mode::ignore:
        x = fid;
        break;
      case Mode::qed_uniform:
        x = selected ? fid / p_sel : 0.0;
        break;
      case Mode::qec_optimal:
        x = fid_corr;
        break;
      case Mode::qed_weighted: {
        const double ai = selected ? fid : 0.0;
        const double bi = selected ? 1.0 : 0.0;
        ratio_a.push_back(ai);
        ratio_b.push_back(bi);
        sum_a += ai;
        sum_b += bi;
        continue;
      }
    }
    sum += x;
    sum2 += x * x;
  }

  const double n = static_cast<double>(n_samples);
  McEstimate out{};
  if (mode == Mode::qed_weighted) {
    require(sum_b > 0.0, "monte_carlo_fidelity: no samples selected");
    const double ratio = sum_a / sum_b;
    double var = 0.0;
    for (std::size_t i = 0; i < ratio_a.size(); ++i) {
      const double d = ratio_a[i] - ratio * ratio_b[i];
      var += d * d;
    }
    out.estimate = ratio;
    out.std_error = std::sqrt(var / (n - 1.0)) / (sum_b / std::sqrt(n));
    return out;
  }
  const double mean = sum / n;
  const double var = std::max(0.0, (sum2 - n * mean * mean) / (n - 1.0));
  out.estimate = mean;
  out.std_error = std::sqrt(var / n);
  return out;
}

MulticycleResult multicycle_simulate(int n_qubits, int m_cycles, double t,
                                     double t1, bool pi_pulses,
                                     PiPulsePlacement placement,
                                     const BlochAverager& avg) {
  require(n_qubits >= 1 && n_qubits <= 10,
          "multicycle_simulate: qubit count outside [1, 10]");
  require(m_cycles >= 1, "multicycle_simulate: cycle count must be >= 1");
  require(t >= 0.0, "multicycle_simulate: negative storage time");
  require(t1 > 0.0, "multicycle_simulate: T1 must be positive");
  const double p_c =
      channels::DampingParams::from_time(t / m_cycles, t1).p;
  const Eigen::Index dim = Eigen::Index{1} << n_qubits;
  const Eigen::Index half = dim >> 1;
  const qm::ComplexMatrix dec = decode_circuit(n_qubits);
  qm::ComplexMatrix x_all = qm::ComplexMatrix::Identity(1, 1);
  for (int q = 0; q < n_qubits; ++q) x_all = qm::tensor(x_all, qm::pauli_x());
  qm::ComplexMatrix anc0 = qm::ComplexMatrix::Zero(half, half);
  anc0(0, 0) = 1.0;

  auto run_point = [&](double a) {
    qm::ComplexMatrix rho2(2, 2);
    const double amp0 = std::sqrt(a), amp1 = std::sqrt(1.0 - a);
    rho2 << a, amp0 * amp1, amp0 * amp1, 1.0 - a;
    for (int cycle = 0; cycle < m_cycles; ++cycle) {
      qm::ComplexMatrix rho = qm::tensor(rho2, anc0);
      rho = dec * rho * dec.adjoint();  // encode (self-inverse circuit)
      if (pi_pulses && placement == PiPulsePlacement::encoded)
        rho = x_all * rho * x_all;
      for (int q = 0; q < n_qubits; ++q)
        rho = channels::apply_damping(rho, p_c, q);
      rho = dec * rho * dec.adjoint();  // decode
      // Post-select every ancilla in |0>.
      rho2 << rho(0, 0), rho(0, half), rho(half, 0), rho(half, half);
      if (pi_pulses && placement == PiPulsePlacement::decoded)
        rho2 = qm::pauli_x() * rho2 * qm::pauli_x();
    }
    const double p_sel = rho2.trace().real();
    const double num = (a * rho2(0, 0) + (1.0 - a) * rho2(1, 1) +
                        amp0 * amp1 * (rho2(0, 1) + rho2(1, 0)))
                           .real();
    return std::pair<double, double>(num, p_sel);
  };

  double num = 0.0, den = 0.0;
  for_each_weight_a(avg, [&](double w, double a) {
    const auto [f, p] = run_point(a);
    num += w * f;
    den += w * p;
  });
  require(den > 0.0, "multicycle_simulate: zero selection probability");
  return {num / den, den};
}

}  // namespace repqed::scenario
