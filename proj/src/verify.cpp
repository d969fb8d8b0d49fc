#include "repqed/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "repqed/analytic.hpp"
#include "repqed/channels.hpp"
#include "repqed/config.hpp"
#include "repqed/correction.hpp"
#include "repqed/protocol.hpp"
#include "repqed/qmath.hpp"
#include "repqed/rng.hpp"
#include "repqed/scenario.hpp"

namespace repqed::cli {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void fold(double& worst, double value) {
  if (std::isnan(value)) value = kInf;
  worst = std::max(worst, std::abs(value));
}

std::vector<double> grid(double lo, double hi, int steps) {
  std::vector<double> out;
  for (int i = 0; i < steps; ++i)
    out.push_back(lo + (hi - lo) * i / (steps - 1));
  return out;
}

qm::ComplexMatrix random_matrix(Rng& rng, double scale) {
  qm::ComplexMatrix m(2, 2);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      m(i, j) = qm::Complex(rng.uniform(-scale, scale),
                            rng.uniform(-scale, scale));
  return m;
}

correction::LinearQubitOp random_op(Rng& rng) {
  std::vector<qm::ComplexMatrix> kraus;
  const int terms = 1 + static_cast<int>(rng.uniform() * 2.0);
  for (int k = 0; k < terms; ++k) kraus.push_back(random_matrix(rng, 0.7));
  return correction::LinearQubitOp::from_kraus(kraus);
}

qm::ComplexMatrix random_unitary(Rng& rng) {
  return qm::rotation_gate(qm::Axis::z, rng.uniform(0.0, 2.0 * M_PI)) *
         qm::rotation_gate(qm::Axis::y, rng.uniform(0.0, M_PI)) *
         qm::rotation_gate(qm::Axis::z, rng.uniform(0.0, 2.0 * M_PI));
}

double sphere_average(const std::function<double(const qm::PureState&)>& fn,
                      int nodes = 64) {
  return scenario::bloch_average(
      fn, scenario::BlochAverager::quadrature(nodes, 8));
}

// Closed moment and log-form averages against direct quadrature.
double check_closed_bloch_moments() {
  using analytic::BlochKind;
  double worst = 0.0;
  const auto moment = [&](BlochKind kind, auto integrand) {
    const double closed = analytic::bloch_average_closed(kind);
    const double quad = sphere_average([&](const qm::PureState& psi) {
      const double a = std::norm(psi.amps[0]);
      return integrand(a, 1.0 - a);
    });
    fold(worst, closed - quad);
  };
  moment(BlochKind::a2, [](double a, double) { return a; });
  moment(BlochKind::a4, [](double a, double) { return a * a; });
  moment(BlochKind::a6, [](double a, double) { return a * a * a; });
  moment(BlochKind::a2b2, [](double a, double b) { return a * b; });
  moment(BlochKind::a2b4, [](double a, double b) { return a * b * b; });
  moment(BlochKind::a4b4, [](double a, double b) { return a * a * b * b; });

  const double pairs[][2] = {{1.0, 0.8},   {1.0, -0.5}, {0.3, 0.6},
                             {1.0, 1e-3},  {1.0, -1e-4}, {2.0, 0.0}};
  for (const auto& ab : pairs) {
    const double A = ab[0], B = ab[1];
    const auto log_form = [&](BlochKind kind, auto numerator) {
      const double closed = analytic::bloch_average_closed(kind, A, B);
      const double quad = sphere_average([&](const qm::PureState& psi) {
        const double a = std::norm(psi.amps[0]);
        const double b = 1.0 - a;
        return numerator(a, b) / (A + B * b);
      });
      fold(worst, closed - quad);
    };
    log_form(BlochKind::inv, [](double, double) { return 1.0; });
    log_form(BlochKind::b2_inv, [](double, double b) { return b; });
    log_form(BlochKind::b4_inv, [](double, double b) { return b * b; });
    log_form(BlochKind::a4_inv, [](double a, double) { return a * a; });
    log_form(BlochKind::a2b2_inv, [](double a, double b) { return a * b; });
  }
  return worst;
}

// N-qubit closed forms against the scenario engine.  The post-selected
// uniform average has an integrand pole just outside [0, 1] whose distance
// shrinks as (1-p)^N, so the node count is raised well past the default and
// the grid stops at p = 0.9.
double check_analytic_vs_scenario() {
  const auto avg = scenario::BlochAverager::quadrature(1024);
  double worst = 0.0;
  for (int n = 1; n <= 4; ++n) {
    for (double p : grid(0.0, 0.9, 13)) {
      const std::vector<double> p_list(static_cast<std::size_t>(n), p);
      const analytic::FidelityReport r = scenario::fidelity_sweep(
          n, p_list, scenario::Mode::ignore, avg);
      fold(worst, r.f_ign - analytic::f_ign_nq(n, p));
      fold(worst, r.f_qed - analytic::f_qed_nq(n, p));
      fold(worst, r.f_qed_weighted - analytic::f_qed_nq_weighted(n, p));
      fold(worst, r.f_qec - analytic::f_qec_nq(n, p));
      fold(worst, r.p_select - analytic::p_select_nq(n, p));
      fold(worst, r.f_1q - analytic::f_av_1q(p));
    }
  }
  return worst;
}

// Six-state shortcut against quadrature for everything linear in the
// initial state: the sweep's linear columns and random probe-built maps.
double check_six_state_linearity() {
  double worst = 0.0;
  const auto six = scenario::BlochAverager::six_state();
  const auto quad = scenario::BlochAverager::quadrature(64);
  for (int n : {2, 3}) {
    for (double p : {0.15, 0.45, 0.75}) {
      const std::vector<double> p_list(static_cast<std::size_t>(n), p);
      const auto rs = scenario::fidelity_sweep(n, p_list,
                                               scenario::Mode::ignore, six);
      const auto rq = scenario::fidelity_sweep(n, p_list,
                                               scenario::Mode::ignore, quad);
      fold(worst, rs.f_ign - rq.f_ign);
      fold(worst, rs.f_qed_weighted - rq.f_qed_weighted);
      fold(worst, rs.f_qec - rq.f_qec);
      fold(worst, rs.p_select - rq.p_select);
    }
  }
  Rng rng(20260501);
  for (int trial = 0; trial < 20; ++trial) {
    const correction::LinearQubitOp op = random_op(rng);
    const qm::ComplexMatrix u = random_unitary(rng);
    const double six_val = correction::six_state_fidelity(op, u);
    const double quad_val = sphere_average([&](const qm::PureState& psi) {
      const qm::ComplexMatrix rho = psi.density();
      const qm::ComplexMatrix target = u * rho * u.adjoint();
      return (target * op.apply(rho)).trace().real();
    });
    fold(worst, six_val - quad_val);
  }
  return worst;
}

// Mean selection probability from the two antipodal probes alone.
double check_two_point_selection() {
  double worst = 0.0;
  Rng rng(777201);
  for (int trial = 0; trial < 20; ++trial) {
    const correction::LinearQubitOp op = random_op(rng);
    const double two_point = correction::two_point_selection_probability(op);
    const double quad = sphere_average([&](const qm::PureState& psi) {
      return op.apply(psi.density()).trace().real();
    });
    fold(worst, two_point - quad);
  }
  return worst;
}

// The scenario unraveling summed over results must reproduce the Kraus
// channel applied to the encoded state, decoded, with ancillas traced out.
double check_scenario_vs_kraus_map() {
  double worst = 0.0;
  Rng rng(44103);
  for (int n : {2, 3}) {
    for (int trial = 0; trial < 8; ++trial) {
      std::vector<double> p_list;
      for (int q = 0; q < n; ++q) p_list.push_back(rng.uniform(0.0, 0.6));
      const double theta = rng.uniform(0.0, M_PI);
      const double phi = rng.uniform(0.0, 2.0 * M_PI);
      const qm::Complex alpha(std::cos(theta / 2.0), 0.0);
      const qm::Complex beta =
          std::sin(theta / 2.0) * std::exp(qm::Complex(0.0, phi));

      const auto scenarios = scenario::unravel(n, p_list, alpha, beta);
      const auto branches = scenario::decode_and_measure(scenarios, n);
      qm::ComplexMatrix from_branches = qm::ComplexMatrix::Zero(2, 2);
      double total_prob = 0.0;
      for (const auto& branch : branches) {
        from_branches += branch.rho;
        total_prob += branch.probability;
      }

      const int dim = 1 << n;
      qm::ComplexVector code_amps = qm::ComplexVector::Zero(dim);
      code_amps(0) = alpha;
      code_amps(dim - 1) = beta;
      qm::ComplexMatrix encoded = code_amps * code_amps.adjoint();
      for (int q = 0; q < n; ++q)
        encoded = channels::apply_damping(encoded, p_list[q], q);
      const qm::ComplexMatrix dec = scenario::decode_circuit(n);
      const qm::ComplexMatrix decoded = dec * encoded * dec.adjoint();
      const qm::ComplexMatrix from_kraus = qm::partial_trace(decoded, 0, n);

      fold(worst, (from_branches - from_kraus).cwiseAbs().maxCoeff());
      fold(worst, total_prob - 1.0);
    }
  }
  return worst;
}

// One-qubit conditional fidelities must reconstruct the unconditional
// average: F_av = sum over branches of weighted conditional x probability.
double check_conditional_reconstruction() {
  double worst = 0.0;
  for (double p : {0.0, 0.2, 0.5, 0.8, 1.0}) {
    const analytic::Conditional1q c = analytic::conditional_fidelities_1q(p);
    fold(worst, c.p_relax_avg + c.p_none_avg - 1.0);
    fold(worst, c.f_av_relax_weighted * c.p_relax_avg +
                    c.f_av_none_weighted * c.p_none_avg -
                    analytic::f_av_1q(p));
  }
  return worst;
}

// Closed-form selection probability against the scenario engine; the
// quantity is linear in the initial state, so default nodes are exact.
double check_selection_probability() {
  const auto avg = scenario::BlochAverager::quadrature(64);
  double worst = 0.0;
  for (int n = 1; n <= 4; ++n) {
    for (double p : {0.1, 0.5, 0.9}) {
      const std::vector<double> p_list(static_cast<std::size_t>(n), p);
      const auto r = scenario::fidelity_sweep(n, p_list,
                                              scenario::Mode::ignore, avg);
      fold(worst, r.p_select - analytic::p_select_nq(n, p));
    }
  }
  return worst;
}

// Trajectory Monte Carlo against quadrature, in standard-error units, plus
// bit-identical reproducibility for a fixed seed.
double check_monte_carlo_consistency() {
  struct Tuple {
    int n;
    double p;
    scenario::Mode mode;
  };
  const Tuple tuples[] = {{2, 0.2, scenario::Mode::ignore},
                          {2, 0.2, scenario::Mode::qed_uniform},
                          {3, 0.4, scenario::Mode::qed_weighted},
                          {2, 0.3, scenario::Mode::qec_optimal}};
  const long long samples = 200000;
  double worst = 0.0;
  for (const Tuple& t : tuples) {
    const std::vector<double> p_list(static_cast<std::size_t>(t.n), t.p);
    const double ref = scenario::scenario_fidelity(
        t.n, p_list, t.mode, scenario::BlochAverager::quadrature(256));
    const auto mc =
        scenario::monte_carlo_fidelity(t.n, p_list, t.mode, samples, 9911);
    const auto repeat =
        scenario::monte_carlo_fidelity(t.n, p_list, t.mode, samples, 9911);
    if (mc.estimate != repeat.estimate || mc.std_error != repeat.std_error)
      fold(worst, kInf);
    fold(worst, (mc.estimate - ref) / std::max(mc.std_error, 1e-15));
  }
  return worst;
}

using BranchSamples = std::vector<correction::BranchKK>;

BranchSamples random_branches(int count, std::uint64_t seed) {
  BranchSamples out;
  Rng rng(seed);
  while (static_cast<int>(out.size()) < count) {
    correction::BranchKK branch;
    branch.k = rng.uniform();
    branch.k_tilde = rng.uniform();
    if (branch.k * branch.k + branch.k_tilde * branch.k_tilde > 1.0) continue;
    branch.outcome_class =
        rng.uniform() < 0.5 ? correction::BranchKK::OutcomeClass::no_error_0
                            : correction::BranchKK::OutcomeClass::error_result;
    out.push_back(branch);
  }
  return out;
}

// The Euler-grid search can never beat the closed-form optimum, and both
// optimizer classes put their argmax exactly on the grid, so the two values
// agree to roundoff; class detection must match off the k = k_tilde tie.
double check_correction_grid_bound() {
  double worst = 0.0;
  for (const auto& branch : random_branches(200, 551133)) {
    const auto closed = correction::optimal_correction(branch);
    const auto search =
        correction::numeric_unitary_search(correction::branch_op(branch), 48);
    fold(worst, search.f_bar - closed.f_bar_max);
    const bool tie = std::abs(branch.k - branch.k_tilde) < 1e-6;
    if (!tie &&
        branch.outcome_class ==
            correction::BranchKK::OutcomeClass::error_result) {
      const bool grid_flip = search.abs_u10 > 0.5;
      const bool closed_flip =
          closed.u_class == correction::UnitaryClass::bit_flip;
      if (grid_flip != closed_flip) fold(worst, kInf);
    }
  }
  return worst;
}

// The probe-image fidelity formula against direct sphere quadrature for
// random trace-changing maps and random correction unitaries.
double check_correction_vs_quadrature() {
  double worst = 0.0;
  Rng rng(31337);
  for (int trial = 0; trial < 25; ++trial) {
    const correction::LinearQubitOp op = random_op(rng);
    const qm::ComplexMatrix u = random_unitary(rng);
    const double closed = correction::avg_fidelity_vs_unitary(op, u);
    const double quad = sphere_average([&](const qm::PureState& psi) {
      const qm::ComplexMatrix rho = psi.density();
      const qm::ComplexMatrix target = u * rho * u.adjoint();
      return (target * op.apply(rho)).trace().real();
    });
    fold(worst, closed - quad);
  }
  return worst;
}

// Without decoherence every intentional error is either perfectly detected
// and corrected or perfectly invisible.
double check_protocol_ideal_limits() {
  using protocol::ErrorKind;
  double worst = 0.0;
  for (double theta2 : {0.0, 0.4 * M_PI, 0.8 * M_PI, M_PI}) {
    const double s2 = std::sin(theta2 / 2.0) * std::sin(theta2 / 2.0);
    const double f_ign_expected = 1.0 - s2 + s2 / 3.0;
    for (ErrorKind error :
         {ErrorKind::r1x, ErrorKind::r1y, ErrorKind::r2y}) {
      protocol::ProtocolConfig c;
      c.error = error;
      c.theta2 = theta2;
      const auto result = protocol::protocol_fidelities(c);
      // At theta2 = pi the accepted branch has zero weight and the
      // post-selected fidelity is 0/0; skip it there.
      if (result.report.p_select > 1e-6)
        fold(worst, result.report.f_qed_weighted - 1.0);
      fold(worst, result.report.f_qec - 1.0);
      fold(worst, result.report.f_ign - f_ign_expected);
    }
    {
      protocol::ProtocolConfig c;
      c.error = ErrorKind::r2z;
      c.theta2 = theta2;
      const auto result = protocol::protocol_fidelities(c);
      fold(worst, result.report.f_ign - 1.0);
      if (result.report.p_select > 1e-6)
        fold(worst, result.report.f_qed_weighted - 1.0);
      fold(worst, result.report.f_qec - 1.0);
    }
    for (ErrorKind error : {ErrorKind::r1z, ErrorKind::r2x}) {
      protocol::ProtocolConfig c;
      c.error = error;
      c.theta2 = theta2;
      const auto result = protocol::protocol_fidelities(c);
      for (double p1 : result.p1) fold(worst, p1);
    }
  }
  for (protocol::Protocol proto :
       {protocol::Protocol::fig7a, protocol::Protocol::fig7b}) {
    protocol::ProtocolConfig c;
    c.protocol = proto;
    c.error = ErrorKind::r1x;
    c.theta2 = 0.0;
    const auto result = protocol::protocol_fidelities(c);
    fold(worst, result.report.f_ign - 1.0);
    fold(worst, result.report.f_qed_weighted - 1.0);
    fold(worst, result.report.p_select - 1.0);
  }
  return worst;
}

// fig7b storage with ideal gates is exactly the two-qubit repetition code
// with equal per-qubit strengths.
double check_protocol_storage_oracle() {
  double worst = 0.0;
  for (double p : {0.0, 0.2, 0.5, 0.7}) {
    protocol::ProtocolConfig c;
    c.protocol = protocol::Protocol::fig7b;
    c.error = protocol::ErrorKind::damp_storage;
    c.storage_p = p;
    const auto result = protocol::protocol_fidelities(c);
    fold(worst, result.report.f_ign - analytic::f_ign_2q(p, p));
    fold(worst,
         result.report.f_qed_weighted - analytic::f_qed_2q_weighted(p, p));
    fold(worst, result.report.p_select - analytic::p_select_nq(2, p));
  }
  return worst;
}

// Small-strength multicycle estimate against the cycle-by-cycle simulation.
double check_multicycle_estimate() {
  double worst = 0.0;
  for (int n : {2, 3}) {
    for (int m : {2, 4}) {
      const auto sim = scenario::multicycle_simulate(n, m, 0.2, 1.0, true);
      const auto est = analytic::f_qed_multicycle_estimate(n, m, 0.2, 1.0);
      fold(worst,
           (1.0 - est.fidelity) / (1.0 - sim.fidelity) - 1.0);
    }
  }
  return worst;
}

double check_multicycle_selection() {
  double worst = 0.0;
  for (int n : {2, 3}) {
    for (int m : {2, 4}) {
      const auto sim = scenario::multicycle_simulate(n, m, 0.2, 1.0, true);
      const auto est = analytic::f_qed_multicycle_estimate(n, m, 0.2, 1.0);
      fold(worst, sim.p_select / est.p_select - 1.0);
    }
  }
  return worst;
}

// Halving the step ceiling must not move any reported fidelity: the
// stepped propagator is an exact exponential on each constant-generator
// segment, so only roundoff can differ.
double check_dt_halving() {
  double worst = 0.0;
  const auto run = [](double dt, bool storage) {
    protocol::ProtocolConfig c;
    if (storage) {
      c.protocol = protocol::Protocol::fig7b;
      c.error = protocol::ErrorKind::damp_storage;
      c.storage_p = 0.3;
    } else {
      c.error = protocol::ErrorKind::r1x;
      c.theta2 = 0.6 * M_PI;
    }
    c.t1_ns = {500.0, 500.0};
    c.t2_ns = {500.0, 500.0};
    c.dt_ns = dt;
    return protocol::protocol_fidelities(c).report;
  };
  for (bool storage : {false, true}) {
    const auto coarse = run(1.0, storage);
    const auto fine = run(0.5, storage);
    fold(worst, coarse.f_ign - fine.f_ign);
    fold(worst, coarse.f_qed_weighted - fine.f_qed_weighted);
    fold(worst, coarse.p_select - fine.p_select);
    if (!storage) fold(worst, coarse.f_qec - fine.f_qec);
  }
  return worst;
}

struct CheckSpec {
  const char* name;
  double default_tolerance;
  double (*run)();
};

const CheckSpec kChecks[] = {
    {"closed_bloch_moments", 1e-12, check_closed_bloch_moments},
    {"analytic_vs_scenario", 1e-9, check_analytic_vs_scenario},
    {"six_state_linearity", 1e-9, check_six_state_linearity},
    {"two_point_selection", 1e-12, check_two_point_selection},
    {"scenario_vs_kraus_map", 1e-12, check_scenario_vs_kraus_map},
    {"conditional_reconstruction", 1e-12, check_conditional_reconstruction},
    {"selection_probability", 1e-12, check_selection_probability},
    {"monte_carlo_consistency", 5.0, check_monte_carlo_consistency},
    {"correction_grid_bound", 1e-9, check_correction_grid_bound},
    {"correction_vs_quadrature", 1e-9, check_correction_vs_quadrature},
    {"protocol_ideal_limits", 1e-9, check_protocol_ideal_limits},
    {"protocol_storage_oracle", 1e-6, check_protocol_storage_oracle},
    {"multicycle_estimate", 0.2, check_multicycle_estimate},
    {"multicycle_selection", 0.02, check_multicycle_selection},
    {"dt_halving", 1e-6, check_dt_halving},
};

const CheckSpec* find_check(const std::string& name) {
  for (const CheckSpec& spec : kChecks)
    if (name == spec.name) return &spec;
  return nullptr;
}

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

struct Profile {
  std::map<std::string, double> overrides;
  std::vector<std::string> selected;
};

Profile parse_profile(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw UsageError("verify: cannot open tolerance profile '" + path + "'");
  Profile profile;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw UsageError("profile line " + std::to_string(line_no) +
                       ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "checks") {
      std::stringstream parts(value);
      std::string item;
      while (std::getline(parts, item, ',')) {
        item = trim(item);
        if (!item.empty()) profile.selected.push_back(item);
      }
      continue;
    }
    if (key != "all" && find_check(key) == nullptr)
      throw UsageError("profile line " + std::to_string(line_no) +
                       ": unknown check '" + key + "'");
    char* end = nullptr;
    const double tol = std::strtod(value.c_str(), &end);
    if (end == value.c_str() || *end != '\0' || !(tol > 0.0))
      throw UsageError("profile line " + std::to_string(line_no) +
                       ": tolerance must be a positive number");
    profile.overrides[key] = tol;
  }
  return profile;
}

}  // namespace

std::vector<VerifyCheck> run_verify_checks(
    const std::map<std::string, double>& tolerance_overrides,
    const std::vector<std::string>& selected) {
  for (const auto& [key, tol] : tolerance_overrides) {
    (void)tol;
    if (key != "all" && find_check(key) == nullptr)
      throw UsageError("verify: unknown check '" + key + "'");
  }
  for (const std::string& name : selected)
    if (find_check(name) == nullptr)
      throw UsageError("verify: unknown check '" + name + "'");

  std::vector<VerifyCheck> results;
  for (const CheckSpec& spec : kChecks) {
    if (!selected.empty() &&
        std::find(selected.begin(), selected.end(), spec.name) ==
            selected.end())
      continue;
    VerifyCheck check;
    check.name = spec.name;
    check.tolerance = spec.default_tolerance;
    if (const auto it = tolerance_overrides.find("all");
        it != tolerance_overrides.end())
      check.tolerance = it->second;
    if (const auto it = tolerance_overrides.find(spec.name);
        it != tolerance_overrides.end())
      check.tolerance = it->second;
    check.deviation = spec.run();
    check.pass = check.deviation <= check.tolerance;
    results.push_back(std::move(check));
  }
  return results;
}

int run_verify(const std::string& profile_path, std::ostream& out,
               std::ostream& diag) {
  (void)diag;
  Profile profile;
  if (!profile_path.empty()) profile = parse_profile(profile_path);
  const auto results = run_verify_checks(profile.overrides, profile.selected);

  int passed = 0;
  double worst_failed = 0.0;
  std::string worst_name;
  for (const VerifyCheck& check : results) {
    char line[160];
    std::snprintf(line, sizeof line, "%s  %-28s deviation = %-14.6g tolerance = %g",
                  check.pass ? "PASS" : "FAIL", check.name.c_str(),
                  check.deviation, check.tolerance);
    out << line << "\n";
    if (check.pass) {
      ++passed;
    } else if (check.deviation >= worst_failed) {
      worst_failed = check.deviation;
      worst_name = check.name;
    }
  }
  out << "verify: " << passed << "/" << results.size() << " checks passed";
  if (passed != static_cast<int>(results.size()))
    out << "; worst deviation = " << worst_failed << " (" << worst_name
        << ")";
  out << "\n";
  return passed == static_cast<int>(results.size()) ? 0 : 1;
}

}  // namespace repqed::cli
