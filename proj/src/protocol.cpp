#include "repqed/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include <unsupported/Eigen/MatrixFunctions>

namespace repqed::protocol {

namespace {

constexpr double kPulseNs = 10.0;
constexpr double kIdleNs = 5.0;
constexpr double kCzNs = 40.0;

void require(bool cond, const char* msg) {
  if (!cond) throw std::invalid_argument(msg);
}

void validate_config(const ProtocolConfig& c) {
  require(std::isfinite(c.theta2), "protocol: theta2 must be finite");
  require(c.dt_ns > 0.0 && std::isfinite(c.dt_ns),
          "protocol: dt must be positive and finite");
  require(c.storage_p >= 0.0 && c.storage_p <= 1.0,
          "protocol: storage_p outside [0, 1]");
  if (c.error == ErrorKind::damp_storage) {
    require(c.protocol == Protocol::fig7b,
            "protocol: the storage mode requires the fig7b sequence");
  } else {
    require(c.storage_p == 0.0,
            "protocol: storage_p applies only to the storage mode");
  }
  for (int q = 0; q < 2; ++q) {
    // Constructing the noise record validates T1 > 0 and T2 <= 2 T1.
    (void)channels::QubitNoise::from_t1_t2(c.t1_ns[q], c.t2_ns[q]);
  }
}

struct ErrorSlot {
  qm::Axis axis;
  int qubit;  // 0 = main, 1 = ancilla
};

ErrorSlot error_slot(ErrorKind error) {
  switch (error) {
    case ErrorKind::r1x: return {qm::Axis::x, 0};
    case ErrorKind::r1y: return {qm::Axis::y, 0};
    case ErrorKind::r1z: return {qm::Axis::z, 0};
    case ErrorKind::r2x: return {qm::Axis::x, 1};
    case ErrorKind::r2y: return {qm::Axis::y, 1};
    case ErrorKind::r2z: return {qm::Axis::z, 1};
    case ErrorKind::damp_storage: break;
  }
  throw std::invalid_argument("protocol: storage mode has no rotation axis");
}

// Single-qubit preparation pulses taking |0> to the six tomography inputs.
struct PrepPulse {
  qm::Axis axis;
  double angle;  // 0 means no drive
};

PrepPulse prep_pulse(int j) {
  switch (j) {
    case 1: return {qm::Axis::x, 0.0};         // |0>
    case 2: return {qm::Axis::x, M_PI};        // |1>
    case 3: return {qm::Axis::y, M_PI / 2};    // |+>
    case 4: return {qm::Axis::y, -M_PI / 2};   // |->
    case 5: return {qm::Axis::x, -M_PI / 2};   // |+i>
    case 6: return {qm::Axis::x, M_PI / 2};    // |-i>
  }
  throw std::invalid_argument("protocol: initial state index outside {1..6}");
}

// Lindblad generator for a constant 4x4 Hamiltonian (rad/ns) plus per-qubit
// relaxation and pure dephasing, in the column-stacking convention
// vec(A rho B) = (B^T kron A) vec(rho).
qm::ComplexMatrix lindblad_generator(
    const qm::ComplexMatrix& h,
    const std::array<channels::QubitNoise, 2>& noise, bool dissipate) {
  const qm::ComplexMatrix id4 = qm::identity(4);
  qm::ComplexMatrix gen =
      qm::Complex(0, -1) *
      (qm::tensor(id4, h) - qm::tensor(h.transpose().eval(), id4));
  if (!dissipate) return gen;
  auto add_channel = [&](const qm::ComplexMatrix& k, double rate) {
    if (rate <= 0.0) return;
    const qm::ComplexMatrix kk = k.adjoint() * k;
    gen += rate * (qm::tensor(k.conjugate().eval(), k) -
                   0.5 * qm::tensor(id4, kk) -
                   0.5 * qm::tensor(kk.transpose().eval(), id4));
  };
  qm::ComplexMatrix lower = qm::ComplexMatrix::Zero(2, 2);
  lower(0, 1) = 1.0;
  for (int q = 0; q < 2; ++q) {
    const int targets[] = {q};
    if (std::isfinite(noise[q].t1))
      add_channel(qm::embed_gate(lower, targets, 2), 1.0 / noise[q].t1);
    if (std::isfinite(noise[q].t_phi))
      add_channel(qm::embed_gate(qm::pauli_z(), targets, 2),
                  0.5 / noise[q].t_phi);
  }
  return gen;
}

void check_step(const qm::ComplexMatrix& rho) {
  const double tr = rho.trace().real();
  if (std::abs(tr - 1.0) > 1e-10)
    throw std::runtime_error("protocol: trace drifted beyond 1e-10");
  if (qm::min_hermitian_eigenvalue(0.5 * (rho + rho.adjoint().eval())) <
      -1e-10)
    throw std::runtime_error("protocol: density matrix lost positivity");
}

}  // namespace

std::vector<GateEvent> build_schedule(const ProtocolConfig& config) {
  validate_config(config);
  std::vector<GateEvent> events;
  double t = 0.0;
  auto push = [&](GateEvent ev, double duration) {
    ev.start_ns = t;
    ev.duration_ns = duration;
    events.push_back(std::move(ev));
  };
  auto advance = [&](double duration) { t += duration; };
  auto idle = [&] {
    push({GateEvent::Kind::idle, 0, 0, {0, 1}}, kIdleNs);
    advance(kIdleNs);
  };

  // Encode: main-qubit preparation concurrent with the ancilla +Y/2.
  push({GateEvent::Kind::prepare_main, 0, 0, {0}}, kPulseNs);
  {
    GateEvent ev{GateEvent::Kind::rot_y_half, 0, 0, {1}};
    ev.sign = 1;
    push(ev, kPulseNs);
  }
  advance(kPulseNs);
  idle();
  push({GateEvent::Kind::cz, 0, 0, {0, 1}}, kCzNs);
  advance(kCzNs);
  idle();

  // Error slot: a bare 10 ns slot in fig4; a contiguous 30 ns sandwich of
  // basis-change Y/2 pulses around it in fig7a (main) and fig7b (ancilla).
  auto sandwich_pulse = [&](int qubit, int sign) {
    GateEvent ev{GateEvent::Kind::rot_y_half, 0, 0, {qubit}};
    ev.sign = sign;
    push(ev, kPulseNs);
    advance(kPulseNs);
  };
  auto middle_slot = [&] {
    if (config.error == ErrorKind::damp_storage) {
      push({GateEvent::Kind::idle, 0, 0, {0, 1}}, kPulseNs);
      GateEvent st{GateEvent::Kind::storage_damping, 0, 0, {0, 1}};
      st.start_ns = t + 0.5 * kPulseNs;
      st.duration_ns = 0.0;
      events.push_back(st);
      advance(kPulseNs);
      return;
    }
    const ErrorSlot slot = error_slot(config.error);
    GateEvent ev{GateEvent::Kind::error_rotation, 0, 0, {slot.qubit}};
    ev.axis = slot.axis;
    ev.angle = config.theta2;
    push(ev, kPulseNs);
    advance(kPulseNs);
  };
  switch (config.protocol) {
    case Protocol::fig4:
      middle_slot();
      break;
    case Protocol::fig7a:
      sandwich_pulse(0, +1);
      middle_slot();
      sandwich_pulse(0, -1);
      break;
    case Protocol::fig7b:
      sandwich_pulse(1, -1);
      middle_slot();
      sandwich_pulse(1, +1);
      break;
  }
  idle();

  // Decode: second CZ, then the ancilla -Y/2.
  push({GateEvent::Kind::cz, 0, 0, {0, 1}}, kCzNs);
  advance(kCzNs);
  idle();
  {
    GateEvent ev{GateEvent::Kind::rot_y_half, 0, 0, {1}};
    ev.sign = -1;
    push(ev, kPulseNs);
    advance(kPulseNs);
  }
  idle();

  const double expected = config.protocol == Protocol::fig4 ? 135.0 : 155.0;
  if (std::abs(t - expected) > 1e-9)
    throw std::logic_error("protocol: schedule duration mismatch");
  // Per-qubit non-overlap of timed events.
  for (int q = 0; q < 2; ++q) {
    std::vector<std::pair<double, double>> spans;
    for (const GateEvent& ev : events) {
      if (ev.duration_ns == 0.0) continue;
      if (std::find(ev.targets.begin(), ev.targets.end(), q) ==
          ev.targets.end())
        continue;
      spans.emplace_back(ev.start_ns, ev.start_ns + ev.duration_ns);
    }
    std::sort(spans.begin(), spans.end());
    for (std::size_t i = 1; i < spans.size(); ++i)
      if (spans[i].first < spans[i - 1].second - 1e-9)
        throw std::logic_error("protocol: overlapping events on one qubit");
  }
  return events;
}

std::pair<qm::ComplexMatrix, qm::ComplexMatrix> simulate(
    const ProtocolConfig& config, int initial_state_index) {
  validate_config(config);
  const PrepPulse prep = prep_pulse(initial_state_index);
  const std::vector<GateEvent> events = build_schedule(config);
  const std::array<channels::QubitNoise, 2> noise{
      channels::QubitNoise::from_t1_t2(config.t1_ns[0], config.t2_ns[0]),
      channels::QubitNoise::from_t1_t2(config.t1_ns[1], config.t2_ns[1])};

  std::set<double> cuts;
  for (const GateEvent& ev : events) {
    cuts.insert(ev.start_ns);
    cuts.insert(ev.start_ns + ev.duration_ns);
  }
  const std::vector<double> bounds(cuts.begin(), cuts.end());

  qm::ComplexMatrix rho = qm::ComplexMatrix::Zero(4, 4);
  rho(0, 0) = 1.0;

  auto apply_instant = [&](double at) {
    for (const GateEvent& ev : events) {
      if (ev.duration_ns != 0.0 ||
          ev.kind != GateEvent::Kind::storage_damping)
        continue;
      if (std::abs(ev.start_ns - at) > 1e-9) continue;
      for (int q : ev.targets)
        rho = channels::apply_damping(rho, config.storage_p, q);
      if (config.validate_steps) check_step(rho);
    }
  };

  for (std::size_t i = 0; i + 1 < bounds.size(); ++i) {
    apply_instant(bounds[i]);
    const double a = bounds[i], b = bounds[i + 1];
    const double span = b - a;
    if (span <= 0.0) continue;
    qm::ComplexMatrix h = qm::ComplexMatrix::Zero(4, 4);
    bool driven = false;
    for (const GateEvent& ev : events) {
      if (ev.duration_ns == 0.0) continue;
      if (ev.start_ns > a + 1e-9 || ev.start_ns + ev.duration_ns < b - 1e-9)
        continue;
      double angle = 0.0;
      qm::Axis axis = qm::Axis::x;
      switch (ev.kind) {
        case GateEvent::Kind::idle:
          continue;
        case GateEvent::Kind::prepare_main:
          angle = prep.angle;
          axis = prep.axis;
          break;
        case GateEvent::Kind::rot_y_half:
          angle = ev.sign * M_PI / 2;
          axis = qm::Axis::y;
          break;
        case GateEvent::Kind::error_rotation:
        case GateEvent::Kind::pi_correction:
          angle = ev.angle;
          axis = ev.axis;
          break;
        case GateEvent::Kind::cz: {
          driven = true;
          h(3, 3) += M_PI / ev.duration_ns;
          continue;
        }
        case GateEvent::Kind::storage_damping:
          continue;
      }
      driven = true;
      if (angle == 0.0) continue;
      const int targets[] = {ev.targets.at(0)};
      h += (0.5 * angle / ev.duration_ns) *
           qm::embed_gate(qm::pauli(axis), targets, 2);
    }
    const bool dissipate = config.decohere_during_gates || !driven;
    const qm::ComplexMatrix gen = lindblad_generator(h, noise, dissipate);
    const long long steps =
        std::max<long long>(1, std::llround(span / config.dt_ns));
    const double dt = span / static_cast<double>(steps);
    const qm::ComplexMatrix prop = (gen * dt).exp();
    for (long long s = 0; s < steps; ++s) {
      Eigen::Map<qm::ComplexVector> v(rho.data(), 16);
      v = (prop * v).eval();
      if (config.validate_steps) check_step(rho);
    }
  }
  apply_instant(bounds.back());

  qm::ComplexMatrix rho0(2, 2), rho1(2, 2);
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) {
      rho0(a, b) = rho(2 * a, 2 * b);
      rho1(a, b) = rho(2 * a + 1, 2 * b + 1);
    }
  return {rho0, rho1};
}

qm::ComplexMatrix correction_unitary(Protocol protocol, ErrorKind error) {
  if (error == ErrorKind::damp_storage)
    throw std::invalid_argument(
        "protocol: no unitary corrects the storage damping; only the "
        "post-selected mode applies");
  switch (protocol) {
    case Protocol::fig4:
      switch (error) {
        case ErrorKind::r1x: return qm::pauli_x();
        case ErrorKind::r1y: return qm::pauli_y();
        case ErrorKind::r2y: return qm::pauli_z();
        default: return qm::identity(2);
      }
    case Protocol::fig7a:
      switch (error) {
        case ErrorKind::r1z: return qm::pauli_x();
        case ErrorKind::r1y: return qm::pauli_y();
        case ErrorKind::r2y: return qm::pauli_z();
        default: return qm::identity(2);
      }
    case Protocol::fig7b:
      switch (error) {
        case ErrorKind::r1x: return qm::pauli_x();
        case ErrorKind::r1y: return qm::pauli_y();
        case ErrorKind::r2y: return qm::pauli_z();
        default: return qm::identity(2);
      }
  }
  throw std::invalid_argument("protocol: unknown protocol");
}

ProtocolResult protocol_fidelities(const ProtocolConfig& config) {
  validate_config(config);
  ProtocolResult res;
  const auto states = qm::six_states();
  const bool storage = config.error == ErrorKind::damp_storage;
  qm::ComplexMatrix corr;
  if (!storage) corr = correction_unitary(config.protocol, config.error);
  double f_ign = 0.0, qed_num = 0.0, qed_den = 0.0, f_qec = 0.0;
  for (int j = 1; j <= 6; ++j) {
    auto [rho0, rho1] = simulate(config, j);
    const int i = j - 1;
    const double tr0 = rho0.trace().real();
    const double tr1 = rho1.trace().real();
    if (std::abs(tr0 + tr1 - 1.0) > 1e-10)
      throw std::runtime_error("protocol: branch probabilities do not sum "
                               "to 1");
    const qm::PureState& psi = states[i];
    const double f0 = qm::state_fidelity(rho0, psi);
    const double f1 = qm::state_fidelity(rho1, psi);
    f_ign += (f0 + f1) / 6.0;
    qed_num += f0;
    qed_den += tr0;
    if (!storage) {
      const qm::ComplexMatrix fixed = corr * rho1 * corr.adjoint();
      f_qec += (f0 + qm::state_fidelity(fixed, psi)) / 6.0;
    }
    res.rho0[i] = std::move(rho0);
    res.rho1[i] = std::move(rho1);
    res.p0[i] = tr0;
    res.p1[i] = tr1;
  }
  res.report.f_ign = f_ign;
  res.report.f_qed_weighted = qed_num / qed_den;
  if (!storage) res.report.f_qec = f_qec;
  res.report.p_select = qed_den / 6.0;
  res.report.f_chi = analytic::f_chi_from_av(f_ign);
  return res;
}

std::vector<analytic::FidelityReport> sweep_theta(
    const ProtocolConfig& config, std::span<const double> theta2_grid) {
  require(config.error != ErrorKind::damp_storage,
          "sweep_theta: the storage mode has no rotation angle");
  std::vector<analytic::FidelityReport> out;
  out.reserve(theta2_grid.size());
  ProtocolConfig c = config;
  for (double theta2 : theta2_grid) {
    c.theta2 = theta2;
    out.push_back(protocol_fidelities(c).report);
  }
  return out;
}

std::vector<analytic::FidelityReport> sweep_storage(
    const ProtocolConfig& config, std::span<const double> p_grid) {
  require(config.error == ErrorKind::damp_storage,
          "sweep_storage: requires the fig7b storage mode");
  std::vector<analytic::FidelityReport> out;
  out.reserve(p_grid.size());
  ProtocolConfig c = config;
  for (double p : p_grid) {
    c.storage_p = p;
    out.push_back(protocol_fidelities(c).report);
  }
  return out;
}

}  // namespace repqed::protocol
