#include "repqed/figures.hpp"

#include <cmath>
#include <map>
#include <ostream>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "repqed/analytic.hpp"
#include "repqed/csv.hpp"
#include "repqed/parallel.hpp"
#include "repqed/protocol.hpp"
#include "repqed/scenario.hpp"
#include "repqed/verify.hpp"

namespace repqed::cli {

namespace {

std::vector<double> linspace(double lo, double hi, long long steps,
                             const char* what) {
  if (steps < 1) throw UsageError(std::string(what) + ": need >= 1 points");
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(steps));
  if (steps == 1) {
    out.push_back(lo);
    return out;
  }
  for (long long i = 0; i < steps; ++i)
    out.push_back(lo + (hi - lo) * static_cast<double>(i) /
                           static_cast<double>(steps - 1));
  return out;
}

int effective_jobs(const RunOptions& options) {
  if (options.jobs > 0) return options.jobs;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

scenario::BlochAverager make_averager(const ConfigView& view,
                                      const RunOptions& options) {
  const std::string kind = view.get_string("averager", "quadrature");
  if (kind == "quadrature")
    return scenario::BlochAverager::quadrature(
        static_cast<int>(view.get_int("nodes", 64)),
        static_cast<int>(view.get_int("phi_nodes", 16)));
  if (kind == "six_state") return scenario::BlochAverager::six_state();
  if (kind == "monte_carlo") {
    const long long samples = view.get_int("samples", 100000);
    std::uint64_t seed =
        static_cast<std::uint64_t>(view.get_int("seed", 12345));
    if (options.seed) seed = *options.seed;
    return scenario::BlochAverager::monte_carlo(samples, seed);
  }
  throw UsageError("averager: expected quadrature, six_state or monte_carlo");
}

std::vector<int> int_list(const ConfigView& view, const std::string& key,
                          std::vector<double> def) {
  std::vector<int> out;
  for (double v : view.get_double_list(key, std::move(def))) {
    const int i = static_cast<int>(std::llround(v));
    if (static_cast<double>(i) != v)
      throw UsageError("key '" + key + "': expected integers");
    out.push_back(i);
  }
  return out;
}

std::vector<std::string> fidelity_cells(int n, double p,
                                        const analytic::FidelityReport& r) {
  return {std::to_string(n),          format_g12(p),
          format_g12(r.f_1q),         format_g12(r.f_ign),
          format_g12(r.f_qed),        format_g12(r.f_qed_weighted),
          format_g12(r.f_qec)};
}

const std::vector<std::string>& fidelity_header() {
  static const std::vector<std::string> header{
      "n",           "p",        "f_1q", "f_ign", "f_qed_uniform",
      "f_qed_weighted", "f_qec"};
  return header;
}

CsvTable run_analytic(const ConfigView& view) {
  const int n = static_cast<int>(view.get_int("n", 2));
  const double p_min = view.get_double("p_min", 0.0);
  const double p_max = view.get_double("p_max", 1.0);
  const long long steps = view.get_int("p_steps", 201);
  if (!(p_min >= 0.0 && p_max <= 1.0 && p_min <= p_max))
    throw UsageError("analytic: need 0 <= p_min <= p_max <= 1");
  view.finish();
  CsvTable table(fidelity_header());
  for (double p : linspace(p_min, p_max, steps, "p_steps")) {
    analytic::FidelityReport r;
    r.f_1q = analytic::f_av_1q(p);
    r.f_ign = analytic::f_ign_nq(n, p);
    r.f_qed = analytic::f_qed_nq(n, p);
    r.f_qed_weighted = analytic::f_qed_nq_weighted(n, p);
    r.f_qec = analytic::f_qec_nq(n, p);
    table.add_row(fidelity_cells(n, p, r));
  }
  return table;
}

CsvTable run_nqubit(const ConfigView& view, const RunOptions& options) {
  const std::vector<int> n_list = int_list(view, "n_list", {2, 3, 4});
  const double p_min = view.get_double("p_min", 0.0);
  const double p_max = view.get_double("p_max", 1.0);
  const long long steps = view.get_int("p_steps", 201);
  if (!(p_min >= 0.0 && p_max <= 1.0 && p_min <= p_max))
    throw UsageError("nqubit: need 0 <= p_min <= p_max <= 1");
  const scenario::BlochAverager avg = make_averager(view, options);
  view.finish();
  const std::vector<double> grid = linspace(p_min, p_max, steps, "p_steps");
  struct Point {
    int n;
    double p;
    analytic::FidelityReport report;
  };
  std::vector<Point> points;
  for (int n : n_list)
    for (double p : grid) points.push_back({n, p, {}});
  parallel_for(points.size(), effective_jobs(options), [&](std::size_t i) {
    Point& pt = points[i];
    const std::vector<double> p_list(static_cast<std::size_t>(pt.n), pt.p);
    pt.report = scenario::fidelity_sweep(pt.n, p_list,
                                         scenario::Mode::ignore, avg);
  });
  CsvTable table(fidelity_header());
  for (const Point& pt : points)
    table.add_row(fidelity_cells(pt.n, pt.p, pt.report));
  return table;
}

CsvTable run_multicycle(const ConfigView& view, const RunOptions& options) {
  const int n = static_cast<int>(view.get_int("n", 2));
  const std::vector<int> m_list = int_list(view, "m_list", {2, 4, 8});
  double ratio = view.get_double("t_over_t1", 0.2);
  if (view.has("t") || view.has("t1")) {
    const double t = view.get_time_seconds("t", -1.0);
    const double t1 = view.get_time_seconds("t1", -1.0);
    if (t < 0.0 || t1 <= 0.0)
      throw UsageError("multicycle: give both t and t1 (in ns)");
    ratio = t / t1;
  }
  const bool pi_pulses = view.get_bool("pi_pulses", true);
  const std::string placement_name =
      view.get_string("placement", "encoded");
  scenario::PiPulsePlacement placement;
  if (placement_name == "encoded")
    placement = scenario::PiPulsePlacement::encoded;
  else if (placement_name == "decoded")
    placement = scenario::PiPulsePlacement::decoded;
  else
    throw UsageError("placement: expected encoded or decoded");
  const scenario::BlochAverager avg = make_averager(view, options);
  view.finish();
  CsvTable table({"n", "m", "t_over_t1", "fidelity", "infidelity",
                  "est_fidelity", "p_select", "p_select_est"});
  std::vector<scenario::MulticycleResult> results(m_list.size());
  parallel_for(m_list.size(), effective_jobs(options), [&](std::size_t i) {
    results[i] = scenario::multicycle_simulate(n, m_list[i], ratio, 1.0,
                                               pi_pulses, placement, avg);
  });
  for (std::size_t i = 0; i < m_list.size(); ++i) {
    const int m = m_list[i];
    double est_f = analytic::kUnset, est_p = analytic::kUnset;
    if (m >= 2 && m % 2 == 0) {
      const auto est = analytic::f_qed_multicycle_estimate(n, m, ratio, 1.0);
      est_f = est.fidelity;
      est_p = est.p_select;
    }
    table.add_row({std::to_string(n), std::to_string(m), format_g12(ratio),
                   format_g12(results[i].fidelity),
                   format_g12(1.0 - results[i].fidelity), format_g12(est_f),
                   format_g12(results[i].p_select), format_g12(est_p)});
  }
  return table;
}

protocol::Protocol parse_protocol(const std::string& name) {
  if (name == "fig4") return protocol::Protocol::fig4;
  if (name == "fig7a") return protocol::Protocol::fig7a;
  if (name == "fig7b") return protocol::Protocol::fig7b;
  throw UsageError("protocol: expected fig4, fig7a or fig7b");
}

protocol::ErrorKind parse_error_kind(const std::string& name) {
  static const std::map<std::string, protocol::ErrorKind> kinds{
      {"r1x", protocol::ErrorKind::r1x}, {"r1y", protocol::ErrorKind::r1y},
      {"r1z", protocol::ErrorKind::r1z}, {"r2x", protocol::ErrorKind::r2x},
      {"r2y", protocol::ErrorKind::r2y}, {"r2z", protocol::ErrorKind::r2z}};
  const auto it = kinds.find(name);
  if (it == kinds.end())
    throw UsageError("error: expected one of r1x, r1y, r1z, r2x, r2y, r2z");
  return it->second;
}

CsvTable run_protocol(const ConfigView& view, const RunOptions& options) {
  const protocol::Protocol proto =
      parse_protocol(view.get_string("protocol", "fig4"));
  std::vector<protocol::ErrorKind> errors;
  std::vector<std::string> error_names =
      view.get_string_list("error", {"r1x"});
  for (const std::string& name : error_names)
    errors.push_back(parse_error_kind(name));
  const std::vector<double> t1_s =
      view.get_time_seconds_list("t1", {500e-9});
  const std::vector<double> t2_s = view.get_time_seconds_list("t2", t1_s);
  if (t2_s.size() != t1_s.size())
    throw UsageError("protocol: t2 list must pair with t1 list");
  const long long theta_steps = view.get_int("theta_steps", 33);
  const double dt_ns = view.get_time_seconds("dt", 1e-9) * 1e9;
  const bool decohere = view.get_bool("decohere_during_gates", true);
  view.finish();
  const std::vector<double> theta2_grid =
      linspace(0.0, M_PI, theta_steps, "theta_steps");

  struct Point {
    std::string error_name;
    protocol::ErrorKind error;
    double t1_ns, t2_ns, theta2;
    analytic::FidelityReport report;
  };
  std::vector<Point> points;
  for (std::size_t e = 0; e < errors.size(); ++e)
    for (std::size_t k = 0; k < t1_s.size(); ++k)
      for (double theta2 : theta2_grid)
        points.push_back({error_names[e], errors[e], t1_s[k] * 1e9,
                          t2_s[k] * 1e9, theta2, {}});
  parallel_for(points.size(), effective_jobs(options), [&](std::size_t i) {
    Point& pt = points[i];
    protocol::ProtocolConfig c;
    c.protocol = proto;
    c.error = pt.error;
    c.theta2 = pt.theta2;
    c.t1_ns = {pt.t1_ns, pt.t1_ns};
    c.t2_ns = {pt.t2_ns, pt.t2_ns};
    c.dt_ns = dt_ns;
    c.decohere_during_gates = decohere;
    pt.report = protocol::protocol_fidelities(c).report;
  });
  CsvTable table({"two_theta_over_pi", "t1_ns", "error_kind", "f_ign",
                  "f_qed_weighted", "f_qec"});
  for (const Point& pt : points)
    table.add_row({format_g12(pt.theta2 / M_PI), format_g12(pt.t1_ns),
                   pt.error_name, format_g12(pt.report.f_ign),
                   format_g12(pt.report.f_qed_weighted),
                   format_g12(pt.report.f_qec)});
  return table;
}

CsvTable run_storage(const ConfigView& view, const RunOptions& options) {
  const std::vector<double> t1_s =
      view.get_time_seconds_list("t1", {300e-9, 500e-9, 700e-9});
  const std::vector<double> t2_s = view.get_time_seconds_list("t2", t1_s);
  if (t2_s.size() != t1_s.size())
    throw UsageError("storage: t2 list must pair with t1 list");
  const double p_min = view.get_double("p_min", 0.0);
  const double p_max = view.get_double("p_max", 0.7);
  const long long steps = view.get_int("p_steps", 36);
  if (!(p_min >= 0.0 && p_max <= 1.0 && p_min <= p_max))
    throw UsageError("storage: need 0 <= p_min <= p_max <= 1");
  const double dt_ns = view.get_time_seconds("dt", 1e-9) * 1e9;
  const bool decohere = view.get_bool("decohere_during_gates", true);
  view.finish();
  const std::vector<double> grid = linspace(p_min, p_max, steps, "p_steps");

  struct Point {
    double t1_ns, t2_ns, p;
    analytic::FidelityReport report;
  };
  std::vector<Point> points;
  for (std::size_t k = 0; k < t1_s.size(); ++k)
    for (double p : grid)
      points.push_back({t1_s[k] * 1e9, t2_s[k] * 1e9, p, {}});
  parallel_for(points.size(), effective_jobs(options), [&](std::size_t i) {
    Point& pt = points[i];
    protocol::ProtocolConfig c;
    c.protocol = protocol::Protocol::fig7b;
    c.error = protocol::ErrorKind::damp_storage;
    c.storage_p = pt.p;
    c.t1_ns = {pt.t1_ns, pt.t1_ns};
    c.t2_ns = {pt.t2_ns, pt.t2_ns};
    c.dt_ns = dt_ns;
    c.decohere_during_gates = decohere;
    pt.report = protocol::protocol_fidelities(c).report;
  });
  CsvTable table({"p_storage", "t1_ns", "f_ign", "f_qed_weighted"});
  for (const Point& pt : points)
    table.add_row({format_g12(pt.p), format_g12(pt.t1_ns),
                   format_g12(pt.report.f_ign),
                   format_g12(pt.report.f_qed_weighted)});
  return table;
}

}  // namespace

int run_command(const SweepConfig& config, const RunOptions& options,
                std::ostream& out, std::ostream& diag) {
  (void)diag;
  if (config.command == "verify") {
    // A sweep config cannot carry verification tolerances; the verify
    // command takes a profile file instead.
    throw UsageError("verify: pass the tolerance profile via --config to "
                     "the verify command, not a sweep config");
  }
  ConfigView view(config);
  CsvTable table = [&] {
    if (config.command == "analytic") return run_analytic(view);
    if (config.command == "nqubit") return run_nqubit(view, options);
    if (config.command == "multicycle") return run_multicycle(view, options);
    if (config.command == "protocol") return run_protocol(view, options);
    if (config.command == "storage") return run_storage(view, options);
    throw UsageError("unknown command '" + config.command + "'");
  }();
  std::string hashed = config.source_text;
  if (options.seed)
    hashed += "\n--seed " + std::to_string(*options.seed) + "\n";
  write_table(table, options.out_path, fnv1a64(hashed), out);
  return 0;
}

int run_figure(const std::string& fig_id, const RunOptions& options,
               std::ostream& out, std::ostream& diag) {
  static const std::map<std::string, std::string> presets{
      {"fig2", "[analytic]\nn = 2\np_min = 0\np_max = 1\np_steps = 201\n"},
      {"fig3a",
       "[nqubit]\nn_list = 2,3,4\np_min = 0\np_max = 1\np_steps = 201\n"
       "nodes = 64\n"},
      {"fig3b",
       "[nqubit]\nn_list = 2,3,4\np_min = 0\np_max = 1\np_steps = 201\n"
       "nodes = 64\n"},
      {"fig5",
       "[protocol]\nprotocol = fig4\nerror = r1x\nt1 = 300,500,700\n"
       "theta_steps = 33\ndt = 1\n"},
      {"fig6",
       "[protocol]\nprotocol = fig4\nerror = r1x,r1y,r2y,r2z\nt1 = 500\n"
       "theta_steps = 33\ndt = 1\n"},
      {"fig8",
       "[storage]\nt1 = 300,500,700\np_min = 0\np_max = 0.7\n"
       "p_steps = 36\ndt = 1\n"}};
  const auto it = presets.find(fig_id);
  if (it == presets.end())
    throw UsageError("unknown figure id '" + fig_id +
                     "' (expected fig2, fig3a, fig3b, fig5, fig6 or fig8)");
  const SweepConfig config = parse_config(it->second, diag);
  RunOptions opts = options;
  if (opts.out_path.empty()) opts.out_path = fig_id + ".csv";
  return run_command(config, opts, out, diag);
}

namespace {

const char* kUsage =
    "usage: repqed <analytic|nqubit|multicycle|protocol|storage> "
    "--config <path> [--out <path>] [--jobs N] [--seed S]\n"
    "       repqed figure <fig2|fig3a|fig3b|fig5|fig6|fig8> "
    "[--out <path>] [--jobs N]\n"
    "       repqed verify [--config <tolerance profile>]\n";

}  // namespace

int run_main(int argc, const char* const* argv, std::ostream& out,
             std::ostream& diag) {
  try {
    std::vector<std::string> args(argv + 1, argv + argc);
    if (args.empty()) {
      diag << kUsage;
      return 2;
    }
    if (args[0] == "--help" || args[0] == "-h" || args[0] == "help") {
      out << kUsage;
      return 0;
    }
    const std::string command = args[0];
    std::string config_path, fig_id;
    RunOptions options;
    std::size_t i = 1;
    if (command == "figure") {
      if (args.size() < 2)
        throw UsageError("figure: missing figure id");
      fig_id = args[1];
      i = 2;
    }
    for (; i < args.size(); ++i) {
      const std::string& arg = args[i];
      auto value = [&]() -> const std::string& {
        if (i + 1 >= args.size())
          throw UsageError("flag '" + arg + "' needs a value");
        return args[++i];
      };
      if (arg == "--config") config_path = value();
      else if (arg == "--out") options.out_path = value();
      else if (arg == "--jobs") options.jobs = std::stoi(value());
      else if (arg == "--seed")
        options.seed = static_cast<std::uint64_t>(std::stoull(value()));
      else throw UsageError("unknown flag '" + arg + "'");
    }
    if (command == "figure") return run_figure(fig_id, options, out, diag);
    if (command == "verify") return run_verify(config_path, out, diag);
    static const std::set<std::string> sweeps{"analytic", "nqubit",
                                             "multicycle", "protocol",
                                             "storage"};
    if (!sweeps.count(command))
      throw UsageError("unknown command '" + command + "'");
    if (config_path.empty())
      throw UsageError(command + ": --config <path> is required");
    const SweepConfig config = load_config(config_path, diag);
    if (config.command != command)
      throw UsageError("config file names command '" + config.command +
                       "' but '" + command + "' was requested");
    return run_command(config, options, out, diag);
  } catch (const IoError& e) {
    diag << "error: " << e.what() << "\n";
    return 3;
  } catch (const UsageError& e) {
    diag << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    diag << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace repqed::cli
