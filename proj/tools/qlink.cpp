#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "qlink/analytic.hpp"
#include "qlink/dde.hpp"
#include "qlink/export.hpp"
#include "qlink/protocols.hpp"
#include "qlink/sweep.hpp"
#include "qlink/ww.hpp"

namespace fs = std::filesystem;
using namespace qlink;

namespace {

constexpr const char* kOutputDirEnv = "QLINK_OUTPUT_DIR";

struct Common {
  std::string output;
  std::string format = "csv";
};

/// Destination stream: --output, else $QLINK_OUTPUT_DIR/<name>.<format>, else stdout.
class Sink {
 public:
  Sink(const Common& c, const std::string& name) {
    if (!c.output.empty()) {
      path_ = c.output;
    } else if (const char* dir = std::getenv(kOutputDirEnv); dir != nullptr && *dir != '\0') {
      path_ = fs::path(dir) / (name + "." + c.format);
    }
    if (path_) {
      if (path_->has_parent_path()) fs::create_directories(path_->parent_path());
      file_ = std::make_unique<std::ofstream>(*path_);
      if (!*file_) throw std::runtime_error("cannot open " + path_->string());
    }
  }
  std::ostream& out() { return file_ ? *file_ : std::cout; }
  /// Sibling file for a secondary table; nullopt when writing to stdout.
  std::optional<fs::path> sibling(const std::string& suffix) const {
    if (!path_) return std::nullopt;
    return path_->parent_path() / (path_->stem().string() + suffix);
  }

 private:
  std::optional<fs::path> path_;
  std::unique_ptr<std::ofstream> file_;
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--output,-o", c.output, "Output file (default: $QLINK_OUTPUT_DIR/<command>.<format>, else stdout)");
  app->add_option("--format", c.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
}

Metadata meta_of(const std::string& command, const std::vector<std::pair<std::string, double>>& params) {
  Metadata m{{"command", command}, {"tau", "1"}};
  for (const auto& [k, v] : params) m.emplace_back(k, format_number(v));
  return m;
}

// ---------------------------------------------------------------- simulate

struct SimulateConfig {
  Common io;
  double gamma_tau = 0.1;
  double delta_fsr = 50.0;
  double t_end = 12.0;
  int steps_per_tau = 200;
  bool ww = false;
  int n_modes = 401;
};

int cmd_simulate(const SimulateConfig& c) {
  const LinkParams link = LinkParams::make(c.gamma_tau, 1.0, c.delta_fsr * kPi);
  const PulseProfile pulse = PulseProfile::constant(link.gamma0(), 0.0, c.t_end);
  std::optional<ModeSet> modes;
  int m = c.steps_per_tau;
  if (c.ww) {
    modes = build_modes(link, c.n_modes, LadderPolicy::ClipAtCutoff);
    m = std::max(m, min_steps_per_tau(link, *modes));
  }
  const TimeGrid grid = TimeGrid::make(1.0, m, c.t_end);
  const Trajectory traj = evolve_single(link, pulse, 1.0, grid, two_ended_round_trip(link));
  std::optional<WWResult> ww;
  if (c.ww) ww = evolve_ww_single(link, *modes, pulse, 1.0, grid);

  Sink sink(c.io, "simulate");
  auto meta = meta_of("simulate", {{"gamma_tau", c.gamma_tau},
                                   {"delta_fsr", c.delta_fsr},
                                   {"t_end", c.t_end},
                                   {"steps_per_tau", m}});
  if (c.ww) meta.emplace_back("n_modes", std::to_string(modes->size()));
  if (c.io.format == "csv") {
    write_trajectory_csv(sink.out(), traj, meta, ww ? &*ww : nullptr);
    return 0;
  }
  nlohmann::json j{{"gamma_tau", c.gamma_tau}, {"delta_fsr", c.delta_fsr}, {"steps_per_tau", m}};
  std::vector<double> t(traj.size()), pop(traj.size());
  for (std::size_t i = 0; i < traj.size(); ++i) {
    t[i] = traj.time(i);
    pop[i] = traj.population(0, i);
  }
  j["t"] = t;
  j["pop"] = pop;
  if (ww) {
    for (std::size_t i = 0; i < traj.size(); ++i) pop[i] = ww->traj.population(0, i);
    j["ww_pop"] = pop;
    j["ww_n_photon"] = ww->photons;
  }
  const auto kinks = derivative_kinks(traj, link);
  auto& jk = j["kinks"] = nlohmann::json::array();
  for (const auto& k : kinks) {
    jk.push_back({{"order", k.order}, {"t", k.t}, {"jump", {k.jump.real(), k.jump.imag()}}, {"pop_jump", k.pop_jump}});
  }
  sink.out() << j.dump(2) << '\n';
  return 0;
}

// ---------------------------------------------------------------- spectrum

struct SpectrumConfig {
  Common io;
  double gamma_tau = 0.15;
  double delta_fsr = 50.0;
  bool sweep = false;
  int n_delta = 201;
  double omega_span = 1.0;
  int n_omega = 801;
  double broadening = 0.0;
};

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> v(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = n == 1 ? a : a + (b - a) * i / (n - 1);
  return v;
}

int cmd_spectrum(const SpectrumConfig& c) {
  if (c.n_omega < 2 || c.n_delta < 1) throw std::invalid_argument("spectrum: need n_omega >= 2 and n_delta >= 1");
  const LinkParams link = LinkParams::make(c.gamma_tau, 1.0, c.delta_fsr * kPi);
  const double fsr = link.fsr();
  const double d0 = link.delta();
  const auto omega = linspace(d0 - c.omega_span * fsr, d0 + c.omega_span * fsr, c.n_omega);
  const SpectrumOptions opts{c.broadening};
  Sink sink(c.io, "spectrum");
  auto meta = meta_of("spectrum", {{"gamma_tau", c.gamma_tau},
                                   {"delta_fsr", c.delta_fsr},
                                   {"omega_span_fsr", c.omega_span},
                                   {"broadening", c.broadening}});
  if (!c.sweep) {
    const SpectralResult r = output_spectrum(link, omega, opts);
    if (c.io.format == "csv") {
      write_spectrum_csv(sink.out(), r, meta);
    } else {
      sink.out() << nlohmann::json{{"omega", r.omega}, {"power", r.power}, {"eigenfrequencies", r.eigenfrequencies}}
                        .dump(2)
                 << '\n';
    }
    return 0;
  }
  const auto deltas = linspace(d0 - 0.5 * fsr, d0 + 0.5 * fsr, c.n_delta);
  const SpectrumMap map = spectrum_map(link, deltas, omega, opts);
  if (c.io.format == "csv") {
    write_heatmap_csv(sink.out(), map, meta);
    if (auto p = sink.sibling("_eigen.csv")) {
      std::ofstream eo(*p);
      write_eigen_csv(eo, map, meta);
    } else {
      std::cerr << "note: eigenfrequency overlay is written only with --output or $" << kOutputDirEnv << '\n';
    }
    return 0;
  }
  sink.out() << nlohmann::json{{"delta", map.deltas}, {"omega", map.omega}, {"power", map.power}, {"eigen", map.eigen}}
                    .dump(2)
             << '\n';
  return 0;
}

// ---------------------------------------------------------------- protocol

struct ProtocolConfig {
  Common io;
  std::string kind;
  double gamma_tau = 0.1;
  std::optional<double> t;
  bool optimize = false;
  bool scan_t = false;
  double t_min = 0.0;
  double t_max = 0.0;
  int n_t = 201;
  double kappa_tau = 0.0;
  double delta_fsr = 50.0;
  int steps_per_tau = 200;
};

int cmd_protocol(const ProtocolConfig& c) {
  const ProtocolKind kind = protocol_from_string(c.kind);
  if (kind == ProtocolKind::Shaped) throw std::invalid_argument("protocol: shaped pulses need a wavepacket file");
  const LinkParams link = LinkParams::make(c.gamma_tau, 1.0, c.delta_fsr * kPi);
  SweepOptions so;
  so.steps_per_tau = c.steps_per_tau;
  so.delta_fsr = c.delta_fsr;
  so.kappa_tau = c.kappa_tau;
  RunOptions ro{c.steps_per_tau, c.kappa_tau};
  Sink sink(c.io, "protocol");
  auto meta = meta_of("protocol", {{"gamma_tau", c.gamma_tau},
                                   {"delta_fsr", c.delta_fsr},
                                   {"kappa_tau", c.kappa_tau},
                                   {"steps_per_tau", c.steps_per_tau}});
  meta.emplace_back("protocol", to_string(kind));

  if (c.scan_t) {
    const double t_rule = kind == ProtocolKind::Swap ? kPi / std::sqrt(c.gamma_tau) : resource_rule_duration(c.gamma_tau);
    const double lo = c.t_min > 0.0 ? c.t_min : (kind == ProtocolKind::Czkm ? 1.0 + 1e-3 : 0.1 * t_rule);
    const double hi = c.t_max > 0.0 ? c.t_max : 2.0 * t_rule;
    nlohmann::json rows = nlohmann::json::array();
    std::ostringstream csv;
    csv << "T,infidelity,photon_integral,loss\n";
    for (double T : linspace(lo, hi, c.n_t)) {
      const ProtocolRun r = run_protocol({kind, c.gamma_tau, T}, link, ro);
      csv << format_number(T) << ',' << format_number(r.infidelity) << ',' << format_number(r.photon_integral) << ','
          << format_number(r.loss) << '\n';
      rows.push_back(to_json(r));
    }
    if (c.io.format == "csv") {
      meta.emplace_back("reference_T", format_number(t_rule));
      sink.out() << "# qlink " << kVersion << '\n';
      for (const auto& [k, v] : meta) sink.out() << "# " << k << ": " << v << '\n';
      sink.out() << csv.str();
    } else {
      sink.out() << nlohmann::json{{"reference_T", t_rule}, {"runs", rows}}.dump(2) << '\n';
    }
    return 0;
  }

  double T = 0.0;
  std::optional<ScanRecord> opt;
  if (c.optimize) {
    switch (kind) {
      case ProtocolKind::Swap: opt = optimal_swap(c.gamma_tau, so); break;
      case ProtocolKind::Stirap: opt = optimal_stirap(c.gamma_tau, so); break;
      default: opt = czkm_at(c.gamma_tau, resource_rule_duration(c.gamma_tau), so); break;
    }
    T = opt->t_opt;
  } else if (c.t) {
    T = *c.t;
  } else {
    throw std::invalid_argument("protocol: give --t or --optimize");
  }
  const ProtocolResult res = simulate_protocol({kind, c.gamma_tau, T}, link, ro);
  std::optional<DarkBrightState> db;
  if (kind == ProtocolKind::Czkm) db = dark_bright(res.traj, res.pulses, link.with_gamma0(c.gamma_tau));

  if (c.io.format == "csv") {
    meta.emplace_back("T", format_number(T));
    meta.emplace_back("F", format_number(res.run.fidelity));
    meta.emplace_back("epsilon", format_number(res.run.infidelity));
    meta.emplace_back("epsilon_loss", format_number(res.run.loss));
    meta.emplace_back("photon_integral", format_number(res.run.photon_integral));
    write_trajectory_csv(sink.out(), res.traj, meta);
    if (db) {
      if (auto p = sink.sibling("_dark_bright.csv")) {
        std::ofstream o(*p);
        write_dark_bright_csv(o, *db, meta);
      }
    }
    return opt && !opt->converged ? 1 : 0;
  }
  nlohmann::json j = to_json(res.run);
  if (opt) j["optimizer"] = to_json(*opt);
  if (db) j["dark_bright"] = to_json(*db);
  sink.out() << j.dump(2) << '\n';
  return opt && !opt->converged ? 1 : 0;
}

// ---------------------------------------------------------------- scan

struct ScanConfig {
  Common io;
  std::vector<double> grid{0.01, 0.02, 0.05, 0.1, 0.2, 0.3, 0.5, 0.7, 1.0, 1.2, 1.4, 1.44, 1.6, 1.8, 2.0};
  std::vector<std::string> protocols{"swap", "stirap", "czkm"};
  bool loss = false;
  double kappa_tau = 0.01;
  bool ww = false;
  double delta_fsr = 50.0;
  int n_modes = 201;
  bool no_lamb = false;
  int steps_per_tau = 200;
};

int cmd_scan(const ScanConfig& c) {
  std::vector<ProtocolKind> kinds;
  for (const auto& p : c.protocols) kinds.push_back(protocol_from_string(p));
  SweepOptions so;
  so.steps_per_tau = c.steps_per_tau;
  so.kappa_tau = c.loss ? c.kappa_tau : 0.0;
  WWScanOptions wo{c.n_modes, !c.no_lamb};

  std::vector<ScanRecord> records;
  bool failed = false;
  for (double g : c.grid) {
    for (ProtocolKind k : kinds) {
      try {
        const double one[] = {g};
        const ProtocolKind kk[] = {k};
        ScanRecord r = scan_protocols(one, kk, so).front();
        if (c.ww) {
          SweepOptions wso = so;
          wso.delta_fsr = c.delta_fsr;
          r = ww_evaluate(r, wso, wo);
        }
        failed = failed || !r.converged;
        records.push_back(std::move(r));
      } catch (const std::exception& e) {
        ScanRecord r;
        r.protocol = k;
        r.gamma0_tau = g;
        r.t_opt = std::numeric_limits<double>::quiet_NaN();
        r.infidelity = std::numeric_limits<double>::quiet_NaN();
        r.converged = false;
        r.diagnostic = std::string("error: ") + e.what();
        records.push_back(std::move(r));
        failed = true;
      }
    }
  }

  nlohmann::json summary{{"model", c.ww ? "ww" : "dde"}, {"grid", c.grid}};
  if (c.ww) summary["delta_fsr"] = c.delta_fsr;
  if (c.loss) summary["kappa_tau"] = c.kappa_tau;
  std::vector<ScanRecord> ok;
  for (const auto& r : records) {
    if (std::isfinite(r.infidelity)) ok.push_back(r);
  }
  auto& fits = summary["fits"] = nlohmann::json::object();
  for (ProtocolKind k : kinds) {
    auto& f = fits[to_string(k)] = nlohmann::json::object();
    try {
      f["infidelity_vs_gamma_tau"] = to_json(fit_infidelity(ok, k));
    } catch (const std::exception& e) {
      f["infidelity_vs_gamma_tau"] = std::string("unavailable: ") + e.what();
    }
    if (c.loss) {
      try {
        f["loss_vs_T"] = to_json(fit_loss(ok, k));
      } catch (const std::exception& e) {
        f["loss_vs_T"] = std::string("unavailable: ") + e.what();
      }
    }
  }
  const bool both = std::find(kinds.begin(), kinds.end(), ProtocolKind::Stirap) != kinds.end() &&
                    std::find(kinds.begin(), kinds.end(), ProtocolKind::Czkm) != kinds.end();
  if (both && !c.ww) {
    const CrossoverReport cr = crossover_scan(c.grid, so);
    summary["crossover_equal_T"] = {{"gamma_tau", std::isfinite(cr.crossover) ? nlohmann::json(cr.crossover) : nlohmann::json()},
                                    {"clean_split", cr.clean_split}};
  }

  Sink sink(c.io, "scan");
  auto meta = meta_of("scan", {{"kappa_tau", so.kappa_tau}, {"steps_per_tau", c.steps_per_tau}});
  meta.emplace_back("model", c.ww ? "ww" : "dde");
  if (c.ww) {
    meta.emplace_back("delta_fsr", format_number(c.delta_fsr));
    meta.emplace_back("n_modes", std::to_string(c.n_modes));
    meta.emplace_back("lamb_correction", c.no_lamb ? "off" : "on");
  }
  if (c.io.format == "csv") {
    write_scan_csv(sink.out(), records, meta);
    if (auto p = sink.sibling("_summary.json")) {
      std::ofstream o(*p);
      o << summary.dump(2) << '\n';
    } else {
      std::cerr << summary.dump(2) << '\n';
    }
  } else {
    auto& rows = summary["records"] = nlohmann::json::array();
    for (const auto& r : records) rows.push_back(to_json(r));
    sink.out() << summary.dump(2) << '\n';
  }
  return failed ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qlink: emitters on a short quantum link"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kVersion));

  SimulateConfig sim;
  auto* s = app.add_subcommand("simulate", "Single-emitter dynamics (DDE, optional multimode overlay)");
  add_common(s, sim.io);
  s->add_option("--gamma-tau", sim.gamma_tau, "gamma tau")->check(CLI::NonNegativeNumber);
  s->add_option("--delta-fsr", sim.delta_fsr, "Emitter frequency in units of the FSR");
  s->add_option("--t-end", sim.t_end, "Final time in units of tau")->check(CLI::NonNegativeNumber);
  s->add_option("--steps-per-tau", sim.steps_per_tau, "RK4 steps per traversal")->check(CLI::PositiveNumber);
  s->add_flag("--ww", sim.ww, "Overlay the multimode Wigner-Weisskopf solution");
  s->add_option("--n-modes", sim.n_modes, "Modes kept in the multimode model (odd)");

  SpectrumConfig spc;
  auto* sp = app.add_subcommand("spectrum", "Output power spectrum and eigenfrequencies");
  add_common(sp, spc.io);
  sp->add_option("--gamma-tau", spc.gamma_tau, "gamma tau")->check(CLI::NonNegativeNumber);
  sp->add_option("--delta-fsr", spc.delta_fsr, "Emitter frequency (sweep center) in units of the FSR");
  sp->add_flag("--sweep", spc.sweep, "Sweep Delta over one FSR period (heatmap)");
  sp->add_option("--n-delta", spc.n_delta, "Delta samples in a sweep");
  sp->add_option("--omega-span", spc.omega_span, "Half-width of the frequency window in FSR units");
  sp->add_option("--n-omega", spc.n_omega, "Frequency samples");
  sp->add_option("--broadening", spc.broadening, "Evaluate at s = -i(omega - Delta) + eta")->check(CLI::NonNegativeNumber);

  ProtocolConfig pc;
  auto* pr = app.add_subcommand("protocol", "Run one state-transfer protocol");
  add_common(pr, pc.io);
  pr->add_option("kind", pc.kind, "swap | stirap | czkm")->required();
  pr->add_option("--gamma-tau", pc.gamma_tau, "gamma0 tau")->check(CLI::PositiveNumber);
  pr->add_option("--t", pc.t, "Duration T in units of tau")->check(CLI::PositiveNumber);
  pr->add_flag("--optimize", pc.optimize, "Use the optimal T (CZKM: T = 9/sqrt(gamma0 tau))");
  pr->add_flag("--scan-t", pc.scan_t, "Scan the duration T");
  pr->add_option("--t-min", pc.t_min, "Scan start (units of tau)");
  pr->add_option("--t-max", pc.t_max, "Scan end (units of tau)");
  pr->add_option("--n-t", pc.n_t, "Scan samples")->check(CLI::Range(2, 100000));
  pr->add_option("--kappa-tau", pc.kappa_tau, "Link loss rate times tau")->check(CLI::NonNegativeNumber);
  pr->add_option("--delta-fsr", pc.delta_fsr, "Emitter frequency in units of the FSR");
  pr->add_option("--steps-per-tau", pc.steps_per_tau, "RK4 steps per traversal")->check(CLI::PositiveNumber);

  ScanConfig sc;
  auto* sn = app.add_subcommand("scan", "Optimal infidelity and loss scans over gamma0 tau");
  add_common(sn, sc.io);
  sn->add_option("--grid", sc.grid, "gamma0 tau values")->delimiter(',');
  sn->add_option("--protocols", sc.protocols, "Protocols to scan")->delimiter(',');
  sn->add_flag("--loss", sc.loss, "Report photon-loss errors");
  sn->add_option("--kappa-tau", sc.kappa_tau, "Link loss rate times tau")->check(CLI::NonNegativeNumber);
  sn->add_flag("--ww", sc.ww, "Re-evaluate each optimum in the multimode model");
  sn->add_option("--delta-fsr", sc.delta_fsr, "Emitter frequency for --ww, in units of the FSR");
  sn->add_option("--n-modes", sc.n_modes, "Modes kept for --ww (odd)");
  sn->add_flag("--no-lamb", sc.no_lamb, "Disable the Lamb-shift calibration for --ww");
  sn->add_option("--steps-per-tau", sc.steps_per_tau, "RK4 steps per traversal")->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);
  try {
    if (s->parsed()) return cmd_simulate(sim);
    if (sp->parsed()) return cmd_spectrum(spc);
    if (pr->parsed()) return cmd_protocol(pc);
    if (sn->parsed()) return cmd_scan(sc);
  } catch (const SolverError& e) {
    std::cerr << "solver error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
