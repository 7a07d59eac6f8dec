#include "qlink/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "qlink/dde.hpp"
#include "qlink/optimize.hpp"
#include "qlink/ww.hpp"

namespace qlink {
namespace {

constexpr double kFitFloor = 1e-9;

void check_gamma_tau(double gamma0_tau) {
  if (!(gamma0_tau > 0.0) || !std::isfinite(gamma0_tau)) {
    throw std::invalid_argument("sweep: gamma0 tau must be positive and finite");
  }
}

LinkParams scaled_link(double gamma0_tau, const SweepOptions& opts) {
  return LinkParams::make(gamma0_tau, 1.0, opts.delta_fsr * kPi);
}

RunOptions run_options(const SweepOptions& opts) {
  RunOptions r;
  r.steps_per_tau = opts.steps_per_tau;
  r.kappa = opts.kappa_tau;
  return r;
}

ScanRecord record_from(const ProtocolRun& run) {
  ScanRecord r;
  r.protocol = run.spec.kind;
  r.gamma0_tau = run.gamma0_tau;
  r.t_opt = run.spec.duration;
  r.infidelity = std::clamp(run.infidelity, 0.0, 1.0);
  r.photon_integral = run.photon_integral;
  r.loss = run.loss;
  return r;
}

PowerLawFit fit_filtered(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> fx, fy;
  std::size_t excluded = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (y[i] < kFitFloor) {
      ++excluded;
      continue;
    }
    fx.push_back(x[i]);
    fy.push_back(y[i]);
  }
  PowerLawFit f = fit_power_law(fx, fy);
  f.excluded = excluded;
  return f;
}

}  // namespace

double resource_rule_duration(double gamma0_tau) {
  check_gamma_tau(gamma0_tau);
  return 9.0 / std::sqrt(gamma0_tau);
}

ScanRecord optimal_swap(double gamma0_tau, const SweepOptions& opts) {
  check_gamma_tau(gamma0_tau);
  if (opts.swap_coarse_points < 3) throw std::invalid_argument("optimal_swap: need at least 3 coarse points");
  const LinkParams link = scaled_link(gamma0_tau, opts);
  const double t_rabi = kPi / std::sqrt(gamma0_tau);
  const double lo = 0.5 * t_rabi, hi = 1.5 * t_rabi;
  const PulseProfile pulse = PulseProfile::constant(gamma0_tau, 0.0, hi);
  const Trajectory traj =
      evolve_pair(link, pulse, pulse, {cplx{1.0, 0.0}, cplx{}}, TimeGrid::make(1.0, opts.steps_per_tau, hi));
  auto eps = [&](double t) { return std::clamp(1.0 - fidelity(traj, t), 0.0, 1.0); };

  const int n = opts.swap_coarse_points;
  std::vector<double> ts(static_cast<std::size_t>(n)), es(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    ts[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (n - 1);
    es[static_cast<std::size_t>(i)] = eps(ts[static_cast<std::size_t>(i)]);
  }
  const auto best = static_cast<std::size_t>(std::min_element(es.begin(), es.end()) - es.begin());
  ScanRecord r;
  r.protocol = ProtocolKind::Swap;
  r.gamma0_tau = gamma0_tau;
  r.t_opt = ts[best];
  r.infidelity = es[best];
  if (best == 0 || best + 1 == es.size()) {
    r.converged = false;
    r.diagnostic = "no interior minimum in [0.5, 1.5] pi/Omega; returning the best endpoint";
  } else {
    const Minimum m = golden_section(eps, ts[best - 1], ts[best + 1], opts.rel_tol);
    if (m.f <= r.infidelity) {
      r.t_opt = m.x;
      r.infidelity = m.f;
    }
  }
  r.photon_integral = photon_integral(traj, r.t_opt);
  r.loss = opts.kappa_tau > 0.0 ? -std::expm1(-opts.kappa_tau * r.photon_integral) : 0.0;
  return r;
}

ScanRecord stirap_at(double gamma0_tau, double duration_tau, const SweepOptions& opts) {
  check_gamma_tau(gamma0_tau);
  const ProtocolSpec spec{ProtocolKind::Stirap, gamma0_tau, duration_tau};
  return record_from(run_protocol(spec, scaled_link(gamma0_tau, opts), run_options(opts)));
}

ScanRecord optimal_stirap(double gamma0_tau, const SweepOptions& opts) {
  check_gamma_tau(gamma0_tau);
  if (!(opts.stirap_step > 0.0) || opts.stirap_step > 0.25) {
    throw std::invalid_argument("optimal_stirap: scan step must lie in (0, tau/4]");
  }
  const double step = opts.stirap_step;
  const double t_max = 100.0 / std::sqrt(gamma0_tau);
  auto eps = [&](double t) { return stirap_at(gamma0_tau, t, opts).infidelity; };
  auto lg = [](double e) { return std::log10(std::max(e, 1e-300)); };

  // Valley depth is measured in log10(1-F) from the highest earlier sample.
  std::vector<double> es;
  std::size_t valley = 0;
  bool have_valley = false, found = false;
  for (int i = 0;; ++i) {
    const double t = 2.0 + step * i;
    if (t > t_max) break;
    es.push_back(eps(t));
    const std::size_t k = es.size() - 1;
    if (have_valley && es[k] < es[valley]) have_valley = false;
    if (!have_valley && k >= 2 && es[k - 1] < es[k - 2] && es[k - 1] <= es[k]) {
      have_valley = true;
      valley = k - 1;
    }
    if (have_valley) {
      const double peak = *std::max_element(es.begin(), es.begin() + static_cast<std::ptrdiff_t>(valley));
      if (lg(es[k]) - lg(es[valley]) >= opts.valley_rise * (lg(peak) - lg(es[valley]))) {
        found = true;
        break;
      }
    }
  }
  const double valley_t = 2.0 + step * static_cast<double>(valley);
  const double valley_e = have_valley ? es[valley] : 1.0;
  if (!found) {
    ScanRecord r;
    r.protocol = ProtocolKind::Stirap;
    r.gamma0_tau = gamma0_tau;
    r.t_opt = have_valley ? valley_t : t_max;
    r.infidelity = valley_e;
    r.converged = false;
    r.diagnostic = "no accepted infidelity valley below T = 100 sqrt(tau/gamma0)";
    return r;
  }
  const Minimum m = golden_section(eps, valley_t - step, valley_t + step, opts.rel_tol);
  ScanRecord r = stirap_at(gamma0_tau, m.f <= valley_e ? m.x : valley_t, opts);
  return r;
}

ScanRecord czkm_at(double gamma0_tau, double duration_tau, const SweepOptions& opts) {
  check_gamma_tau(gamma0_tau);
  const ProtocolSpec spec{ProtocolKind::Czkm, gamma0_tau, duration_tau};
  ScanRecord r = record_from(run_protocol(spec, scaled_link(gamma0_tau, opts), run_options(opts)));
  const double exact = czkm_exact_error(gamma0_tau, 1.0, duration_tau, opts.steps_per_tau);
  r.cross_check = std::abs(exact - r.infidelity);
  r.infidelity = std::clamp(exact, 0.0, 1.0);
  return r;
}

std::vector<ScanRecord> scan_protocols(std::span<const double> grid, std::span<const ProtocolKind> kinds,
                                       const SweepOptions& opts) {
  if (grid.empty()) throw std::invalid_argument("scan_protocols: empty grid");
  for (double g : grid) check_gamma_tau(g);
  std::vector<ScanRecord> out;
  for (double g : grid) {
    for (ProtocolKind k : kinds) {
      switch (k) {
        case ProtocolKind::Swap: out.push_back(optimal_swap(g, opts)); break;
        case ProtocolKind::Stirap: out.push_back(optimal_stirap(g, opts)); break;
        case ProtocolKind::Czkm: out.push_back(czkm_at(g, resource_rule_duration(g), opts)); break;
        case ProtocolKind::Shaped: throw std::invalid_argument("scan_protocols: shaped pulses are not scanned");
      }
    }
  }
  return out;
}

CrossoverReport crossover_scan(std::span<const double> grid, const SweepOptions& opts) {
  if (grid.empty()) throw std::invalid_argument("crossover_scan: empty grid");
  CrossoverReport rep;
  rep.crossover = std::numeric_limits<double>::quiet_NaN();
  for (double g : grid) {
    const double t = resource_rule_duration(g);
    rep.points.push_back({g, t, stirap_at(g, t, opts).infidelity, czkm_exact_error(g, 1.0, t, opts.steps_per_tau)});
  }
  std::sort(rep.points.begin(), rep.points.end(),
            [](const CrossoverPoint& a, const CrossoverPoint& b) { return a.gamma0_tau < b.gamma0_tau; });
  std::size_t first = rep.points.size();
  for (std::size_t i = 0; i < rep.points.size(); ++i) {
    if (rep.points[i].czkm < rep.points[i].stirap) {
      first = i;
      break;
    }
  }
  if (first < rep.points.size()) rep.crossover = rep.points[first].gamma0_tau;
  rep.clean_split = true;
  for (std::size_t i = 0; i < rep.points.size(); ++i) {
    const bool czkm_wins = rep.points[i].czkm < rep.points[i].stirap;
    if (czkm_wins != (i >= first)) rep.clean_split = false;
  }
  return rep;
}

PowerLawFit fit_power_law(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("fit_power_law: x and y differ in length");
  if (x.size() < 3) throw std::invalid_argument("fit_power_law: need at least 3 points");
  std::vector<double> lx(x.size()), ly(y.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw std::invalid_argument("fit_power_law: values must be positive");
    lx[i] = std::log(x[i]);
    ly[i] = std::log(y[i]);
  }
  const LinearFit lin = fit_linear(lx, ly);
  PowerLawFit f;
  f.a = std::exp(lin.intercept);
  f.b = lin.slope;
  double ss = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    const double r = ly[i] - (lin.intercept + lin.slope * lx[i]);
    ss += r * r;
  }
  f.residual = std::sqrt(ss / static_cast<double>(lx.size()));
  f.used = lx.size();
  return f;
}

LinearFit fit_linear(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("fit_linear: x and y differ in length");
  if (x.size() < 2) throw std::invalid_argument("fit_linear: need at least 2 points");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("fit_linear: x values are all equal");
  LinearFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  return f;
}

PowerLawFit fit_infidelity(std::span<const ScanRecord> records, ProtocolKind kind) {
  std::vector<double> x, y;
  for (const auto& r : records) {
    if (r.protocol != kind) continue;
    x.push_back(r.gamma0_tau);
    y.push_back(r.infidelity);
  }
  return fit_filtered(x, y);
}

PowerLawFit fit_loss(std::span<const ScanRecord> records, ProtocolKind kind) {
  std::vector<double> x, y;
  for (const auto& r : records) {
    if (r.protocol != kind) continue;
    x.push_back(r.t_opt);
    y.push_back(r.loss);
  }
  return fit_filtered(x, y);
}

ScanRecord ww_evaluate(const ScanRecord& dde_record, const SweepOptions& opts, const WWScanOptions& ww) {
  const double g = dde_record.gamma0_tau;
  check_gamma_tau(g);
  const LinkParams link = scaled_link(g, opts);
  const ModeSet modes = build_modes(link, ww.n_modes, LadderPolicy::ClipAtCutoff);
  const ProtocolSpec spec{dde_record.protocol, g, dde_record.t_opt};
  const PulsePair pulses = make_pulses(spec, link);

  WWOptions wopts;
  if (ww.lamb_correction) {
    const double t_ref = std::min(spec.duration, 12.0);
    const TimeGrid ref_grid = TimeGrid::make(1.0, opts.steps_per_tau, t_ref);
    const Trajectory ref = evolve_single(link, PulseProfile::constant(g, 0.0, t_ref), 1.0, ref_grid,
                                         two_ended_round_trip(link));
    std::vector<double> pop(ref.size());
    for (std::size_t i = 0; i < ref.size(); ++i) pop[i] = ref.population(0, i);
    wopts.detuning_offset = calibrate_lamb_shift(link, ww.n_modes, LadderPolicy::ClipAtCutoff, pop, ref_grid, g);
  }
  const int m = std::max(opts.steps_per_tau, min_steps_per_tau(link, modes));
  const WWResult res = evolve_ww(link, modes, {&pulses.sender, &pulses.receiver}, {cplx{1.0, 0.0}, cplx{}},
                                 TimeGrid::make(1.0, m, spec.duration), wopts);
  ScanRecord r = dde_record;
  r.infidelity = std::clamp(1.0 - std::norm(res.traj.c(1).back()), 0.0, 1.0);
  r.photon_integral = photon_integral(res.traj, spec.duration);
  r.loss = opts.kappa_tau > 0.0 ? -std::expm1(-opts.kappa_tau * r.photon_integral) : 0.0;
  r.cross_check = 0.0;
  return r;
}

}  // namespace qlink
