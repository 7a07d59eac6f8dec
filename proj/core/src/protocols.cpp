#include "qlink/protocols.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <stdexcept>

namespace qlink {
namespace {

void check_czkm_window(double tau, double duration) {
  if (!(duration > tau)) throw std::invalid_argument("CZKM requires T > tau");
}

cplx bright_amplitude(double gamma0, double tau, double t_eff, int steps_per_tau) {
  const LinkParams link = LinkParams::make(gamma0, tau, 0.0);
  const PulseProfile pulse = PulseProfile::constant(gamma0, 0.0, t_eff);
  const TimeGrid grid = TimeGrid::make(tau, steps_per_tau, t_eff);
  const Trajectory traj = evolve_single(link, pulse, 1.0, grid, RoundTrip{2.0 * tau, 0.0});
  return traj.c(0).back();
}

}  // namespace

std::string to_string(ProtocolKind kind) {
  switch (kind) {
    case ProtocolKind::Swap: return "swap";
    case ProtocolKind::Stirap: return "stirap";
    case ProtocolKind::Czkm: return "czkm";
    case ProtocolKind::Shaped: return "shaped";
  }
  return "unknown";
}

ProtocolKind protocol_from_string(const std::string& name) {
  std::string s = name;
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  if (s == "swap") return ProtocolKind::Swap;
  if (s == "stirap") return ProtocolKind::Stirap;
  if (s == "czkm") return ProtocolKind::Czkm;
  if (s == "shaped") return ProtocolKind::Shaped;
  throw std::invalid_argument("unknown protocol '" + name + "'");
}

PulsePair make_pulses(const ProtocolSpec& spec, const LinkParams& link) {
  const double T = spec.duration;
  if (!(T > 0.0) || !std::isfinite(T)) throw std::invalid_argument("make_pulses: T must be positive and finite");
  if (!(spec.gamma0 >= 0.0) || !std::isfinite(spec.gamma0)) {
    throw std::invalid_argument("make_pulses: gamma0 must be nonnegative and finite");
  }
  switch (spec.kind) {
    case ProtocolKind::Swap:
      return {PulseProfile::constant(spec.gamma0, 0.0, T), PulseProfile::constant(spec.gamma0, 0.0, T)};
    case ProtocolKind::Stirap: {
      PulseProfile s = PulseProfile::sin_sq(spec.gamma0, T);
      return {s, PulseProfile::mirrored(s, T)};
    }
    case ProtocolKind::Czkm: {
      check_czkm_window(link.tau(), T);
      PulseProfile s = PulseProfile::tanh_czkm(spec.gamma0, spec.t_c(link.tau()) - link.tau(), 0.0, T);
      return {s, PulseProfile::mirrored(s, T)};
    }
    case ProtocolKind::Shaped:
      break;
  }
  throw std::invalid_argument("make_pulses: shaped protocols need a wavepacket (use make_shaped_pulses)");
}

PulsePair make_shaped_pulses(const PulseProfile& sender, double duration) {
  if (!(duration > 0.0)) throw std::invalid_argument("make_shaped_pulses: T must be positive");
  return {sender, PulseProfile::mirrored(sender, duration)};
}

ShapedPulseResult shaped_pulse(std::span<const double> times, std::span<const double> density, double t0,
                               ShapedPulseOptions opts) {
  if (times.size() != density.size() || times.size() < 2) {
    throw std::invalid_argument("shaped_pulse: need matching time and density samples (at least 2)");
  }
  if (t0 > times.front()) throw std::invalid_argument("shaped_pulse: t0 lies after the first sample");
  if (!(opts.gamma_max > 0.0)) throw std::invalid_argument("shaped_pulse: gamma_max must be positive");
  constexpr double kFloor = 1e-12;
  shape::Shaped data;
  data.times.assign(times.begin(), times.end());
  data.density.assign(density.begin(), density.end());
  data.t0 = t0;
  data.gamma_max = opts.gamma_max;
  data.values.resize(times.size());
  ShapedPulseResult out{PulseProfile::off(), false, 0};
  double integral = 0.0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!(density[i] >= 0.0) || !std::isfinite(density[i])) {
      throw std::invalid_argument("shaped_pulse: density must be finite and nonnegative");
    }
    if (i > 0) integral += 0.5 * (times[i] - times[i - 1]) * (density[i] + density[i - 1]);
    if (integral > 1.0 + 1e-9) throw std::invalid_argument("shaped_pulse: wavepacket norm exceeds 1");
    const double denom = 1.0 - integral;
    double g = density[i] / std::max(denom, kFloor);
    if (denom < kFloor && density[i] > 0.0) data.saturated = true;
    if (g > opts.gamma_max) {
      g = opts.gamma_max;
      data.saturated = true;
      ++out.saturated_samples;
    }
    data.values[i] = g;
  }
  out.saturated = data.saturated;
  out.pulse = PulseProfile::shaped(std::move(data));
  return out;
}

double fidelity(const Trajectory& traj, double duration) {
  if (traj.n_emitters() < 2) throw std::invalid_argument("fidelity: trajectory has no receiver");
  const TimeGrid& g = traj.grid();
  if (g.is_node(duration)) return std::norm(traj.c(1)[g.index_of(duration)]);
  return std::clamp(std::norm(traj.c_at(1, duration)), 0.0, 1.0);
}

double czkm_exact_error(double gamma0, double tau, double duration, int steps_per_tau) {
  check_czkm_window(tau, duration);
  const double t_eff = duration - tau;
  const cplx beta = bright_amplitude(gamma0, tau, t_eff, steps_per_tau);
  // v = (1 - u)/2 with u = tanh(gamma0 T_eff / 4); expanded so nothing cancels at large T_eff
  const double v = 1.0 / (1.0 + std::exp(0.5 * gamma0 * t_eff));
  return 2.0 * v * (1.0 + beta.real()) - v * v * std::norm(1.0 + beta);
}

double czkm_asymptotic_error(double gamma0, double tau, double duration, int steps_per_tau) {
  check_czkm_window(tau, duration);
  const double t_eff = duration - tau;
  const cplx beta = bright_amplitude(gamma0, tau, t_eff, steps_per_tau);
  return 2.0 * std::exp(-0.5 * gamma0 * t_eff) * (1.0 + beta.real());
}

double czkm_bound(double gamma0, double tau, double duration) {
  check_czkm_window(tau, duration);
  return std::exp(-gamma0 * (duration - tau));
}

DarkBrightState dark_bright(const Trajectory& traj, const PulsePair& pulses, const LinkParams& link) {
  if (traj.n_emitters() < 2) throw std::invalid_argument("dark_bright: need a two-emitter trajectory");
  const TimeGrid& g = traj.grid();
  const double gamma0 = link.gamma0();
  if (!(gamma0 > 0.0)) throw std::invalid_argument("dark_bright: gamma0 must be positive");
  const std::size_t shift = static_cast<std::size_t>(g.steps_per_tau());
  const cplx phase = std::polar(1.0, reduce_angle(link.phi()));
  const double root0 = std::sqrt(gamma0);
  DarkBrightState s;
  s.t_eff = g.t_end() - link.tau();
  s.u = std::tanh(0.25 * gamma0 * s.t_eff);
  const auto c1 = traj.c(0);
  const auto c2 = traj.c(1);
  for (std::size_t i = 0; i + shift <= g.full_steps(); ++i) {
    const double t = g.time(i);
    const cplx cb = phase * c2[i + shift];
    const double r1 = std::sqrt(pulses.sender.value(t));
    const double r2 = std::sqrt(pulses.receiver.value(g.time(i + shift)));
    s.t.push_back(t);
    s.d.push_back((r2 * c1[i] - r1 * cb) / root0);
    s.b.push_back((r1 * c1[i] + r2 * cb) / root0);
    s.norm.push_back(std::norm(c1[i]) + std::norm(cb));
  }
  return s;
}

double photon_integral(const Trajectory& traj, double duration) {
  const TimeGrid& g = traj.grid();
  if (!(duration >= 0.0) || duration > g.t_end() * (1.0 + 1e-12)) {
    throw std::out_of_range("photon_integral: T outside the trajectory");
  }
  auto n_at = [&](double t) {
    double pop = 0.0;
    for (int l = 0; l < traj.n_emitters(); ++l) pop += std::norm(traj.c_at(l, t));
    return 1.0 - pop;
  };
  double acc = 0.0;
  std::size_t i = 0;
  for (; i + 1 < g.size() && g.time(i + 1) <= duration; ++i) {
    acc += 0.5 * (g.time(i + 1) - g.time(i)) * (traj.photon_number(i) + traj.photon_number(i + 1));
  }
  if (g.time(i) < duration) acc += 0.5 * (duration - g.time(i)) * (traj.photon_number(i) + n_at(duration));
  return acc;
}

double loss_error(const Trajectory& traj, double kappa, double duration) {
  if (!(kappa >= 0.0) || !std::isfinite(kappa)) throw std::invalid_argument("loss_error: kappa must be >= 0");
  if (kappa == 0.0) return 0.0;
  return -std::expm1(-kappa * photon_integral(traj, duration));
}

ProtocolResult simulate_protocol(const ProtocolSpec& spec, const LinkParams& link, const RunOptions& opts) {
  const LinkParams l = link.with_gamma0(spec.gamma0);
  const PulsePair p = make_pulses(spec, l);
  const TimeGrid grid = TimeGrid::make(l.tau(), opts.steps_per_tau, spec.duration);
  Trajectory t = evolve_pair(l, p.sender, p.receiver, {cplx{1.0, 0.0}, cplx{}}, grid);
  ProtocolRun r;
  r.spec = spec;
  r.gamma0_tau = spec.gamma0 * l.tau();
  r.fidelity = fidelity(t, spec.duration);
  r.infidelity = 1.0 - r.fidelity;
  r.kappa = opts.kappa;
  r.photon_integral = photon_integral(t, spec.duration);
  r.loss = opts.kappa > 0.0 ? -std::expm1(-opts.kappa * r.photon_integral) : 0.0;
  return ProtocolResult{r, p, std::move(t)};
}

ProtocolRun run_protocol(const ProtocolSpec& spec, const LinkParams& link, const RunOptions& opts) {
  return simulate_protocol(spec, link, opts).run;
}

}  // namespace qlink
