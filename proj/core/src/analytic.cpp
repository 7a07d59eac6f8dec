#include "qlink/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace qlink {
namespace {

/// e^{-x/2} L^{(1)}_m(x) via the forward recurrence, rescaled on the fly.
double scaled_laguerre1(int m, double x) {
  double a = 1.0;
  if (m == 0) return std::exp(-0.5 * x);
  double b = 2.0 - x;
  double log_scale = 0.0;
  constexpr double kBig = 1e150;
  constexpr double kLogBig = 345.38776394910684;  // ln(1e150)
  for (int k = 1; k < m; ++k) {
    const double c = ((2.0 * k + 2.0 - x) * b - (k + 1.0) * a) / (k + 1.0);
    a = b;
    b = c;
    if (std::abs(b) > kBig) {
      a /= kBig;
      b /= kBig;
      log_scale += kLogBig;
    }
  }
  if (b == 0.0) return 0.0;
  const double sign = b < 0.0 ? -1.0 : 1.0;
  return sign * std::exp(std::log(std::abs(b)) + log_scale - 0.5 * x);
}

/// Half-angle of the round trip: theta = (omega T + Phi)/2 with omega = lambda - Delta,
/// split as (base + offset) so that offsets from a known pole avoid cancellation.
struct BranchGeometry {
  double delta;
  double period;   // T/2
  double psi;      // Phi/2 reduced to [0, pi)

  BranchGeometry(const LinkParams& link, RoundTrip rt)
      : delta(link.delta()), period(0.5 * rt.delay), psi(std::fmod(reduce_angle(rt.phase) * 0.5, kPi)) {}

  /// lambda of the k-th singularity theta = k pi.
  double pole(double k) const { return delta + (k * kPi - psi) / period; }
  double theta_index(double lambda) const { return ((lambda - delta) * period + psi) / kPi; }
};

void check_round_trip(RoundTrip rt) {
  if (!(rt.delay > 0.0) || !std::isfinite(rt.delay) || !std::isfinite(rt.phase)) {
    throw std::invalid_argument("round trip needs a positive finite delay and finite phase");
  }
}

}  // namespace

SeriesParams SeriesParams::make(double gamma, double delay, double phi, int n_max) {
  if (!std::isfinite(gamma) || !std::isfinite(delay) || !std::isfinite(phi)) {
    throw std::invalid_argument("series parameters must be finite");
  }
  if (gamma < 0.0) throw std::invalid_argument("series: gamma must be nonnegative");
  if (delay <= 0.0) throw std::invalid_argument("series: delay must be positive");
  if (n_max < 0 || n_max > kMaxOrder) throw std::invalid_argument("series: n_max must lie in [0, 500]");
  return SeriesParams(gamma, delay, phi, n_max);
}

cplx series_solution(const SeriesParams& p, double t) {
  if (!(t >= 0.0)) throw std::invalid_argument("series_solution: t must be >= 0");
  const int needed = static_cast<int>(std::floor(t / p.delay()));
  if (needed > p.n_max()) {
    throw SolverError("series_solution: t requires " + std::to_string(needed) + " echo orders, n_max is " +
                      std::to_string(p.n_max()));
  }
  const double g = p.gamma();
  cplx acc = std::exp(-0.5 * g * t);
  for (int n = 1; n <= needed; ++n) {
    const double x = g * (t - n * p.delay());
    if (x <= 0.0) continue;
    const double term = -(x / n) * scaled_laguerre1(n - 1, x);
    acc += phase_factor(n, p.phi()) * term;
  }
  return acc;
}

cplx jump_formula(int n, double gamma, double phi, cplx c0) {
  if (n < 1) throw std::invalid_argument("jump_formula: N must be >= 1");
  return -gamma * phase_factor(n, phi) * c0;
}

double population_jump_formula(int n, double gamma, double phi, cplx c0, cplx c_at_arrival) {
  if (n < 1) throw std::invalid_argument("population_jump_formula: N must be >= 1");
  return -2.0 * gamma * std::real(phase_factor(n, phi) * std::conj(c_at_arrival) * c0);
}

double eigen_residual(const LinkParams& link, double lambda, RoundTrip rt) {
  check_round_trip(rt);
  const BranchGeometry geo(link, rt);
  const double theta = (lambda - geo.delta) * geo.period + geo.psi;
  return lambda - geo.delta - 0.5 * link.gamma0() * std::cos(theta) / std::sin(theta);
}

double eigen_residual(const LinkParams& link, double lambda) {
  return eigen_residual(link, lambda, two_ended_round_trip(link));
}

std::vector<double> bare_mode_frequencies(const LinkParams& link, double lo, double hi, RoundTrip rt) {
  check_round_trip(rt);
  const BranchGeometry geo(link, rt);
  std::vector<double> out;
  for (double k = std::ceil(geo.theta_index(lo)); k <= std::floor(geo.theta_index(hi)); k += 1.0) {
    const double w = geo.pole(k);
    if (w >= lo && w <= hi) out.push_back(w);
  }
  return out;
}

std::vector<double> eigenfrequencies(const LinkParams& link, double lo, double hi, RoundTrip rt) {
  check_round_trip(rt);
  if (!std::isfinite(lo) || !std::isfinite(hi) || !(hi > lo)) {
    throw std::invalid_argument("eigenfrequencies: empty or invalid window");
  }
  const double gamma = link.gamma0();
  if (gamma == 0.0) {
    std::vector<double> out = bare_mode_frequencies(link, lo, hi, rt);
    if (link.delta() >= lo && link.delta() <= hi) out.push_back(link.delta());
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }
  const BranchGeometry geo(link, rt);
  const double width = kPi / geo.period;
  std::vector<double> out;
  const double k_lo = std::floor(geo.theta_index(lo));
  const double k_hi = std::floor(geo.theta_index(hi));
  for (double k = k_lo; k <= k_hi; k += 1.0) {
    const double base = geo.pole(k);
    const double offset0 = base - geo.delta;
    // Within the branch, theta = k pi + u * period with u in (0, width);
    // cot(theta) = cot(u * period) carries no cancellation.
    auto g = [&](double u) { return offset0 + u - 0.5 * gamma / std::tan(u * geo.period); };
    double shrink = 1e-9 * width;
    double a = shrink, b = width - shrink;
    while (g(a) > 0.0 && a > 1e-300) a *= 0.5;
    while (g(b) < 0.0 && width - b > 1e-300 * width) b = width - 0.5 * (width - b);
    if (g(a) > 0.0 || g(b) < 0.0) {
      // Root unresolvably close to a pole (gamma -> 0): report the pole-adjacent end.
      const double u = g(a) > 0.0 ? a : b;
      const double lam = base + u;
      if (lam >= lo && lam <= hi) out.push_back(lam);
      continue;
    }
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (a + b);
      if (mid <= a || mid >= b) break;
      if (g(mid) < 0.0) a = mid;
      else b = mid;
    }
    double u = 0.5 * (a + b);
    // Secant polish on the final bracket; keep only improvements.
    double ga = g(a), gb = g(b);
    if (gb != ga) {
      const double us = a - ga * (b - a) / (gb - ga);
      if (us > a && us < b && std::abs(g(us)) < std::abs(g(u))) u = us;
    }
    const double lam = base + u;
    if (lam >= lo && lam <= hi) out.push_back(lam);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<double> eigenfrequencies(const LinkParams& link, double lo, double hi) {
  return eigenfrequencies(link, lo, hi, two_ended_round_trip(link));
}

cplx output_amplitude(const LinkParams& link, double omega, RoundTrip rt, double broadening) {
  check_round_trip(rt);
  const BranchGeometry geo(link, rt);
  const double gamma = link.gamma0();
  const double w = omega - geo.delta;
  const double two_theta = 2.0 * (w * geo.period + geo.psi);
  const cplx s{broadening, -w};
  const cplx e = std::exp(-broadening * rt.delay) * std::polar(1.0, two_theta);
  const cplx denom = (s + 0.5 * gamma) * (1.0 - e) + gamma * e;
  if (denom == cplx{}) return {std::numeric_limits<double>::infinity(), 0.0};
  return std::sqrt(gamma) / denom;
}

SpectralResult output_spectrum(const LinkParams& link, std::span<const double> omega_grid, SpectrumOptions opts) {
  if (omega_grid.empty()) throw std::invalid_argument("output_spectrum: empty frequency grid");
  for (std::size_t i = 0; i < omega_grid.size(); ++i) {
    if (!std::isfinite(omega_grid[i])) throw std::invalid_argument("output_spectrum: non-finite frequency");
    if (i > 0 && omega_grid[i] < omega_grid[i - 1]) throw std::invalid_argument("output_spectrum: grid not sorted");
  }
  if (!(opts.broadening >= 0.0)) throw std::invalid_argument("output_spectrum: broadening must be >= 0");
  const RoundTrip rt = two_ended_round_trip(link);
  SpectralResult r;
  r.omega.assign(omega_grid.begin(), omega_grid.end());
  r.power.resize(r.omega.size());
  r.at_pole.assign(r.omega.size(), false);
  double peak = 0.0;
  for (std::size_t i = 0; i < r.omega.size(); ++i) {
    const cplx a = output_amplitude(link, r.omega[i], rt, opts.broadening);
    const double p = std::norm(a);
    if (!std::isfinite(p)) {
      r.at_pole[i] = true;
      r.power[i] = std::numeric_limits<double>::infinity();
    } else {
      r.power[i] = p;
      peak = std::max(peak, p);
    }
  }
  if (peak > 0.0) {
    for (std::size_t i = 0; i < r.power.size(); ++i) {
      if (!r.at_pole[i]) r.power[i] /= peak;
    }
  }
  if (r.omega.back() > r.omega.front()) r.eigenfrequencies = eigenfrequencies(link, r.omega.front(), r.omega.back());
  return r;
}

SpectrumMap spectrum_map(const LinkParams& link, std::span<const double> deltas, std::span<const double> omega_grid,
                         SpectrumOptions opts) {
  SpectrumMap m;
  m.deltas.assign(deltas.begin(), deltas.end());
  m.omega.assign(omega_grid.begin(), omega_grid.end());
  m.power.reserve(deltas.size() * omega_grid.size());
  double peak = 0.0;
  for (double d : deltas) {
    const LinkParams l = link.with_delta(d);
    const RoundTrip rt = two_ended_round_trip(l);
    for (double w : omega_grid) {
      const double p = std::norm(output_amplitude(l, w, rt, opts.broadening));
      m.power.push_back(p);
      if (std::isfinite(p)) peak = std::max(peak, p);
    }
    if (omega_grid.size() >= 2 && omega_grid.back() > omega_grid.front()) {
      m.eigen.push_back(eigenfrequencies(l, omega_grid.front(), omega_grid.back()));
    } else {
      m.eigen.emplace_back();
    }
  }
  if (peak > 0.0) {
    for (double& p : m.power) {
      if (std::isfinite(p)) p /= peak;
    }
  }
  return m;
}

}  // namespace qlink
