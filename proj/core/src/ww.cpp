#include "qlink/ww.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "qlink/optimize.hpp"

namespace qlink {
namespace {

constexpr std::size_t kPhaseResync = 512;

double coupling(const PulseProfile* p, double t, Side side, double tau) {
  if (p == nullptr) return 0.0;
  const double g = p->value(t, side);
  return g > 0.0 ? std::sqrt(g / (2.0 * tau)) : 0.0;
}

/// y = (c1, c2, alpha_0 ... alpha_{n-1}); e[k] = e^{i delta_k t}.
void rhs(const std::vector<cplx>& y, const std::vector<cplx>& e, const std::vector<double>& sign, double g1,
         double g2, std::vector<cplx>& dy) {
  const std::size_t n = e.size();
  cplx s1{}, s2{};
  const cplx c1 = y[0], c2 = y[1];
  for (std::size_t k = 0; k < n; ++k) {
    const cplx w = std::conj(e[k]) * y[2 + k];
    s1 += w;
    s2 += sign[k] * w;
    const cplx src = g1 * c1 + sign[k] * g2 * c2;
    dy[2 + k] = cplx{0.0, -1.0} * e[k] * src;
  }
  dy[0] = cplx{0.0, -1.0} * g1 * s1;
  dy[1] = cplx{0.0, -1.0} * g2 * s2;
}

double photons_of(const std::vector<cplx>& y) {
  double p = 0.0;
  for (std::size_t k = 2; k < y.size(); ++k) p += std::norm(y[k]);
  return p;
}

}  // namespace

ModeSet build_modes(const LinkParams& link, int n_modes, LadderPolicy policy) {
  if (n_modes < 1 || n_modes % 2 == 0) throw std::invalid_argument("build_modes: n_modes must be odd and positive");
  const double fsr = link.fsr();
  const long center = std::lround(link.delta() / fsr);
  const long half = (n_modes - 1) / 2;
  long first = center - half;
  if (first < 1) {
    if (policy == LadderPolicy::Reject) {
      throw std::invalid_argument("build_modes: ladder would cross omega = 0; raise Delta or use ClipAtCutoff");
    }
    first = 1;
  }
  ModeSet m;
  m.fsr = fsr;
  m.index.reserve(static_cast<std::size_t>(n_modes));
  for (long k = first; k < first + n_modes; ++k) {
    m.index.push_back(k);
    m.omegas.push_back(static_cast<double>(k) * fsr);
    m.parity.push_back(k % 2 == 0 ? 1 : -1);
  }
  return m;
}

int min_steps_per_tau(const LinkParams& link, const ModeSet& modes, double max_phase_step) {
  double dmax = 0.0;
  for (double w : modes.omegas) dmax = std::max(dmax, std::abs(w - link.delta()));
  return std::max(1, static_cast<int>(std::ceil(dmax * link.tau() / max_phase_step)));
}

WWResult evolve_ww(const LinkParams& link, const ModeSet& modes, std::array<const PulseProfile*, 2> pulses,
                   std::array<cplx, 2> c0, const TimeGrid& grid, const WWOptions& opts) {
  if (std::abs(grid.tau() - link.tau()) > 1e-12 * link.tau()) {
    throw std::invalid_argument("evolve_ww: grid is not aligned to the link traversal time");
  }
  if (std::norm(c0[0]) + std::norm(c0[1]) > 1.0 + 1e-12) {
    throw std::invalid_argument("evolve_ww: initial amplitudes exceed the single-excitation norm");
  }
  if (modes.size() == 0) throw std::invalid_argument("evolve_ww: empty mode set");
  const double frame = link.delta() + opts.detuning_offset;
  const std::size_t n = modes.size();
  std::vector<double> detuning(n), sign(n);
  double dmax = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    detuning[k] = modes.omegas[k] - frame;
    sign[k] = static_cast<double>(modes.parity[k]);
    dmax = std::max(dmax, std::abs(detuning[k]));
  }
  const double h = grid.h();
  if (h * dmax > 0.5) {
    throw std::invalid_argument("evolve_ww: step too coarse for the mode ladder (h * max|omega_k - Delta| > 0.5)");
  }
  const double tau = link.tau();
  const std::size_t nodes = grid.size();

  std::vector<Trajectory::Emitter> em(2);
  for (auto& e : em) {
    e.c.assign(nodes, cplx{});
    e.gamma.assign(nodes, 0.0);
    e.d_right.assign(nodes, cplx{});
    e.d_left.assign(nodes, cplx{});
  }
  std::vector<double> photons(nodes, 0.0);
  std::vector<ModeSnapshot> snaps;
  std::vector<double> pending = opts.snapshot_times;
  std::sort(pending.begin(), pending.end());
  std::size_t next_snap = 0;

  std::vector<cplx> y(2 + n, cplx{}), k1(2 + n), k2(2 + n), k3(2 + n), k4(2 + n), tmp(2 + n);
  y[0] = c0[0];
  y[1] = c0[1];
  std::vector<cplx> e0(n), em_(n), e1(n), half(n);
  auto sync = [&](double t) {
    for (std::size_t k = 0; k < n; ++k) e0[k] = std::polar(1.0, reduce_angle(detuning[k] * t));
  };
  auto record = [&](std::size_t i) {
    em[0].c[i] = y[0];
    em[1].c[i] = y[1];
    photons[i] = photons_of(y);
    while (next_snap < pending.size() && pending[next_snap] <= grid.time(i) + 1e-12) {
      snaps.push_back({grid.time(i), {y.begin() + 2, y.end()}});
      ++next_snap;
    }
  };
  sync(0.0);
  record(0);

  for (std::size_t j = 0; j + 1 < nodes; ++j) {
    const double t0 = grid.time(j);
    const double t1 = grid.time(j + 1);
    const double dt = t1 - t0;
    const double tm = t0 + 0.5 * dt;
    if (j % kPhaseResync == 0 || dt != h) sync(t0);
    for (std::size_t k = 0; k < n; ++k) {
      half[k] = std::polar(1.0, reduce_angle(detuning[k] * 0.5 * dt));
      em_[k] = e0[k] * half[k];
      e1[k] = em_[k] * half[k];
    }
    const double g1l = coupling(pulses[0], t0, Side::Right, tau), g2l = coupling(pulses[1], t0, Side::Right, tau);
    const double g1m = coupling(pulses[0], tm, Side::Exact, tau), g2m = coupling(pulses[1], tm, Side::Exact, tau);
    const double g1r = coupling(pulses[0], t1, Side::Left, tau), g2r = coupling(pulses[1], t1, Side::Left, tau);

    rhs(y, e0, sign, g1l, g2l, k1);
    for (std::size_t i = 0; i < y.size(); ++i) tmp[i] = y[i] + 0.5 * dt * k1[i];
    rhs(tmp, em_, sign, g1m, g2m, k2);
    for (std::size_t i = 0; i < y.size(); ++i) tmp[i] = y[i] + 0.5 * dt * k2[i];
    rhs(tmp, em_, sign, g1m, g2m, k3);
    for (std::size_t i = 0; i < y.size(); ++i) tmp[i] = y[i] + dt * k3[i];
    rhs(tmp, e1, sign, g1r, g2r, k4);
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += (dt / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);

    em[0].d_right[j] = k1[0];
    em[1].d_right[j] = k1[1];
    rhs(y, e1, sign, g1r, g2r, tmp);
    em[0].d_left[j + 1] = tmp[0];
    em[1].d_left[j + 1] = tmp[1];
    std::swap(e0, e1);
    record(j + 1);
  }
  for (int l = 0; l < 2; ++l) {
    auto& e = em[static_cast<std::size_t>(l)];
    for (std::size_t i = 0; i < nodes; ++i) {
      e.gamma[i] = pulses[static_cast<std::size_t>(l)] ? pulses[static_cast<std::size_t>(l)]->value(grid.time(i)) : 0.0;
    }
    e.d_right[nodes - 1] = e.d_left[nodes - 1];
    e.d_left[0] = e.d_right[0];
  }
  snaps.insert(snaps.begin(), ModeSnapshot{grid.t_end(), {y.begin() + 2, y.end()}});
  return WWResult{Trajectory(grid, std::move(em), EchoRecursion{2 * grid.steps_per_tau(), 2.0 * link.phi()}),
                  std::move(photons), modes, std::move(snaps)};
}

WWResult evolve_ww_single(const LinkParams& link, const ModeSet& modes, const PulseProfile& pulse, cplx c0,
                          const TimeGrid& grid, const WWOptions& opts) {
  return evolve_ww(link, modes, {&pulse, nullptr}, {c0, cplx{}}, grid, opts);
}

double photon_number(const WWResult& ww, double t) {
  return ww.photons.at(ww.traj.grid().index_of(t));
}

double calibrate_lamb_shift(const LinkParams& link, int n_modes, LadderPolicy policy,
                            const std::vector<double>& reference_population, const TimeGrid& reference_grid,
                            double search_width) {
  if (reference_population.size() != reference_grid.size()) {
    throw std::invalid_argument("calibrate_lamb_shift: reference length does not match its grid");
  }
  const ModeSet modes = build_modes(link, n_modes, policy);
  const int m_ref = reference_grid.steps_per_tau();
  const int m_min = min_steps_per_tau(link, modes, 0.45);
  const int factor = std::max(1, (m_min + m_ref - 1) / m_ref);
  const TimeGrid grid = TimeGrid::make(link.tau(), m_ref * factor, reference_grid.t_end());
  const PulseProfile pulse = PulseProfile::constant(link.gamma0(), 0.0, reference_grid.t_end());
  auto mismatch = [&](double offset) {
    WWOptions o;
    o.detuning_offset = offset;
    const WWResult r = evolve_ww_single(link, modes, pulse, 1.0, grid, o);
    double worst = 0.0;
    for (std::size_t i = 0; i <= reference_grid.full_steps(); ++i) {
      worst = std::max(worst, std::abs(r.traj.population(0, i * static_cast<std::size_t>(factor)) -
                                       reference_population[i]));
    }
    return worst;
  };
  return golden_section(mismatch, -search_width, search_width, 0.0, 1e-3 * search_width).x;
}

}  // namespace qlink
