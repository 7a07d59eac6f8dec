#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "qlink/analytic.hpp"
#include "qlink/dde.hpp"

using namespace qlink;
using doctest::Approx;

namespace {

/// The two roots bracketing Delta.
std::pair<double, double> nearest_pair(const std::vector<double>& roots, double delta) {
  auto it = std::upper_bound(roots.begin(), roots.end(), delta);
  REQUIRE(it != roots.begin());
  REQUIRE(it != roots.end());
  return {*(it - 1), *it};
}

double splitting(double gt) {
  const double delta = 50 * kPi;
  const auto link = LinkParams::make(gt, 1.0, delta);
  const auto roots = eigenfrequencies(link, delta - 2 * kPi, delta + 2 * kPi);
  auto [a, b] = nearest_pair(roots, delta);
  return b - a;
}

}  // namespace

TEST_CASE("series before the first echo is a pure exponential") {
  const auto p = SeriesParams::make(0.8, 2.0, 0.4, 10);
  for (double t : {0.0, 0.3, 1.2, 1.99}) {
    CHECK(std::abs(series_solution(p, t) - std::exp(-0.4 * t)) < 1e-14);
  }
  // continuous at the first arrival
  CHECK(std::abs(series_solution(p, 2.0) - std::exp(-0.8)) < 1e-14);
  CHECK(p.alpha() == cplx{0.4, 0.2});
}

TEST_CASE("series matches the direct binomial sum") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int r = 0; r < 30; ++r) {
    const double gam = 0.01 + 2.0 * u(rng);
    const double delay = 0.5 + u(rng);
    const double phi = 2 * kPi * u(rng);
    const auto p = SeriesParams::make(gam, delay, phi, 40);
    for (int k = 0; k <= 20; ++k) {
      const double t = 10.0 * delay * k / 20.0;
      CHECK(std::abs(series_solution(p, t) - oracle::echo_series(gam, delay, phi, t)) < 1e-10);
    }
  }
}

TEST_CASE("series agrees with the DDE engine") {
  const auto p = SeriesParams::make(0.1, 1.0, 0.0, 20);
  const auto link = LinkParams::make(0.1, 1.0, 0.0);
  const auto g = TimeGrid::make(1.0, 200, 10.0);
  const auto tr = evolve_single(link, PulseProfile::constant(0.1, 0, 10), cplx{1, 0}, g, {1.0, 0.0});
  CHECK(std::abs(series_solution(p, 5.0) - tr.c_node(0, 5.0)) < 1e-6);
}

TEST_CASE("series stays finite at high echo order") {
  const auto p = SeriesParams::make(2.0, 1.0, 0.3, 500);
  const auto link = LinkParams::make(2.0, 1.0, 0.0);
  const auto g = TimeGrid::make(1.0, 200, 400.0);
  const auto tr = evolve_single(link, PulseProfile::constant(2.0, 0, 400), cplx{1, 0}, g, {1.0, 0.3});
  for (double t : {100.0, 250.0, 399.5}) {
    const cplx s = series_solution(p, t);
    CHECK(std::isfinite(s.real()));
    CHECK(std::abs(s - tr.c_node(0, t)) < 1e-6);
  }
}

TEST_CASE("series rejects bad input and truncation") {
  CHECK_THROWS_AS(SeriesParams::make(-1.0, 1.0, 0.0, 10), std::invalid_argument);
  CHECK_THROWS_AS(SeriesParams::make(1.0, 0.0, 0.0, 10), std::invalid_argument);
  CHECK_THROWS_AS(SeriesParams::make(1.0, 1.0, 0.0, 501), std::invalid_argument);
  const auto p = SeriesParams::make(1.0, 1.0, 0.0, 3);
  CHECK_THROWS_AS(series_solution(p, 4.5), SolverError);
  CHECK_THROWS_AS(series_solution(p, -0.1), std::invalid_argument);
}

TEST_CASE("jump formulas") {
  CHECK(jump_formula(1, 1.0, 0.0, cplx{1, 0}) == cplx{-1, 0});
  CHECK(jump_formula(7, 0.3, 1.1, cplx{}) == cplx{});
  for (int n = 1; n < 20; ++n) CHECK(std::abs(jump_formula(n, 0.7, 0.3 * n, std::polar(0.9, 0.2))) <= 0.7);
  const cplx c0{0.6, 0.8};
  const cplx cn{0.1, -0.3};
  CHECK(population_jump_formula(2, 0.5, 0.4, c0, cn) ==
        Approx(2.0 * std::real(std::conj(cn) * jump_formula(2, 0.5, 0.4, c0))));
}

TEST_CASE("eigenfrequency residuals and ordering") {
  for (double gt : {0.001, 0.15, 1.5, 20.0}) {
    for (double delta : {0.0, 50 * kPi, 50.3 * kPi, 49.5 * kPi}) {
      const auto link = LinkParams::make(gt, 1.0, delta);
      const auto roots = eigenfrequencies(link, delta - 6.0, delta + 6.0);
      REQUIRE(roots.size() >= 3);
      for (std::size_t i = 0; i < roots.size(); ++i) {
        CHECK(std::abs(eigen_residual(link, roots[i])) < 1e-10 * std::max(std::abs(roots[i]), gt));
        if (i > 0) CHECK(roots[i] > roots[i - 1]);
      }
    }
  }
  CHECK_THROWS_AS(eigenfrequencies(LinkParams::make(0.1, 1.0, 0.0), 1.0, 1.0), std::invalid_argument);
}

TEST_CASE("one root per cotangent branch, counted by brute force") {
  for (double gt : {0.05, 1.5}) {
    for (double delta : {50 * kPi, 50.25 * kPi}) {
      const auto link = LinkParams::make(gt, 1.0, delta);
      const double lo = delta - 7.3, hi = delta + 5.1;
      const auto roots = eigenfrequencies(link, lo, hi);
      const long branches = static_cast<long>(std::ceil((hi - lo) / kPi)) + 1;
      // the residual rises through zero once per branch; poles are crossed falling
      const int count = oracle::sign_changes([&](double x) { return eigen_residual(link, x); }, lo, hi,
                                             branches * 10000, [](double a, double b) {
                                               return std::floor(a / kPi) != std::floor(b / kPi);
                                             });
      CHECK(static_cast<int>(roots.size()) == count);
    }
  }
}

TEST_CASE("vanishing coupling recovers the bare emitter frequency") {
  const double delta = 50.3;
  const auto link = LinkParams::make(1e-14, 1.0, delta);
  const auto roots = eigenfrequencies(link, delta - 1.0, delta + 1.0);
  const bool found = std::any_of(roots.begin(), roots.end(), [&](double r) { return std::abs(r - delta) < 1e-8; });
  CHECK(found);
  const auto bare = eigenfrequencies(LinkParams::make(0.0, 1.0, delta), delta - 4.0, delta + 4.0);
  CHECK(std::find(bare.begin(), bare.end(), delta) != bare.end());
}

TEST_CASE("translational symmetry by one free spectral range") {
  for (double gt : {0.15, 1.5}) {
    const double delta = 50.37;
    const auto a = eigenfrequencies(LinkParams::make(gt, 1.0, delta), delta - 5.0, delta + 5.0);
    const auto b = eigenfrequencies(LinkParams::make(gt, 1.0, delta + kPi), delta + kPi - 5.0, delta + kPi + 5.0);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::abs(b[i] - a[i] - kPi) < 1e-9);
  }
}

TEST_CASE("vacuum Rabi splitting at weak coupling") {
  for (double gt : {1e-4, 1e-3, 0.01}) {
    const double expected = 2 * std::sqrt(gt / 2);
    CHECK(std::abs(splitting(gt) / expected - 1.0) < 0.05);
  }
}

TEST_CASE("splitting grows monotonically and saturates below the free spectral range") {
  double prev = 0.0;
  for (double lg = -3.0; lg <= std::log10(50.0) + 1e-12; lg += 0.1) {
    const double s = splitting(std::pow(10.0, lg));
    CHECK(s > prev);
    CHECK(s < kPi);
    prev = s;
  }
  CHECK(splitting(50.0) > 0.95 * kPi);
}

TEST_CASE("spectrum of a nearly uncoupled emitter peaks at its frequency") {
  // emitter midway between two link modes; the window spans both of them
  const double delta = 50.5 * kPi;
  const auto link = LinkParams::make(1e-6, 1.0, delta);
  std::vector<double> w;
  for (int i = -20000; i <= 20000; ++i) w.push_back(delta + 1e-4 * i);
  const auto s = output_spectrum(link, w, {1e-4});
  const auto it = std::max_element(s.power.begin(), s.power.end());
  CHECK(*it == 1.0);
  CHECK(std::abs(w[static_cast<std::size_t>(it - s.power.begin())] - delta) < 1e-3);
}

TEST_CASE("resonant spectrum shows two Rabi-split peaks") {
  const double gt = 0.15;
  const double delta = 50 * kPi;
  const auto link = LinkParams::make(gt, 1.0, delta);
  std::vector<double> w;
  for (int i = -4000; i <= 4000; ++i) w.push_back(delta + 0.25 * kPi * i / 4000.0);
  const auto s = output_spectrum(link, w, {0.005});
  std::vector<std::pair<double, double>> peaks;
  for (std::size_t i = 1; i + 1 < w.size(); ++i)
    if (s.power[i] > s.power[i - 1] && s.power[i] >= s.power[i + 1]) peaks.push_back({s.power[i], w[i]});
  std::sort(peaks.rbegin(), peaks.rend());
  REQUIRE(peaks.size() >= 2);
  const double gap = std::abs(peaks[0].second - peaks[1].second);
  CHECK(std::abs(gap / (2 * std::sqrt(gt / 2)) - 1.0) < 0.05);
  CHECK((peaks[0].second - delta) * (peaks[1].second - delta) < 0.0);
}

TEST_CASE("quasi-dark points suppress spectral weight near the emitter") {
  auto peak = [](double gt, double delta) {
    const auto link = LinkParams::make(gt, 1.0, delta);
    double m = 0.0;
    for (int i = -5000; i <= 5000; ++i) {
      const double w = delta + 0.25 * kPi * i / 5000.0;
      m = std::max(m, std::norm(output_amplitude(link, w, two_ended_round_trip(link), 0.01)));
    }
    return m;
  };
  CHECK(peak(0.05, 50 * kPi) / peak(0.05, 49.5 * kPi) >= 10.0);
  CHECK(peak(0.15, 50 * kPi) / peak(0.15, 49.5 * kPi) >= 3.0);
}

TEST_CASE("spectrum map is normalized and carries eigenvalue overlays") {
  const auto link = LinkParams::make(0.15, 1.0, 0.0);
  std::vector<double> deltas, w;
  for (int i = 0; i < 11; ++i) deltas.push_back(50 * kPi + kPi * i / 10.0);
  for (int i = 0; i < 301; ++i) w.push_back(49 * kPi + 2 * kPi * i / 300.0 + 1e-4);
  const auto m = spectrum_map(link, deltas, w, {0.01});
  REQUIRE(m.power.size() == deltas.size() * w.size());
  CHECK(*std::max_element(m.power.begin(), m.power.end()) == Approx(1.0));
  CHECK(m.eigen.size() == deltas.size());
  for (const auto& e : m.eigen)
    for (double x : e) CHECK((x >= w.front() && x <= w.back()));
  const std::vector<double> unsorted{1.0, 0.5};
  CHECK_THROWS_AS(output_spectrum(link, unsorted), std::invalid_argument);
}
