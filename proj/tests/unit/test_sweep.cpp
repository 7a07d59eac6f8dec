#include <algorithm>
#include <cmath>
#include <cstring>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "qlink/sweep.hpp"

using namespace qlink;
using doctest::Approx;

namespace {

bool same(const ScanRecord& a, const ScanRecord& b) {
  return a.protocol == b.protocol && std::memcmp(&a.t_opt, &b.t_opt, sizeof(double)) == 0 &&
         std::memcmp(&a.infidelity, &b.infidelity, sizeof(double)) == 0 &&
         std::memcmp(&a.photon_integral, &b.photon_integral, sizeof(double)) == 0 && a.converged == b.converged &&
         a.diagnostic == b.diagnostic;
}

}  // namespace

TEST_CASE("resource rule") {
  CHECK(resource_rule_duration(1.0) == 9.0);
  CHECK(resource_rule_duration(0.01) == Approx(90.0));
  CHECK_THROWS_AS(resource_rule_duration(0.0), std::invalid_argument);
}

TEST_CASE("power-law fit recovers synthetic data") {
  std::vector<double> x, y;
  for (double v : {0.1, 0.3, 1.0, 2.0, 5.0}) {
    x.push_back(v);
    y.push_back(3.0 * v * v);
  }
  const auto f = fit_power_law(x, y);
  CHECK(f.a == Approx(3.0).epsilon(1e-12));
  CHECK(f.b == Approx(2.0).epsilon(1e-12));
  CHECK(f.residual < 1e-12);
  CHECK(f.used == 5);
  CHECK_THROWS_AS(fit_power_law(std::vector<double>{1, 2}, std::vector<double>{1, 2}), std::invalid_argument);
  CHECK_THROWS_AS(fit_power_law(std::vector<double>{1, 2, -3}, std::vector<double>{1, 2, 3}), std::invalid_argument);
  CHECK_THROWS_AS(fit_power_law(std::vector<double>{1, 2, 3}, std::vector<double>{1, 0, 3}), std::invalid_argument);

  const std::vector<double> lx{0.0, 1.0, 2.0, 4.0};
  const std::vector<double> ly{0.5, 2.0, 3.4, 6.6};
  const auto lf = fit_linear(lx, ly);
  const auto ref = oracle::ols(lx, ly);
  CHECK(lf.slope == Approx(ref.first));
  CHECK(lf.intercept == Approx(ref.second));
}

TEST_CASE("infidelity fits skip points below the noise floor") {
  std::vector<ScanRecord> rs;
  for (double g : {0.1, 0.2, 0.4, 0.8}) {
    ScanRecord r;
    r.protocol = ProtocolKind::Stirap;
    r.gamma0_tau = g;
    r.t_opt = 9.0 / std::sqrt(g);
    r.infidelity = 2e-5 * g * g;
    r.loss = 0.001 * r.t_opt;
    rs.push_back(r);
  }
  rs[0].infidelity = 1e-12;
  ScanRecord other;
  other.protocol = ProtocolKind::Swap;
  other.gamma0_tau = 0.3;
  other.infidelity = 0.5;
  rs.push_back(other);
  const auto f = fit_infidelity(rs, ProtocolKind::Stirap);
  CHECK(f.used == 3);
  CHECK(f.excluded == 1);
  CHECK(f.a == Approx(2e-5));
  CHECK(f.b == Approx(2.0));
  const auto l = fit_loss(rs, ProtocolKind::Stirap);
  CHECK(l.b == Approx(1.0));
  CHECK(l.a == Approx(0.001));
}

TEST_CASE("scan input validation") {
  const std::vector<ProtocolKind> none;
  const std::vector<double> grid{0.5};
  CHECK(scan_protocols(grid, none).empty());
  const std::vector<double> empty;
  const std::vector<ProtocolKind> sw{ProtocolKind::Swap};
  CHECK_THROWS_AS(scan_protocols(empty, sw), std::invalid_argument);
  const std::vector<double> bad{-0.1};
  CHECK_THROWS_AS(scan_protocols(bad, sw), std::invalid_argument);
  const std::vector<ProtocolKind> shaped{ProtocolKind::Shaped};
  CHECK_THROWS_AS(scan_protocols(grid, shaped), std::invalid_argument);
}

TEST_CASE("SWAP in the cavity limit") {
  const auto r = optimal_swap(0.001);
  CHECK(r.converged);
  CHECK(std::abs(r.t_opt * std::sqrt(0.001) / kPi - 1.0) < 0.02);
  CHECK(r.infidelity < 0.01);
}

TEST_CASE("SWAP refinement never loses to the coarse grid") {
  const double g = 0.1;
  const auto r = optimal_swap(g);
  REQUIRE(r.converged);
  const double tr = kPi / std::sqrt(g);
  double coarse = 1.0;
  for (int i = 0; i < 101; ++i) {
    const double t = tr * (0.5 + i / 100.0);
    coarse = std::min(coarse, run_protocol({ProtocolKind::Swap, g, t}, LinkParams::make(g, 1.0, 50 * kPi)).infidelity);
  }
  CHECK(r.infidelity <= coarse);
  CHECK(r.infidelity == Approx(run_protocol({ProtocolKind::Swap, g, r.t_opt}, LinkParams::make(g, 1.0, 50 * kPi))
                                   .infidelity)
                            .epsilon(1e-9));
}

TEST_CASE("STIRAP optimizer is deterministic and beats its own grid") {
  const double g = 0.5;
  const auto a = optimal_stirap(g);
  const auto b = optimal_stirap(g);
  CHECK(same(a, b));
  REQUIRE(a.converged);
  CHECK(std::abs(a.t_opt / resource_rule_duration(g) - 1.0) < 0.3);
  const double below = 2.0 + 0.25 * std::floor((a.t_opt - 2.0) / 0.25);
  CHECK(a.infidelity <= stirap_at(g, below).infidelity);
  CHECK(a.infidelity <= stirap_at(g, below + 0.25).infidelity);
  CHECK(same(optimal_swap(0.2), optimal_swap(0.2)));
}

TEST_CASE("STIRAP outperforms SWAP in the short-link regime") {
  for (double g : {0.05, 0.3, 1.0, 1.4}) {
    const auto st = optimal_stirap(g);
    const auto sw = optimal_swap(g);
    INFO("gamma0 tau = " << g << ": stirap " << st.infidelity << ", swap " << sw.infidelity);
    CHECK(st.infidelity < sw.infidelity);
  }
}

TEST_CASE("scan ordering and CZKM cross-check") {
  const std::vector<double> grid{1.0, 0.3};
  const std::vector<ProtocolKind> kinds{ProtocolKind::Czkm, ProtocolKind::Swap};
  const auto rs = scan_protocols(grid, kinds);
  REQUIRE(rs.size() == 4);
  CHECK(rs[0].gamma0_tau == 1.0);
  CHECK(rs[0].protocol == ProtocolKind::Czkm);
  CHECK(rs[1].protocol == ProtocolKind::Swap);
  CHECK(rs[2].gamma0_tau == 0.3);
  CHECK(rs[0].t_opt == 9.0);
  CHECK(rs[0].cross_check < 1e-6);
  CHECK(rs[0].infidelity == Approx(czkm_exact_error(1.0, 1.0, 9.0)));
  for (const auto& r : rs) {
    CHECK(r.infidelity >= 0.0);
    CHECK(r.infidelity <= 1.0);
    CHECK(r.t_opt > 0.0);
  }
}

TEST_CASE("crossover report structure") {
  const std::vector<double> grid{0.5, 2.5};
  const auto c = crossover_scan(grid);
  REQUIRE(c.points.size() == 2);
  CHECK(c.points[0].duration == Approx(9.0 / std::sqrt(0.5)));
  CHECK(c.points[0].stirap < c.points[0].czkm);
  CHECK(c.points[1].czkm < c.points[1].stirap);
  CHECK(c.crossover == 2.5);
  CHECK(c.clean_split);
}

TEST_CASE("loss records use the photon integral") {
  SweepOptions o;
  o.kappa_tau = 0.01;
  const auto r = optimal_swap(0.2, o);
  CHECK(r.loss == Approx(1 - std::exp(-0.01 * r.photon_integral)));
  CHECK(r.photon_integral > 0.0);
}

TEST_CASE("finite-detuning multimode evaluation stays within an order of magnitude") {
  const auto base = optimal_swap(0.1);
  for (double d : {50.0, 5.0, 1.0}) {
    SweepOptions o;
    o.delta_fsr = d;
    const auto w = ww_evaluate(base, o, {101, true});
    INFO("delta/fsr = " << d << ": dde " << base.infidelity << ", ww " << w.infidelity);
    CHECK(w.infidelity < 10 * base.infidelity);
    CHECK(w.infidelity > 0.1 * base.infidelity);
  }
}
