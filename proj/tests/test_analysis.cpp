#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "msc99/analysis.hpp"
#include "msc99/protocol.hpp"
#include "msc99/quantum.hpp"

using namespace msc99;
using namespace msc99::analysis;
using protocol::ProtocolParams;
using protocol::Representation;

namespace {

protocol::EffectiveParams eff(double c2, int n) {
  return protocol::effective_params(ProtocolParams::from_c2(c2, n, 2, 1));
}

}  // namespace

TEST_CASE("pe_parity against high-precision reference values") {
  // References computed with 40-digit arithmetic from
  // (1 - (2 c s)^q) / 2 at the effective amplitudes.
  auto e1 = eff(0.75, 1);
  CHECK(pe_parity(3, e1.c_eff, e1.s_eff) ==
        doctest::Approx(0.1752404735808355).epsilon(1e-12));
  auto e2 = eff(0.9, 2);
  CHECK(pe_parity(6, e2.c_eff, e2.s_eff) ==
        doctest::Approx(0.397101498368).epsilon(1e-12));
  // Degenerate lengths are rejected; the q_pe = 0 ("parity known") case
  // lives in bias_bound_effective, not here.
  CHECK_THROWS_AS((void)pe_parity(0, e1.c_eff, e1.s_eff), std::invalid_argument);
}

TEST_CASE("fidelity_parity against high-precision reference values") {
  auto e1 = eff(0.75, 1);
  CHECK(fidelity_parity(3, e1.c_eff, e1.s_eff) == doctest::Approx(0.6875).epsilon(1e-12));
  auto e2 = eff(0.9, 2);
  CHECK(fidelity_parity(6, e2.c_eff, e2.s_eff) ==
        doctest::Approx(0.9125853184).epsilon(1e-12));
  // Large q stays finite and inside [0, 1].
  double f = fidelity_parity(1000000, e1.c_eff, e1.s_eff);
  CHECK(f > 0.999);
  CHECK(f <= 1.0);
}

TEST_CASE("closed forms match the dense-matrix oracles on small mixtures") {
  // The full q <= 6, n <= 2 sweep runs in the acceptance gate; this covers
  // a fast subset through the same code path.
  for (double c2 : {0.6, 0.9}) {
    for (int q = 1; q <= 4; ++q) {
      auto p = ProtocolParams::from_c2(c2, 1, q, 1);
      auto e = protocol::effective_params(p);
      auto r0 = protocol::parity_mixture('B', 0, 1, p, Representation::kFull);
      auto r1 = protocol::parity_mixture('B', 1, 1, p, Representation::kFull);
      CHECK(quantum::helstrom_pe(r0.rho, r1.rho).first ==
            doctest::Approx(pe_parity(q, e.c_eff, e.s_eff)).epsilon(1e-9));
      CHECK(quantum::fidelity(r0.rho, r1.rho) ==
            doctest::Approx(fidelity_parity(q, e.c_eff, e.s_eff)).epsilon(1e-9));
    }
  }
}

TEST_CASE("binomial overlap form agrees with the fidelity sum at odd lengths") {
  for (double t : {0.1, 0.18, 0.25, 0.4}) {
    double se = std::sqrt(t), ce = std::sqrt(1 - t);
    for (int q = 1; q <= 9; q += 2)
      CHECK(binomial_overlap_form(q, t) ==
            doctest::Approx(fidelity_parity(q, ce, se)).epsilon(1e-9));
    // At even lengths the two differ by exactly the central binomial term.
    for (int q = 2; q <= 8; q += 2) {
      double central = std::exp(std::lgamma(q + 1) - 2 * std::lgamma(q / 2 + 1) +
                                0.5 * q * std::log(t * (1 - t)));
      CHECK(binomial_overlap_form(q, t) - fidelity_parity(q, ce, se) ==
            doctest::Approx(central).epsilon(1e-9));
    }
  }
}

TEST_CASE("gaussian approximation converges as q grows") {
  // Per-t errors are not individually monotone in q (at t = 0.4 the error
  // happens to nearly vanish at q = 25); the worst case over t is what
  // shrinks as q grows.
  double prev = 1e9;
  for (int q : {25, 100, 400}) {
    double worst = 0.0;
    for (double t : {0.2, 0.3, 0.4}) {
      double se = std::sqrt(t), ce = std::sqrt(1 - t);
      double err =
          std::abs(fidelity_parity(q, ce, se) - fidelity_gaussian(gaussian_alpha(q, t)));
      worst = std::max(worst, err);
      if (q == 400) CHECK(err <= 0.03);
    }
    CHECK(worst <= prev + 1e-12);
    prev = worst;
  }
  // alpha and the limit functions at a hand-checked point: t = 1/4 gives
  // alpha = sqrt(q/3).
  CHECK(gaussian_alpha(3, 0.25) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(fidelity_gaussian(0.0) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(pe_complement_gaussian(0.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(fidelity_gaussian(1e9) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("bias_from_K curve is above 1/2 on the interior") {
  std::vector<double> grid;
  for (int i = 1; i <= 999; ++i) grid.push_back(i / 1000.0);
  auto pts = curve(grid);
  REQUIRE(pts.size() == 999);
  for (const auto& pt : pts) {
    CHECK(pt.bias > 0.0);
    CHECK(pt.p0 == doctest::Approx(pt.bias + 0.5).epsilon(1e-15));
    CHECK(pt.p0 == doctest::Approx(bias_from_K(pt.K)).epsilon(1e-15));
  }
  // Limits: both endpoints collapse to a fair coin.
  CHECK(bias_from_K(1e-12) == doctest::Approx(0.5).epsilon(1e-5));
  CHECK(bias_from_K(1.0 - 1e-12) == doctest::Approx(0.5).epsilon(1e-5));
}

TEST_CASE("max_bias locates the curve maximum") {
  // Reference from a 40-digit stationary-point solve of the curve.
  auto opt = max_bias();
  CHECK(opt.K_star == doctest::Approx(0.5109639231575216).epsilon(1e-6));
  CHECK(opt.bias_star == doctest::Approx(0.0921961067561999).epsilon(1e-9));
  CHECK(opt.alpha_star == doctest::Approx(1.1588410518662866).epsilon(1e-6));
  // Consistency: alpha_star = sqrt(-2 ln K_star) and the value is attained.
  CHECK(opt.alpha_star == doctest::Approx(std::sqrt(-2 * std::log(opt.K_star))).epsilon(1e-12));
  CHECK(bias_from_K(opt.K_star) - 0.5 == doctest::Approx(opt.bias_star).epsilon(1e-12));
  // No grid point beats it.
  for (int i = 1; i <= 999; ++i)
    CHECK(bias_from_K(i / 1000.0) - 0.5 <= opt.bias_star + 1e-12);
}

TEST_CASE("bias_bound_effective composes the two closed forms") {
  auto e = eff(0.9, 1);
  // q_pe = 1, q_f = 2 at c^2 = 0.9: PE = 0.2, F = 0.8, bound =
  // (1 - 0.2)(1 + 0.64)/2 = 0.656 exactly.
  CHECK(bias_bound_effective(1, 2, e.c_eff, e.s_eff) == doctest::Approx(0.656).epsilon(1e-12));
  // Known parity (q_pe = 0) turns the first factor into 1.
  CHECK(bias_bound_effective(0, 2, e.c_eff, e.s_eff) == doctest::Approx(0.82).epsilon(1e-12));
}

TEST_CASE("bias_lower_bound maps protocol rounds to string lengths") {
  auto p = ProtocolParams::from_c2(0.9, 1, 2, 1);
  auto e = protocol::effective_params(p);
  CHECK(bias_lower_bound(p) ==
        doctest::Approx(bias_bound_effective(p.m - p.l, p.m - p.l + 1, e.c_eff, e.s_eff))
            .epsilon(1e-15));
  CHECK(bias_lower_bound(p) == doctest::Approx(0.656).epsilon(1e-12));
  // Exact value (1 + sqrt(3)/2) * 5/16: pe factor (1 + 2cs)/2 with
  // 2cs = sqrt(3)/2, fidelity c^2 - s^2 = 1/2.
  CHECK(bias_lower_bound(ProtocolParams::from_c2(0.75, 1, 2, 1)) ==
        doctest::Approx(0.5831329386826370).epsilon(1e-12));
  // l = m leaves no parity rounds; the bound needs l <= m - 1.
  CHECK_THROWS_AS((void)bias_lower_bound(ProtocolParams::from_c2(0.9, 1, 2, 2)),
                  std::invalid_argument);
}

TEST_CASE("the bound trades information against fidelity monotonically") {
  // As l grows, the PE factor (less to guess) rises and the fidelity
  // factor falls; each factor alone is monotone in l.
  const int m = 20;
  auto p0 = ProtocolParams::from_c2(0.95, 1, m, 1);
  auto e = protocol::effective_params(p0);
  for (int l = 2; l <= m - 1; ++l) {
    double pe_prev = pe_parity(m - (l - 1), e.c_eff, e.s_eff);
    double pe_cur = pe_parity(m - l, e.c_eff, e.s_eff);
    double f_prev = fidelity_parity(m - (l - 1) + 1, e.c_eff, e.s_eff);
    double f_cur = fidelity_parity(m - l + 1, e.c_eff, e.s_eff);
    CHECK(pe_cur <= pe_prev + 1e-12);  // less error guessing fewer bits
    CHECK(f_cur <= f_prev + 1e-12);    // fewer rounds left to steer with
  }
}

TEST_CASE("optimal_l for the suggested parameter family") {
  // References from an exhaustive integer sweep of the exact bound.
  for (int m : {20, 40, 80}) {
    auto opt = optimal_l(m);
    CHECK(opt.l_int >= 1);
    CHECK(opt.l_int == std::max(1, (int)std::llround(opt.l_real)));
    // The integer point from the curve maximizer is within one grid step
    // of the exact sweep's argmax.
    double w = std::pow(std::cos(M_PI / 9), std::log2((double)m));
    double ce = std::sqrt((1 + w) / 2), se = std::sqrt((1 - w) / 2);
    int best_q = 1;
    double best = -1;
    for (int q = 1; q <= m - 1; ++q) {
      double b = bias_bound_effective(q - 1, q, ce, se) - 0.5;
      if (b > best) {
        best = b;
        best_q = q;
      }
    }
    CHECK(std::abs(opt.l_int - best_q) <= 1);
    CHECK(opt.bias_at_int == doctest::Approx(bias_bound_effective(opt.l_int - 1, opt.l_int,
                                                                  ce, se) -
                                             0.5)
                                 .epsilon(1e-12));
    // The integer sweep is not strictly unimodal: the fidelity factor is
    // flat across even lengths (the central sum term vanishes), which
    // puts a sawtooth on top of the decay. What does hold: the global
    // maximum sits at the front, and each parity subsequence decreases
    // monotonically past it.
    for (int q = best_q + 2; q <= m - 1; ++q)
      CHECK(bias_bound_effective(q - 1, q, ce, se) <=
            bias_bound_effective(q - 3, q - 2, ce, se) + 1e-12);
    for (int q = 1; q <= m - 1; ++q)
      CHECK(bias_bound_effective(q - 1, q, ce, se) <= best + 0.5 + 1e-12);
  }
  CHECK(optimal_l(20).l_real == doctest::Approx(1.530681).epsilon(1e-5));
  CHECK(optimal_l(40).l_real == doctest::Approx(1.851739).epsilon(1e-5));
  CHECK(optimal_l(80).l_real == doctest::Approx(2.209510).epsilon(1e-5));
}
