#include "msc99/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace msc99::analysis {

namespace {

void require_amplitudes(double c_eff, double s_eff) {
  if (!(c_eff > 0.0) || !(s_eff >= 0.0))
    throw std::invalid_argument("effective amplitudes out of range");
  if (std::abs(c_eff * c_eff + s_eff * s_eff - 1.0) > 1e-12)
    throw std::invalid_argument("effective amplitudes must be normalized");
}

double log_binomial(int q, int k) {
  return std::lgamma(q + 1.0) - std::lgamma(k + 1.0) - std::lgamma(q - k + 1.0);
}

// Compensated sum, largest magnitude first.
double kahan_sorted_sum(std::vector<double>& terms) {
  std::sort(terms.begin(), terms.end(),
            [](double a, double b) { return std::abs(a) > std::abs(b); });
  double sum = 0.0, comp = 0.0;
  for (double t : terms) {
    const double y = t - comp;
    const double v = sum + y;
    comp = (v - sum) - y;
    sum = v;
  }
  return sum;
}

}  // namespace

double pe_parity(int q, double c_eff, double s_eff) {
  if (q < 1) throw std::invalid_argument("q must be >= 1");
  require_amplitudes(c_eff, s_eff);
  const double two_cs = 2.0 * c_eff * s_eff;
  const double pow_q = two_cs > 0.0 ? std::exp(q * std::log(two_cs)) : 0.0;
  return (1.0 - pow_q) / 2.0;
}

double fidelity_parity(int q, double c_eff, double s_eff) {
  if (q < 1) throw std::invalid_argument("q must be >= 1");
  require_amplitudes(c_eff, s_eff);
  if (s_eff == 0.0) return 1.0;
  const double lc = 2.0 * std::log(c_eff);
  const double ls = 2.0 * std::log(s_eff);
  std::vector<double> terms;
  terms.reserve(q / 2 + 1);
  for (int k = 0; k <= q / 2; ++k) {
    const double lb = log_binomial(q, k);
    const double t1 = lb + (q - k) * lc + k * ls;
    const double t2 = lb + k * lc + (q - k) * ls;
    const double hi = std::max(t1, t2), lo = std::min(t1, t2);
    terms.push_back(std::exp(hi) * (1.0 - std::exp(lo - hi)));
  }
  return std::min(kahan_sorted_sum(terms), 1.0);
}

double binomial_overlap_form(int q, double t) {
  if (q < 1) throw std::invalid_argument("q must be >= 1");
  if (!(t > 0.0 && t < 1.0)) throw std::invalid_argument("t must lie in (0,1)");
  const double lt = std::log(t), l1t = std::log1p(-t);
  std::vector<double> terms;
  terms.reserve(q / 2 + 1);
  for (int k = 0; k <= q / 2; ++k)
    terms.push_back(std::exp(log_binomial(q, k) + k * lt + (q - k) * l1t));
  const double cdf = std::min(kahan_sorted_sum(terms), 1.0);
  return 2.0 * cdf - 1.0;
}

double gaussian_alpha(int q, double t) {
  if (q < 1) throw std::invalid_argument("q must be >= 1");
  if (!(t > 0.0 && t < 1.0)) throw std::invalid_argument("t must lie in (0,1)");
  const double num = q * (1.0 - 2.0 * t) * (1.0 - 2.0 * t);
  return std::sqrt(num / (4.0 * t * (1.0 - t)));
}

double fidelity_gaussian(double alpha) {
  if (alpha < 0.0) throw std::invalid_argument("alpha must be >= 0");
  return std::erf(alpha / std::sqrt(2.0));
}

double pe_complement_gaussian(double alpha) {
  if (alpha < 0.0) throw std::invalid_argument("alpha must be >= 0");
  return (1.0 + std::exp(-alpha * alpha / 2.0)) / 2.0;
}

double bias_bound_effective(int q_pe, int q_f, double c_eff, double s_eff) {
  if (q_pe < 0) throw std::invalid_argument("q_pe must be >= 0");
  const double pe = q_pe == 0 ? 0.0 : pe_parity(q_pe, c_eff, s_eff);
  const double f = fidelity_parity(q_f, c_eff, s_eff);
  return 0.5 * (1.0 - pe) * (1.0 + f * f);
}

double bias_lower_bound(const protocol::ProtocolParams& p) {
  if (p.l > p.m - 1)
    throw std::invalid_argument("bias bound needs l <= m-1");
  const protocol::EffectiveParams e = protocol::effective_params(p);
  const int q_pe = protocol::parity_length(p.l + 1, p.m);
  const int q_f = protocol::parity_length(p.l, p.m);
  return bias_bound_effective(q_pe, q_f, e.c_eff, e.s_eff);
}

double bias_from_K(double K) {
  if (!(K > 0.0 && K < 1.0)) throw std::invalid_argument("K must lie in (0,1)");
  const double e = std::erf(std::sqrt(-std::log(K)));
  return (1.0 + K) * (1.0 + e * e) / 4.0;
}

std::vector<BiasCurvePoint> curve(const std::vector<double>& k_grid) {
  std::vector<BiasCurvePoint> out;
  out.reserve(k_grid.size());
  for (double k : k_grid) {
    const double p0 = bias_from_K(k);
    out.push_back({k, p0, p0 - 0.5});
  }
  return out;
}

Optimum max_bias() {
  constexpr double kEps = 1e-9;
  // Coarse bracket.
  double best_k = 0.5, best_v = -1.0;
  for (int i = 1; i <= 999; ++i) {
    const double k = i / 1000.0;
    const double v = bias_from_K(k);
    if (v > best_v) { best_v = v; best_k = k; }
  }
  double lo = std::max(kEps, best_k - 1.0 / 1000.0);
  double hi = std::min(1.0 - kEps, best_k + 1.0 / 1000.0);

  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
  double f1 = bias_from_K(x1), f2 = bias_from_K(x2);
  while (hi - lo > 1e-7) {
    if (f1 < f2) {
      lo = x1; x1 = x2; f1 = f2;
      x2 = lo + gr * (hi - lo); f2 = bias_from_K(x2);
    } else {
      hi = x2; x2 = x1; f2 = f1;
      x1 = hi - gr * (hi - lo); f1 = bias_from_K(x1);
    }
  }
  Optimum o;
  o.K_star = (lo + hi) / 2.0;
  o.bias_star = bias_from_K(o.K_star) - 0.5;
  o.alpha_star = std::sqrt(-2.0 * std::log(o.K_star));
  return o;
}

OptimalL optimal_l(int m) {
  if (m < 2) throw std::invalid_argument("m must be >= 2");
  const double w = std::pow(std::cos(M_PI / 9.0), std::log2(static_cast<double>(m)));
  const double r = std::sqrt(1.0 - w * w);  // 2 c_eff s_eff
  const double k_star = max_bias().K_star;

  OptimalL o;
  o.l_real = std::log(k_star) / std::log(r);
  o.l_int = std::max(1, static_cast<int>(std::llround(o.l_real)));
  const double c_eff = std::sqrt((1.0 + w) / 2.0);
  const double s_eff = std::sqrt((1.0 - w) / 2.0);
  o.bias_at_int = bias_bound_effective(o.l_int - 1, o.l_int, c_eff, s_eff) - 0.5;
  return o;
}

}  // namespace msc99::analysis
