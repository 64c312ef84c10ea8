#pragma once

#include <vector>

#include "msc99/protocol.hpp"

// Closed-form and asymptotic analysis of the cheating-Bob* attack: the
// parity-guessing error and fidelity formulas, their Gaussian/Erf
// approximations, the knowledge-parametrized bias curve and its maximum,
// and the optimal attack round. All formulas take the explicit string
// length q; mapping a protocol round l to q is done by the caller via
// protocol::parity_length.

namespace msc99::analysis {

// Minimum error probability for guessing the parity of q bits committed
// with effective amplitudes (c_eff, s_eff): (1 - (2 c_eff s_eff)^q) / 2.
double pe_parity(int q, double c_eff, double s_eff);

// Fidelity between the two parity mixtures over q bits:
// sum_k C(q,k) |c^{2(q-k)} s^{2k} - c^{2k} s^{2(q-k)}|, k = 0..floor(q/2).
// Binomials are evaluated in log space; safe up to q = 10^6.
double fidelity_parity(int q, double c_eff, double s_eff);

// The binomial-CDF form of the same overlap, 2 P(Bin(q,t) <= floor(q/2)) - 1.
// Agrees with fidelity_parity for odd q; for even q it counts the central
// term once where the fidelity sum drops it, so the two differ by
// C(q,q/2) (t(1-t))^{q/2}.
double binomial_overlap_form(int q, double t);

// alpha = sqrt(q (1-2t)^2 / (4 t (1-t))); the normal-approximation
// parameter of the parity-fidelity sum.
double gaussian_alpha(int q, double t);

// Erf(alpha / sqrt 2): the q -> infinity limit of fidelity_parity.
double fidelity_gaussian(double alpha);

// (1 + e^{-alpha^2/2}) / 2: lower bound on the parity-guess success.
double pe_complement_gaussian(double alpha);

// Lower bound on p(X = target) achieved by the attack, from the exact
// closed forms at explicit string lengths: q_pe parity bits to guess and
// q_f rounds available for steering. q_pe = 0 means the parity is known.
double bias_bound_effective(int q_pe, int q_f, double c_eff, double s_eff);

// The same bound for a protocol configuration: q_pe = L(l+1) = m - l,
// q_f = L(l) = m - l + 1, at the effective params. Requires l <= m - 1.
double bias_lower_bound(const protocol::ProtocolParams& p);

// p(X=0) on the asymptotic knowledge curve:
// (1 + K)(1 + Erf(sqrt(-ln K))^2) / 4, K in (0,1).
double bias_from_K(double K);

struct BiasCurvePoint {
  double K;
  double p0;
  double bias;  // p0 - 1/2
};
std::vector<BiasCurvePoint> curve(const std::vector<double>& k_grid);

struct Optimum {
  double K_star;
  double bias_star;   // max of bias_from_K minus 1/2
  double alpha_star;  // sqrt(-2 ln K_star)
};

// Coarse 999-point scan followed by golden-section search to 1e-7 in K.
Optimum max_bias();

struct OptimalL {
  double l_real;       // real-valued count of unrevealed rounds at attack time
  int l_int;           // nearest integer (at least 1)
  double bias_at_int;  // exact closed-form bias (bound - 1/2) at l_int
};

// Optimal attack timing for the suggested parameter family
// c^2 - s^2 = cos(pi/9), n = log2 m: the unrevealed-round count at which
// the knowledge parameter K reaches the curve's maximizer.
OptimalL optimal_l(int m);

}  // namespace msc99::analysis
