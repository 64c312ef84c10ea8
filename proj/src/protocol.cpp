#include "msc99/protocol.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <nlohmann/json.hpp>
#include <stdexcept>

namespace msc99::protocol {

namespace {

using json = nlohmann::ordered_json;
using linalg::Cx;
using linalg::Matrix;
using linalg::Vector;

int parity_of(const std::vector<int>& bits) {
  int p = 0;
  for (int b : bits) p ^= b;
  return p;
}

int require_bit(int b, const char* what) {
  if (b != 0 && b != 1) throw std::invalid_argument(std::string(what) + " must be 0 or 1");
  return b;
}

// <Psi_x|Psi_y> over the product blocks only (register handled by callers).
double block_gram(const JointState::Branch& x, const JointState::Branch& y, double ov) {
  double g = 1.0;
  for (std::size_t r = 0; r < x.ba.size(); ++r) {
    if (x.ba[r] != y.ba[r]) g *= ov;
    if (x.bab[r] != y.bab[r]) g *= ov;
  }
  return g;
}

}  // namespace

Trit trit_from_bit(int b) {
  require_bit(b, "trit bit");
  return b == 0 ? Trit::kZero : Trit::kOne;
}

Trit trit_xor(Trit a, Trit b) {
  if (a == Trit::kAbort || b == Trit::kAbort) return Trit::kAbort;
  return (a == b) ? Trit::kZero : Trit::kOne;
}

std::string trit_to_string(Trit t) {
  switch (t) {
    case Trit::kZero: return "0";
    case Trit::kOne: return "1";
    default: return "abort";
  }
}

Trit trit_from_string(const std::string& s) {
  if (s == "0") return Trit::kZero;
  if (s == "1") return Trit::kOne;
  if (s == "abort") return Trit::kAbort;
  throw std::invalid_argument("bad trit: " + s);
}

ProtocolParams::ProtocolParams(double c_, double s_, int n_, int m_, int l_)
    : c(c_), s(s_), n(n_), m(m_), l(l_) {
  if (!(c > 0.0) || !(s > 0.0)) throw std::invalid_argument("amplitudes must be positive");
  if (std::abs(c * c + s * s - 1.0) > 1e-12)
    throw std::invalid_argument("c^2 + s^2 must be 1");
  if (n < 1) throw std::invalid_argument("n must be >= 1");
  if (m < 1) throw std::invalid_argument("m must be >= 1");
  if (l < 1 || l > m) throw std::invalid_argument("l must satisfy 1 <= l <= m");
}

ProtocolParams ProtocolParams::from_c2(double c2, int n, int m, int l) {
  if (!(c2 > 0.0 && c2 < 1.0)) throw std::invalid_argument("c^2 must lie in (0,1)");
  return ProtocolParams(std::sqrt(c2), std::sqrt(1.0 - c2), n, m, l);
}

EffectiveParams effective_params(const ProtocolParams& p) {
  const double w = std::pow(p.c * p.c - p.s * p.s, p.n);
  EffectiveParams e;
  e.c_eff = std::sqrt((1.0 + w) / 2.0);
  e.s_eff = std::sqrt((1.0 - w) / 2.0);
  e.t = e.s_eff * e.s_eff;
  return e;
}

std::string representation_name(Representation rep) {
  return rep == Representation::kCompressed ? "compressed" : "full";
}

Representation representation_from_name(const std::string& name) {
  if (name == "compressed") return Representation::kCompressed;
  if (name == "full") return Representation::kFull;
  throw std::invalid_argument("bad representation: " + name);
}

int parity_length(int k, int m) {
  if (k < 1 || k > m) throw std::invalid_argument("parity start index out of range");
  return m - k + 1;
}

quantum::StateVector psi(int b, const ProtocolParams& p) {
  require_bit(b, "psi bit");
  Vector v(2);
  v << p.c, (b == 0 ? p.s : -p.s);
  return quantum::StateVector(std::move(v), {2});
}

quantum::StateVector phi(int b, const ProtocolParams& p, Representation rep) {
  require_bit(b, "phi bit");
  if (rep == Representation::kCompressed) {
    const EffectiveParams e = effective_params(p);
    Vector v(2);
    v << e.c_eff, (b == 0 ? e.s_eff : -e.s_eff);
    return quantum::StateVector(std::move(v), {2});
  }
  const quantum::StateVector q = psi(b, p);
  Vector v = q.amplitudes;
  for (int i = 1; i < p.n; ++i) v = linalg::kron(v, q.amplitudes);
  return quantum::StateVector(std::move(v), {1 << p.n});
}

int block_dim(const ProtocolParams& p, Representation rep) {
  return rep == Representation::kCompressed ? 2 : (1 << p.n);
}

quantum::Povm check_povm(int b, const ProtocolParams& p, Representation rep) {
  const quantum::StateVector f = phi(b, p, rep);
  Matrix e = f.amplitudes * f.amplitudes.adjoint();
  std::vector<quantum::PovmElement> elems;
  elems.push_back({std::to_string(b), e});
  elems.push_back({"abort", Matrix::Identity(e.rows(), e.cols()) - e});
  return quantum::Povm(std::move(elems));
}

ParityMixture parity_mixture(char party, int b, int k, const ProtocolParams& p,
                             Representation rep) {
  if (party != 'A' && party != 'B') throw std::invalid_argument("party must be A or B");
  require_bit(b, "parity bit");
  const int len = parity_length(k, p.m);
  const quantum::StateVector f0 = phi(0, p, rep);
  const quantum::StateVector f1 = phi(1, p, rep);
  const int d = block_dim(p, rep);
  long long dim = 1;
  for (int i = 0; i < len; ++i) dim *= d;

  // Stack the fixed-parity product vectors as columns; the mixture is then
  // a single rank-revealing Gram product.
  const long long count = len == 1 ? 1 : (1LL << (len - 1));
  Matrix cols(dim, count);
  long long written = 0;
  for (long long bits = 0; bits < (1LL << len); ++bits) {
    if (std::popcount(static_cast<unsigned long long>(bits)) % 2 != b) continue;
    Vector v = (bits >> (len - 1)) & 1 ? f1.amplitudes : f0.amplitudes;
    for (int j = len - 2; j >= 0; --j)
      v = linalg::kron(v, ((bits >> j) & 1) ? f1.amplitudes : f0.amplitudes);
    cols.col(written++) = v;
  }
  if (written != count) throw std::logic_error("parity string count mismatch");
  Matrix rho = cols * cols.adjoint() / static_cast<double>(count);
  rho = (rho + Matrix(rho.adjoint())) / 2.0;
  return ParityMixture{party, b, k,
                       quantum::DensityMatrix(std::move(rho), std::vector<int>(len, d))};
}

// ---------------------------------------------------------------------------
// JointState

JointState::JointState(const ProtocolParams& p, Representation r)
    : params(p), rep(r) {
  overlap = phi(0, p, rep).amplitudes.dot(phi(1, p, rep).amplitudes).real();
  rounds.resize(p.m);
  for (int j = 0; j < p.m; ++j) rounds[j] = j + 1;
  const long long count = 1LL << p.m;
  const double amp = 1.0 / std::sqrt(static_cast<double>(count));
  branches.reserve(count);
  for (long long bits = 0; bits < count; ++bits) {
    Branch br;
    br.ba.resize(p.m);
    br.bab.resize(p.m);
    br.reg.resize(p.m);
    for (int j = 0; j < p.m; ++j) {
      const int bj = static_cast<int>((bits >> (p.m - 1 - j)) & 1);
      br.ba[j] = bj;
      br.bab[j] = 1 - bj;
      br.reg[j] = bj;
    }
    br.amp = amp;
    branches.push_back(std::move(br));
  }
}

int JointState::round_pos(int round) const {
  auto it = std::find(rounds.begin(), rounds.end(), round);
  if (it == rounds.end()) throw std::invalid_argument("round no longer held");
  return static_cast<int>(it - rounds.begin());
}

namespace {

// Sum of conj(amp_i) amp_j <branch_i|branch_j> over a subset, honoring
// register orthogonality.
double subset_norm2(const JointState& js, const std::vector<int>& idx) {
  // Group by register string; distinct strings are orthogonal.
  std::map<std::vector<int>, std::vector<int>> groups;
  for (int i : idx) groups[js.branches[i].reg].push_back(i);
  Cx acc = 0.0;
  for (const auto& [reg, members] : groups)
    for (int i : members)
      for (int j : members)
        acc += std::conj(js.branches[i].amp) * js.branches[j].amp *
               block_gram(js.branches[i], js.branches[j], js.overlap);
  return acc.real();
}

std::vector<int> all_indices(const JointState& js) {
  std::vector<int> idx(js.branches.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<int>(i);
  return idx;
}

// Keeps the selected branches and renormalizes, so norm2() == 1 stays an
// invariant across collapsing measurements.
void keep_branches(JointState& js, const std::vector<int>& idx) {
  std::vector<JointState::Branch> kept;
  kept.reserve(idx.size());
  for (int i : idx) kept.push_back(std::move(js.branches[i]));
  js.branches = std::move(kept);
  const double nn = js.norm2();
  if (nn > 0.0)
    for (auto& br : js.branches) br.amp /= std::sqrt(nn);
}

}  // namespace

double JointState::norm2() const { return subset_norm2(*this, all_indices(*this)); }

int JointState::measure_register_bit(int round, Rng& rng, double* prob_out) {
  const int pos = round_pos(round);
  std::vector<int> zero, one;
  for (std::size_t i = 0; i < branches.size(); ++i)
    (branches[i].reg[pos] == 0 ? zero : one).push_back(static_cast<int>(i));
  const double total = norm2();
  const double p0 = subset_norm2(*this, zero) / total;
  const int bit = rng.uniform() < p0 ? 0 : 1;
  if (prob_out) *prob_out = bit == 0 ? p0 : 1.0 - p0;
  keep_branches(*this, bit == 0 ? zero : one);
  return bit;
}

int JointState::measure_parity(Rng& rng, double* prob_out) {
  std::vector<int> even, odd;
  for (std::size_t i = 0; i < branches.size(); ++i)
    (parity_of(branches[i].reg) == 0 ? even : odd).push_back(static_cast<int>(i));
  const double total = norm2();
  const double p0 = subset_norm2(*this, even) / total;
  const int f = rng.uniform() < p0 ? 0 : 1;
  if (prob_out) *prob_out = f == 0 ? p0 : 1.0 - p0;
  keep_branches(*this, f == 0 ? even : odd);
  return f;
}

double JointState::project_ba(int round, int bit) {
  require_bit(bit, "projection bit");
  const int pos = round_pos(round);
  const double before = norm2();
  for (Branch& br : branches) {
    if (br.ba[pos] != bit) {
      br.amp *= overlap;
      br.ba[pos] = bit;
    }
  }
  const double after = norm2();
  return before > 0.0 ? after / before : 0.0;
}

void JointState::drop_round(int round) {
  const int pos = round_pos(round);
  for (const Branch& br : branches) {
    if (br.ba[pos] != branches.front().ba[pos] ||
        br.bab[pos] != branches.front().bab[pos] ||
        (!br.reg.empty() && br.reg[pos] != branches.front().reg[pos]))
      throw std::logic_error("dropping a round that is not fully collapsed");
  }
  rounds.erase(rounds.begin() + pos);
  for (Branch& br : branches) {
    br.ba.erase(br.ba.begin() + pos);
    br.bab.erase(br.bab.begin() + pos);
    if (!br.reg.empty()) br.reg.erase(br.reg.begin() + pos);
  }
}

// ---------------------------------------------------------------------------
// Steering

namespace {

int reg_index(const std::vector<int>& bits) {
  int idx = 0;
  for (int b : bits) idx = (idx << 1) | b;
  return idx;
}

std::vector<int> index_bits(int idx, int q) {
  std::vector<int> bits(q);
  for (int j = 0; j < q; ++j) bits[j] = (idx >> (q - 1 - j)) & 1;
  return bits;
}

}  // namespace

namespace {

std::vector<int> parity_strings(int q, int parity) {
  std::vector<int> out;
  out.reserve(1 << (q - 1));
  for (int b = 0; b < (1 << q); ++b)
    if (std::popcount(static_cast<unsigned>(b)) % 2 == parity) out.push_back(b);
  return out;
}

}  // namespace

Matrix steering_unitary(const ProtocolParams& p, int F, double* success) {
  require_bit(F, "parity F");
  const int q = parity_length(p.l, p.m);
  // Block overlap <Phi(0)|Phi(1)> = (c^2 - s^2)^n, evaluated analytically
  // so both representations see a bit-identical matrix. That matters when
  // the cross-overlap operator is singular (it is whenever q = 2): the
  // polar factor is only unique up to its kernel, and last-ulp input
  // differences would otherwise steer the two representations onto
  // different (equally optimal) completions.
  const double w = std::pow(p.c * p.c - p.s * p.s, p.n);
  const std::vector<int> sf = parity_strings(q, F);
  const std::vector<int> sg = parity_strings(q, 1 - F);
  const int n = static_cast<int>(sf.size());

  // In the orthonormal cheater-side bases {|C_b>|b>} the cross-overlap
  // operator between the two branch sums reduces to Alice-block overlaps:
  // K(a,c) = (1/N) w^{hamming(sf[a], sg[c])}. The optimal unitary's
  // support block is the polar factor of K, attaining sum of singular
  // values = the fidelity of the reduced parity mixtures.
  Matrix k(n, n);
  for (int a = 0; a < n; ++a)
    for (int c = 0; c < n; ++c)
      k(a, c) = std::pow(w, std::popcount(static_cast<unsigned>(sf[a] ^ sg[c]))) / n;
  const linalg::Svd sv = linalg::svd(k);
  if (success) {
    const double overlap = sv.singular_values.sum();
    *success = overlap * overlap;
  }
  // T(c,a) = <C_{sg[c]}, sg[c]| U* |C_{sf[a]}, sf[a]>, maximizing
  // sum_{a,c} K(a,c) T(c,a) = tr(K T).
  return sv.v * sv.u.adjoint();
}

SteerOutcome steer(JointState& joint, int F, bool want_flip, Rng& rng,
                   const Matrix* cached_unitary) {
  require_bit(F, "parity F");
  const int q = static_cast<int>(joint.rounds.size());
  if (q != parity_length(joint.params.l, joint.params.m))
    throw std::invalid_argument("joint state does not cover rounds l..m");
  const int dim = 1 << q;

  // Normalize in place so group norms read as Born probabilities.
  const double nn = joint.norm2();
  for (auto& br : joint.branches) br.amp /= std::sqrt(nn);

  SteerOutcome out;
  out.used_fallback = false;

  if (!want_flip) {
    // Register-basis measurement restricted to the parity-F support.
    std::map<std::vector<int>, std::vector<int>> groups;
    for (std::size_t i = 0; i < joint.branches.size(); ++i)
      groups[joint.branches[i].reg].push_back(static_cast<int>(i));
    const double x = rng.uniform();
    double acc = 0.0;
    auto it = groups.begin();
    for (; it != groups.end(); ++it) {
      const double pr = subset_norm2(joint, it->second);
      acc += pr;
      if (x < acc || std::next(it) == groups.end()) {
        out.announced = it->first;
        out.prob = pr;
        keep_branches(joint, it->second);
        return out;
      }
    }
    throw std::logic_error("register measurement fell through");
  }

  const Matrix t =
      cached_unitary ? *cached_unitary : steering_unitary(joint.params, F, nullptr);
  const int other = 1 - F;
  const std::vector<int> sf = parity_strings(q, F);
  const std::vector<int> sg = parity_strings(q, other);
  const int nb = static_cast<int>(joint.branches.size());

  // Column index of each branch in the steering block (its register
  // string's position among the ascending parity-F strings).
  std::vector<int> col(nb);
  for (int i = 0; i < nb; ++i) {
    const int r = reg_index(joint.branches[i].reg);
    const auto it = std::lower_bound(sf.begin(), sf.end(), r);
    if (it == sf.end() || *it != r)
      throw std::invalid_argument("joint state register has the wrong parity");
    col[i] = static_cast<int>(it - sf.begin());
  }

  // After U*_B the cheater's side lies entirely on the opposite-parity
  // strings; outcome c has p = v_c^H G v_c with v_c(i) = T(c, col_i) and
  // G the Alice-block Gram of the branches.
  Matrix g(nb, nb);
  for (int i = 0; i < nb; ++i)
    for (int j = 0; j < nb; ++j) {
      double ov = 1.0;
      for (std::size_t r = 0; r < joint.branches[i].ba.size(); ++r)
        if (joint.branches[i].ba[r] != joint.branches[j].ba[r]) ov *= joint.overlap;
      g(i, j) = std::conj(joint.branches[i].amp) * joint.branches[j].amp * ov;
    }
  const int n_out = static_cast<int>(sg.size());
  Eigen::VectorXd probs(n_out);
  for (int c = 0; c < n_out; ++c) {
    Cx acc = 0.0;
    for (int i = 0; i < nb; ++i)
      for (int j = 0; j < nb; ++j)
        acc += std::conj(t(c, col[i])) * t(c, col[j]) * g(i, j);
    probs[c] = acc.real();
  }
  const double rem = std::max(0.0, 1.0 - probs.sum());

  const double x = rng.uniform();
  double acc = 0.0;
  for (int c = 0; c < n_out; ++c) {
    acc += probs[c];
    // The remainder element (identity minus the listed projectors) fires
    // with probability 0 on this state; residual numerical mass is folded
    // into the last listed outcome.
    if (x < acc || (c + 1 == n_out && rem <= 1e-12)) {
      const std::vector<int> bhat = index_bits(sg[c], q);
      for (int i = 0; i < nb; ++i) {
        joint.branches[i].amp *= t(c, col[i]);
        joint.branches[i].reg = bhat;
        for (std::size_t r = 0; r < joint.branches[i].bab.size(); ++r)
          joint.branches[i].bab[r] = 1 - bhat[r];
      }
      out.announced = bhat;
      out.prob = probs[c];
      return out;
    }
  }

  // Remainder outcome: the cheater's side has no support left, so the
  // post-measurement state is null and every later check fails; announce
  // the uniformly random opposite-parity string the protocol prescribes.
  for (auto& br : joint.branches) br.amp = 0.0;
  out.used_fallback = true;
  out.prob = rem;
  out.announced.resize(q);
  int par = 0;
  for (int j = 1; j < q; ++j) {
    out.announced[j] = rng.bit();
    par ^= out.announced[j];
  }
  out.announced[0] = par ^ other;
  return out;
}

// ---------------------------------------------------------------------------
// Flat state construction (test-sized instances)

quantum::StateVector eta_flat(const ProtocolParams& p, Representation rep,
                              std::optional<int> parity_F) {
  const int q = parity_length(p.l, p.m);
  const int d = block_dim(p, rep);
  const int reg_dim = 1 << q;
  const quantum::StateVector f0 = phi(0, p, rep);
  const quantum::StateVector f1 = phi(1, p, rep);

  long long flat = reg_dim;
  for (int j = 0; j < 2 * q; ++j) flat *= d;
  long long cheater_dim = reg_dim;
  for (int j = 0; j < q; ++j) cheater_dim *= d;
  Vector total = Vector::Zero(flat);
  int count = 0;
  for (int b = 0; b < reg_dim; ++b) {
    const int par = std::popcount(static_cast<unsigned>(b)) % 2;
    if (parity_F && par != *parity_F) continue;
    ++count;
    Vector alice = Vector::Ones(1);
    Vector cheater = Vector::Ones(1);
    for (int j = 0; j < q; ++j) {
      const int bj = (b >> (q - 1 - j)) & 1;
      alice = linalg::kron(alice, bj ? f1.amplitudes : f0.amplitudes);
      cheater = linalg::kron(cheater, bj ? f0.amplitudes : f1.amplitudes);
    }
    Vector reg = Vector::Zero(reg_dim);
    reg[b] = 1.0;
    total += linalg::kron(alice, linalg::kron(cheater, reg));
  }
  total /= std::sqrt(static_cast<double>(count));
  std::vector<int> dims(q, d);
  dims.push_back(static_cast<int>(cheater_dim));
  return quantum::StateVector(std::move(total), std::move(dims));
}

// ---------------------------------------------------------------------------
// Transcript serialization

namespace {

std::vector<std::string> trits_to_strings(const std::vector<Trit>& ts) {
  std::vector<std::string> out;
  out.reserve(ts.size());
  for (Trit t : ts) out.push_back(trit_to_string(t));
  return out;
}

std::vector<Trit> trits_from_strings(const std::vector<std::string>& ss) {
  std::vector<Trit> out;
  out.reserve(ss.size());
  for (const auto& s : ss) out.push_back(trit_from_string(s));
  return out;
}

}  // namespace

std::string transcript_to_json(const Transcript& t) {
  json j;
  j["mode"] = t.mode;
  j["c2"] = t.c2;
  j["n"] = t.n;
  j["m"] = t.m;
  j["l"] = t.l;
  j["rep"] = t.rep;
  j["seed"] = t.seed;
  j["rng"] = {{"algorithm", Rng::kAlgorithm}, {"version", Rng::kVersion}};
  if (t.target) j["target"] = *t.target;
  j["a"] = t.a;
  j["b"] = t.b;
  j["c"] = t.c;
  j["d"] = t.d;
  j["e"] = t.e;
  j["f"] = t.f;
  j["a_check"] = trits_to_strings(t.a_check);
  j["b_check"] = trits_to_strings(t.b_check);
  j["step5_alice"] = trits_to_strings(t.step5_alice);
  j["step5_bob"] = trits_to_strings(t.step5_bob);
  if (t.a2_tilde) j["A_tilde"] = *t.a2_tilde;
  if (t.f_parity) j["F"] = *t.f_parity;
  if (t.x_tilde) j["X_tilde"] = *t.x_tilde;
  j["probs"] = t.probs;
  j["result"] = trit_to_string(t.result);
  return j.dump();
}

Transcript transcript_from_json(const std::string& line) {
  const json j = json::parse(line);
  Transcript t;
  t.mode = j.at("mode").get<std::string>();
  t.c2 = j.at("c2").get<double>();
  t.n = j.at("n").get<int>();
  t.m = j.at("m").get<int>();
  t.l = j.at("l").get<int>();
  t.rep = j.at("rep").get<std::string>();
  t.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("target")) t.target = j.at("target").get<int>();
  t.a = j.at("a").get<std::vector<int>>();
  t.b = j.at("b").get<std::vector<int>>();
  t.c = j.at("c").get<std::vector<std::vector<int>>>();
  t.d = j.at("d").get<std::vector<std::vector<int>>>();
  t.e = j.at("e").get<std::vector<std::vector<int>>>();
  t.f = j.at("f").get<std::vector<std::vector<int>>>();
  t.a_check = trits_from_strings(j.at("a_check").get<std::vector<std::string>>());
  t.b_check = trits_from_strings(j.at("b_check").get<std::vector<std::string>>());
  t.step5_alice = trits_from_strings(j.at("step5_alice").get<std::vector<std::string>>());
  t.step5_bob = trits_from_strings(j.at("step5_bob").get<std::vector<std::string>>());
  if (j.contains("A_tilde")) t.a2_tilde = j.at("A_tilde").get<int>();
  if (j.contains("F")) t.f_parity = j.at("F").get<int>();
  if (j.contains("X_tilde")) t.x_tilde = j.at("X_tilde").get<int>();
  t.probs = j.at("probs").get<std::vector<double>>();
  t.result = trit_from_string(j.at("result").get<std::string>());
  return t;
}

Trit verify_result(const Transcript& t) {
  auto any_abort = [](const std::vector<Trit>& v) {
    return std::find(v.begin(), v.end(), Trit::kAbort) != v.end();
  };
  if (any_abort(t.a_check) || any_abort(t.b_check) || any_abort(t.step5_alice) ||
      any_abort(t.step5_bob))
    return Trit::kAbort;

  const bool honest = t.mode == "honest";
  const std::size_t want_a = honest ? t.m : t.l;
  if (t.a_check.size() != want_a || t.b_check.size() != static_cast<std::size_t>(t.m))
    throw std::invalid_argument("incomplete transcript");

  Trit x = Trit::kZero;
  for (Trit v : t.a_check) x = trit_xor(x, v);
  if (!honest)
    for (int j = t.l; j < t.m; ++j) x = trit_xor(x, trit_from_bit(t.a.at(j)));
  for (Trit v : t.b_check) x = trit_xor(x, v);
  return x;
}

// ---------------------------------------------------------------------------
// Protocol runs

namespace {

std::vector<int> random_bits(int count, Rng& rng) {
  std::vector<int> out(count);
  for (int& b : out) b = rng.bit();
  return out;
}

std::vector<std::vector<int>> random_bit_matrix(int m, int n, Rng& rng) {
  std::vector<std::vector<int>> out(m);
  for (auto& row : out) row = random_bits(n, rng);
  return out;
}

std::vector<std::vector<int>> xor_rows(const std::vector<int>& bits,
                                       const std::vector<std::vector<int>>& mat) {
  std::vector<std::vector<int>> out = mat;
  for (std::size_t j = 0; j < out.size(); ++j)
    for (int& v : out[j]) v ^= bits[j];
  return out;
}

// Executes one verification POVM on a held product block; records the
// outcome probability and returns the trit result.
Trit run_check(int announced, const ProtocolParams& p, Representation rep,
               const quantum::Povm& povm, Rng& rng, std::vector<double>& probs) {
  const quantum::MeasurementSample s = quantum::measure(phi(announced, p, rep), povm, rng);
  probs.push_back(s.probability);
  return s.label == "abort" ? Trit::kAbort : trit_from_bit(announced);
}

}  // namespace

Transcript run_honest(const ProtocolParams& p, std::uint64_t seed, Representation rep) {
  Rng rng(seed);
  Transcript t;
  t.mode = "honest";
  t.c2 = p.c2();
  t.n = p.n;
  t.m = p.m;
  t.l = p.l;
  t.rep = representation_name(rep);
  t.seed = seed;

  // Step 1-2 randomness, Alice first then Bob.
  t.a = random_bits(p.m, rng);
  t.c = random_bit_matrix(p.m, p.n, rng);
  t.b = random_bits(p.m, rng);
  t.d = random_bit_matrix(p.m, p.n, rng);
  // Step 3 announcements; the qubit swaps leave Alice with Phi(b_j) blocks
  // and Bob with Phi(a_j) blocks.
  t.e = xor_rows(t.a, t.c);
  t.f = xor_rows(t.b, t.d);

  const quantum::Povm check[2] = {check_povm(0, p, rep), check_povm(1, p, rep)};

  // Step 4: both parties open and verify round by round.
  bool aborted = false;
  for (int j = 0; j < p.m && !aborted; ++j) {
    const Trit ta = run_check(t.a[j], p, rep, check[t.a[j]], rng, t.probs);
    t.a_check.push_back(ta);
    if (ta == Trit::kAbort) { aborted = true; break; }
    const Trit tb = run_check(t.b[j], p, rep, check[t.b[j]], rng, t.probs);
    t.b_check.push_back(tb);
    if (tb == Trit::kAbort) aborted = true;
  }

  // Step 5: both parties check the blocks returned to them.
  for (int j = 0; j < p.m && !aborted; ++j) {
    const Trit ta = run_check(1 - t.a[j], p, rep, check[1 - t.a[j]], rng, t.probs);
    t.step5_alice.push_back(ta);
    if (ta == Trit::kAbort) { aborted = true; break; }
    const Trit tb = run_check(1 - t.b[j], p, rep, check[1 - t.b[j]], rng, t.probs);
    t.step5_bob.push_back(tb);
    if (tb == Trit::kAbort) aborted = true;
  }

  if (aborted) {
    t.result = Trit::kAbort;
    return t;
  }
  t.result = verify_result(t);
  return t;
}

AttackContext::AttackContext(const ProtocolParams& p, Representation r)
    : params(p), rep(r) {
  check.push_back(check_povm(0, p, r));
  check.push_back(check_povm(1, p, r));
  if (p.l < p.m) {
    const ParityMixture rho0 = parity_mixture('B', 0, p.l + 1, p, r);
    const ParityMixture rho1 = parity_mixture('B', 1, p.l + 1, p, r);
    parity_helstrom = quantum::helstrom_pe(rho0.rho, rho1.rho).second;
  }
  for (int f = 0; f < 2; ++f) steer_u[f] = steering_unitary(p, f, &steer_success[f]);
}

Transcript run_attack(const AttackContext& ctx, int target, std::uint64_t seed) {
  require_bit(target, "target");
  const ProtocolParams& p = ctx.params;
  const Representation rep = ctx.rep;
  Rng rng(seed);

  Transcript t;
  t.mode = "attack";
  t.c2 = p.c2();
  t.n = p.n;
  t.m = p.m;
  t.l = p.l;
  t.rep = representation_name(rep);
  t.seed = seed;
  t.target = target;

  t.a = random_bits(p.m, rng);
  t.c = random_bit_matrix(p.m, p.n, rng);
  t.d = random_bit_matrix(p.m, p.n, rng);  // Bob*'s blinding bits
  t.e = xor_rows(t.a, t.c);
  t.f = t.d;  // Bob* announces f_ij = d_ij
  t.b.assign(p.m, 0);

  JointState js(p, rep);
  bool aborted = false;

  // Step 4A: rounds 1..l-1.
  for (int j = 1; j < p.l && !aborted; ++j) {
    const int aj = t.a[j - 1];
    const Trit ta = run_check(aj, p, rep, ctx.check[aj], rng, t.probs);
    t.a_check.push_back(ta);
    if (ta == Trit::kAbort) { aborted = true; break; }

    double pr = 0.0;
    const int bj = js.measure_register_bit(j, rng, &pr);
    t.probs.push_back(pr);
    t.b[j - 1] = bj;

    const double pass = js.project_ba(j, bj);
    const bool ok = rng.uniform() < pass;
    t.probs.push_back(ok ? pass : 1.0 - pass);
    t.b_check.push_back(ok ? trit_from_bit(bj) : Trit::kAbort);
    if (!ok) { aborted = true; break; }
    js.drop_round(j);
  }

  // Step 4B.
  if (!aborted) {
    const int al = t.a[p.l - 1];
    const Trit ta = run_check(al, p, rep, ctx.check[al], rng, t.probs);
    t.a_check.push_back(ta);
    if (ta == Trit::kAbort) aborted = true;

    if (!aborted) {
      int a2 = 0;
      if (ctx.parity_helstrom) {
        quantum::StateVector rest = phi(t.a[p.l], p, rep);
        for (int j = p.l + 1; j < p.m; ++j) rest = quantum::tensor(rest, phi(t.a[j], p, rep));
        const quantum::MeasurementSample s =
            quantum::measure(rest, *ctx.parity_helstrom, rng);
        t.probs.push_back(s.probability);
        a2 = s.label == "1" ? 1 : 0;
      } else {
        t.probs.push_back(1.0);  // no rounds beyond l: empty parity is 0
      }
      t.a2_tilde = a2;

      double pf = 0.0;
      const int f = js.measure_parity(rng, &pf);
      t.probs.push_back(pf);
      t.f_parity = f;

      int xt = a2 ^ f;
      for (int j = 0; j < p.l; ++j) xt ^= t.a[j];
      for (int j = 0; j + 1 < p.l; ++j) xt ^= t.b[j];
      t.x_tilde = xt;

      const bool want_flip = xt != target;
      const SteerOutcome so = steer(js, f, want_flip, rng, &ctx.steer_u[f]);
      t.probs.push_back(so.prob);
      for (int j = p.l; j <= p.m; ++j) t.b[j - 1] = so.announced[j - p.l];

      // Alice's checks on rounds l..m (end of 4B, then 4C).
      for (int j = p.l; j <= p.m && !aborted; ++j) {
        const double pass = js.project_ba(j, t.b[j - 1]);
        const bool ok = rng.uniform() < pass;
        t.probs.push_back(ok ? pass : 1.0 - pass);
        t.b_check.push_back(ok ? trit_from_bit(t.b[j - 1]) : Trit::kAbort);
        if (!ok) aborted = true;
      }
    }
  }

  // Step 5: Alice checks the blocks Bob* returned honestly at Step 3.
  // Bob* skips his own checks (aborting is never in his interest).
  for (int j = 0; j < p.m && !aborted; ++j) {
    const int bar = 1 - t.a[j];
    const Trit ta = run_check(bar, p, rep, ctx.check[bar], rng, t.probs);
    t.step5_alice.push_back(ta);
    if (ta == Trit::kAbort) aborted = true;
  }

  if (aborted) {
    t.result = Trit::kAbort;
    return t;
  }
  t.result = verify_result(t);
  return t;
}

Transcript run_attack(const ProtocolParams& p, int target, std::uint64_t seed,
                      Representation rep) {
  return run_attack(AttackContext(p, rep), target, seed);
}

}  // namespace msc99::protocol
