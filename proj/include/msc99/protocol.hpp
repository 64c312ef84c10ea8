#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "msc99/quantum.hpp"

// Executable state machines for the MSC(99) symmetric coin-tossing
// protocol: honest runs, the entanglement-based cheating-Bob* attack, and
// the verifiable transcripts both produce. The entangled state is kept as a
// uniform sum over register strings with per-round product blocks (see
// JointState) rather than a flat vector, which keeps m <= 10 tractable.

namespace msc99::protocol {

// Protocol outcomes are trits: 0, 1, or abort. XOR absorbs abort.
enum class Trit { kZero, kOne, kAbort };

Trit trit_from_bit(int b);
Trit trit_xor(Trit a, Trit b);
std::string trit_to_string(Trit t);
Trit trit_from_string(const std::string& s);

// c, s: amplitudes of the committed qubit states; n qubits per committed
// bit; m bit rounds; l is the round at which the cheater mounts the
// discrimination/steering step (1 <= l <= m).
struct ProtocolParams {
  double c, s;
  int n, m, l;

  ProtocolParams(double c, double s, int n, int m, int l);
  static ProtocolParams from_c2(double c2, int n, int m, int l);
  double c2() const { return c * c; }
};

// Amplitudes of the 2-D subspace spanned by the n-qubit blocks:
// c_eff^2 - s_eff^2 = (c^2 - s^2)^n, t = s_eff^2.
struct EffectiveParams {
  double c_eff, s_eff, t;
};
EffectiveParams effective_params(const ProtocolParams& p);

// Compressed: each block is the 2-D vector (c_eff, +-s_eff). Full: each
// block is the explicit 2^n-dim tensor power.
enum class Representation { kCompressed, kFull };
std::string representation_name(Representation rep);
Representation representation_from_name(const std::string& name);

// Number of rounds k..m covered by a parity mixture: L(k) = m - k + 1.
int parity_length(int k, int m);

// psi(0) = c|0> + s|1>, psi(1) = c|0> - s|1>.
quantum::StateVector psi(int b, const ProtocolParams& p);

// The n-qubit block Phi(b) = psi(b)^(x)n in the chosen representation.
quantum::StateVector phi(int b, const ProtocolParams& p, Representation rep);

// Dimension of one Phi block in the chosen representation.
int block_dim(const ProtocolParams& p, Representation rep);

// Two-outcome verification POVM (E_b = |Phi(b)><Phi(b)|, E_perp); outcome
// labels are the bit string and "abort".
quantum::Povm check_povm(int b, const ProtocolParams& p, Representation rep);

// Uniform mixture over all length-L(k) bit strings of parity b of the
// product projectors onto per-round Phi blocks. party is a bookkeeping tag
// ('A' or 'B'); the operator is the same for both.
struct ParityMixture {
  char party;
  int b;
  int k;
  quantum::DensityMatrix rho;
};
ParityMixture parity_mixture(char party, int b, int k, const ProtocolParams& p,
                             Representation rep);

// Record of one protocol run. Bit matrices are indexed [round][qubit].
// e[j][i] = a[j] ^ c[j][i] always; f is d for cheating runs and b ^ d for
// honest ones. probs lists the Born probability of every observed
// measurement outcome in execution order (the compressed-vs-full soundness
// checks compare these sequences).
struct Transcript {
  std::string mode;  // "honest" | "attack"
  double c2 = 0.0;
  int n = 0, m = 0, l = 0;
  std::string rep;
  std::uint64_t seed = 0;
  std::optional<int> target;  // attack only

  std::vector<int> a, b;                      // announced bits per round
  std::vector<std::vector<int>> c, d, e, f;   // per-round per-qubit bits
  std::vector<Trit> a_check, b_check;         // verification outcomes
  std::vector<Trit> step5_alice, step5_bob;   // returned-block checks
  std::optional<int> a2_tilde;                // cheater's parity guess
  std::optional<int> f_parity;                // register parity outcome
  std::optional<int> x_tilde;                 // cheater's predicted result
  std::vector<double> probs;
  Trit result = Trit::kAbort;
};

// One JSON object per line; bit-exact across platforms for a fixed seed
// (the RNG algorithm name and version are part of the record).
std::string transcript_to_json(const Transcript& t);
Transcript transcript_from_json(const std::string& line);

// Recomputes the result from the recorded verification outcomes with
// abort-absorbing XOR. Throws on transcripts that are neither complete nor
// aborted.
Trit verify_result(const Transcript& t);

// Entangled state shared by Alice and Bob* over the not-yet-opened rounds:
// a sum of branches amp * |Psi_blocks> |reg>, where each branch carries one
// Phi-label per round for Alice's half (ba), one for the half returned to
// Bob* (bab), and the register string. Branches with different register
// strings are orthogonal; block overlaps reduce to powers of
// <Phi(0)|Phi(1)> evaluated in the chosen representation.
struct JointState {
  struct Branch {
    std::vector<int> ba, bab, reg;  // aligned with rounds
    linalg::Cx amp;
  };

  ProtocolParams params;
  Representation rep;
  std::vector<int> rounds;  // 1-based protocol rounds still held
  std::vector<Branch> branches;
  double overlap;  // <Phi(0)|Phi(1)> in rep

  // The post-step-3 state: uniform over all register strings, blocks
  // Phi(b_j) / Phi(~b_j).
  JointState(const ProtocolParams& p, Representation r);

  double norm2() const;
  int round_pos(int round) const;

  // Computational-basis measurement of one register qubit; collapses.
  int measure_register_bit(int round, Rng& rng, double* prob_out);

  // Parity measurement (F_0/F_1) over the remaining register; collapses.
  int measure_parity(Rng& rng, double* prob_out);

  // Projects Alice's block of the given round onto Phi(bit); returns the
  // conditional pass probability and collapses onto the passing branch.
  double project_ba(int round, int bit);

  // Removes a fully-collapsed round (all branches must agree on its
  // labels) from the bookkeeping.
  void drop_round(int round);
};

// Uhlmann steering unitary over everything the cheater holds for rounds
// l..m (the returned blocks together with the register), rotating the
// parity-F branch sum toward parity 1-F. Because the cheater-side vectors
// |C_b>|b> are orthonormal, the unitary is fully described by the N x N
// block T mapping them onto |C_b'>|b'> of the opposite parity: rows index
// the ascending parity-(1-F) register strings, columns the ascending
// parity-F ones. T depends only on the block overlap (c^2 - s^2)^n, never
// on the representation. The attained squared overlap u (the transition
// probability of the reduced parity mixtures over Alice's blocks) is
// reported through success.
linalg::Matrix steering_unitary(const ProtocolParams& p, int F, double* success);

struct SteerOutcome {
  std::vector<int> announced;  // bits for rounds l..m
  double prob;                 // Born probability of the register outcome
  bool used_fallback;          // remainder element fired
};

// Step-4B register measurement: without a flip, the register basis
// restricted to parity F; with a flip, U*_B followed by the projectors onto
// parity-(1-F) strings completed by a remainder element whose outcome
// triggers a uniformly random parity-(1-F) announcement.
SteerOutcome steer(JointState& joint, int F, bool want_flip, Rng& rng,
                   const linalg::Matrix* cached_unitary = nullptr);

// Shared read-only pieces for repeated attack runs at fixed parameters.
struct AttackContext {
  ProtocolParams params;
  Representation rep;
  std::vector<quantum::Povm> check;          // check_povm(0), check_povm(1)
  std::optional<quantum::Povm> parity_helstrom;  // absent when l == m
  linalg::Matrix steer_u[2];
  double steer_success[2];

  AttackContext(const ProtocolParams& p, Representation r);
};

// Full honest run of Steps 1-5; verification POVMs are executed (not
// assumed) even though they pass with probability 1 in exact arithmetic.
Transcript run_honest(const ProtocolParams& p, std::uint64_t seed,
                      Representation rep = Representation::kCompressed);

// Full cheating run biasing the result toward target. Bob* skips his own
// Step-5 checks; abort is a legal outcome.
Transcript run_attack(const ProtocolParams& p, int target, std::uint64_t seed,
                      Representation rep = Representation::kCompressed);
Transcript run_attack(const AttackContext& ctx, int target, std::uint64_t seed);

// Flat StateVector of the branch sum over rounds l..m (optionally
// restricted to register parity F). Factors: one per Alice-held block,
// then everything the cheater holds (returned blocks and register)
// flattened into a single factor, so Uhlmann steering over the cheater's
// side is a one-factor optimization. Test-sized instances only.
quantum::StateVector eta_flat(const ProtocolParams& p, Representation rep,
                              std::optional<int> parity_F);

}  // namespace msc99::protocol
