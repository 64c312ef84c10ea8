#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "msc99/linalg.hpp"
#include "msc99/rng.hpp"

// Dense complex states, POVMs and the distinguishability measures used by
// the protocol machinery: trace (Kolmogorov) distance, the Helstrom
// minimum-error measurement, fidelity / transition probability, Uhlmann's
// optimal purification-steering unitary, and Born-rule sampling.
//
// All operations are pure functions of their inputs except measure, which
// consumes an explicitly passed Rng. Values can be freely shared across
// threads for read-only use.

namespace msc99::quantum {

using linalg::Cx;
using linalg::Matrix;
using linalg::Vector;

inline constexpr double kNormTol = 1e-10;
inline constexpr double kPsdTol = 1e-10;
inline constexpr double kPovmSumTol = 1e-9;
inline constexpr double kZeroEigTol = 1e-12;

// Normalized pure state over a tensor factorization given by dims
// (product of dims == amplitude count).
struct StateVector {
  Vector amplitudes;
  std::vector<int> dims;

  StateVector(Vector a, std::vector<int> d);
  int dim() const { return static_cast<int>(amplitudes.size()); }
};

// Hermitian, unit-trace, positive-semidefinite matrix over dims.
struct DensityMatrix {
  Matrix entries;
  std::vector<int> dims;

  DensityMatrix(Matrix e, std::vector<int> d);
  static DensityMatrix from_pure(const StateVector& psi);
  int dim() const { return static_cast<int>(entries.rows()); }
};

struct PovmElement {
  std::string label;
  Matrix op;
};

// Finite list of labeled positive operators summing to identity.
struct Povm {
  std::vector<PovmElement> elements;

  explicit Povm(std::vector<PovmElement> elems);
  int dim() const { return static_cast<int>(elements.front().op.rows()); }
};

struct MeasurementSample {
  std::string label;
  double probability = 0.0;
  std::optional<StateVector> post_state;
  std::optional<DensityMatrix> post_density;
};

struct DistinguishabilityReport {
  double pe;     // minimum-error probability, equal priors
  double k;      // Kolmogorov (trace) distance
  double fid;    // fidelity
  double trans;  // transition probability = fid^2
};

struct UhlmannResult {
  Matrix unitary;         // acts on the designated free subsystem
  Cx overlap_amplitude;   // <psi1|(I (x) U)|psi0> at the optimum
  double u;               // |overlap_amplitude|^2
};

// Kronecker product; dims concatenate.
StateVector tensor(const StateVector& a, const StateVector& b);
DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b);

// Trace out every subsystem not listed in keep (indices into dims).
DensityMatrix partial_trace(const DensityMatrix& rho, const std::vector<int>& keep);

// (1/2) tr |rho0 - rho1|.
double trace_distance(const DensityMatrix& rho0, const DensityMatrix& rho1);

// Minimum error probability for equal priors and the two-outcome POVM
// ("0"/"1") built from the eigenspaces of rho0 - rho1. The zero-eigenvalue
// subspace (|lambda| <= 1e-12) goes to the outcome-0 element.
std::pair<double, Povm> helstrom_pe(const DensityMatrix& rho0, const DensityMatrix& rho1);

// tr sqrt(sqrt(rho0) rho1 sqrt(rho0)).
double fidelity(const DensityMatrix& rho0, const DensityMatrix& rho1);

// fidelity squared (maximal squared purification overlap).
double transition_probability(const DensityMatrix& rho0, const DensityMatrix& rho1);

DistinguishabilityReport distinguishability(const DensityMatrix& rho0,
                                            const DensityMatrix& rho1);

// Eigendecomposition purification sum_i sqrt(lambda_i) |v_i>|i>, ancilla
// dimension equal to the input dimension (appended as one extra factor).
StateVector purify(const DensityMatrix& rho);

// Unitary on the free subsystem (factor index free_factor of the shared
// dims) maximizing |<psi1|(I (x) U)|psi0>|, via the unitary polar factor of
// the cross-overlap matrix M[i][j] = <psi1|(I (x) |j><i|)|psi0>. The
// achieved |overlap|^2 equals the transition probability of the two states
// reduced onto the non-free part (Uhlmann).
UhlmannResult uhlmann_unitary(const StateVector& psi0, const StateVector& psi1,
                              int free_factor);

// Born-rule sample; post-state sqrt(E) psi / sqrt(p) (projector elements
// reduce to projection + renormalization).
MeasurementSample measure(const StateVector& psi, const Povm& povm, Rng& rng);
MeasurementSample measure(const DensityMatrix& rho, const Povm& povm, Rng& rng);

}  // namespace msc99::quantum
