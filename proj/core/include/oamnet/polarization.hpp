#pragma once

#include <complex>
#include <string>
#include <utility>

#include "oamnet/rng.hpp"

namespace oamnet {

/// Two-component Jones vector (horizontal, vertical amplitudes).
struct JonesVector {
  std::complex<double> h{0.0, 0.0};
  std::complex<double> v{0.0, 0.0};
};

std::complex<double> inner(const JonesVector& a, const JonesVector& b);
double norm(const JonesVector& j);

/// The two conjugate BB84 bases used on the network. Diagonal carries
/// {|45>, |135>}, circular carries {|L>, |R>}.
enum class Basis { diagonal, circular };

Basis other_basis(Basis b);
std::string basis_name(Basis b);

/// One BB84 symbol: a basis and the bit encoded in it. The bit convention
/// is fixed so transcripts are reproducible:
///   (diagonal, 0) = |45>   (diagonal, 1) = |135>
///   (circular, 0) = |L>    (circular, 1) = |R>
struct Bb84State {
  Basis basis = Basis::diagonal;
  int bit = 0;

  bool operator==(const Bb84State&) const = default;
};

JonesVector canonical_state(const Bb84State& s);

/// The bit-0 and bit-1 eigenvectors of a basis.
std::pair<JonesVector, JonesVector> basis_states(Basis b);

/// One pass through a sorter prism: the quarter-wave-plate Jones matrix
/// P = diag(1, i) applied to the polarization.
JonesVector qwp_apply(const JonesVector& j);

/// d passes, i.e. multiplication by diag(1, i^d). P^4 is the identity.
JonesVector qwp_power(const JonesVector& j, int depth);

/// Inverse of the depth-d plate permutation: returns the symbol s with
/// qwp_power(canonical_state(s), depth) equal to j up to global phase.
/// Throws std::invalid_argument when j is not a BB84 state.
Bb84State decode_bb84(const JonesVector& j, int depth);

/// Outcome probabilities of a projective measurement in the given basis,
/// ordered (bit 0, bit 1). Sums to 1 for unit input.
std::pair<double, double> measure_probabilities(const JonesVector& j, Basis basis);

struct Measurement {
  int bit = 0;
  JonesVector collapsed;
};

/// Projective measurement; collapses onto the basis vector of the sampled
/// outcome. Deterministic on basis eigenstates, 50/50 on the crossed basis.
Measurement measure(const JonesVector& j, Basis basis, Rng& rng);

/// Fidelity comparison: true iff |<a|b>| > 1 - 1e-9.
bool state_equivalent_up_to_phase(const JonesVector& a, const JonesVector& b);

/// The unit vector orthogonal to j. Canonical states map onto their
/// in-basis partners (45<->135, L<->R) up to a global phase.
JonesVector orthogonal_state(const JonesVector& j);

}  // namespace oamnet
