#include "oamnet/polarization.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

#include "oamnet/mode_algebra.hpp"

namespace oamnet {

namespace {

constexpr double kInvSqrt2 = 0.7071067811865475244008443621048490;

}  // namespace

std::complex<double> inner(const JonesVector& a, const JonesVector& b) {
  return std::conj(a.h) * b.h + std::conj(a.v) * b.v;
}

double norm(const JonesVector& j) {
  return std::sqrt(std::norm(j.h) + std::norm(j.v));
}

Basis other_basis(Basis b) {
  return b == Basis::diagonal ? Basis::circular : Basis::diagonal;
}

std::string basis_name(Basis b) {
  return b == Basis::diagonal ? "diagonal" : "circular";
}

JonesVector canonical_state(const Bb84State& s) {
  if (s.bit != 0 && s.bit != 1) throw std::invalid_argument("Bb84State bit must be 0 or 1");
  if (s.basis == Basis::diagonal) {
    return s.bit == 0 ? JonesVector{{kInvSqrt2, 0.0}, {kInvSqrt2, 0.0}}     // |45>
                      : JonesVector{{kInvSqrt2, 0.0}, {-kInvSqrt2, 0.0}};   // |135>
  }
  return s.bit == 0 ? JonesVector{{kInvSqrt2, 0.0}, {0.0, kInvSqrt2}}       // |L>
                    : JonesVector{{kInvSqrt2, 0.0}, {0.0, -kInvSqrt2}};     // |R>
}

std::pair<JonesVector, JonesVector> basis_states(Basis b) {
  return {canonical_state({b, 0}), canonical_state({b, 1})};
}

JonesVector qwp_apply(const JonesVector& j) {
  return {j.h, std::complex<double>{0.0, 1.0} * j.v};
}

JonesVector qwp_power(const JonesVector& j, int depth) {
  if (depth < 0) throw std::invalid_argument("qwp_power: negative depth");
  return {j.h, unit_imaginary_power(depth) * j.v};
}

Bb84State decode_bb84(const JonesVector& j, int depth) {
  if (depth < 0) throw std::invalid_argument("decode_bb84: negative depth");
  // Undo the plates exactly: P^-d = diag(1, i^-d) = diag(1, conj(i^d)).
  const JonesVector logical{j.h, std::conj(unit_imaginary_power(depth)) * j.v};
  static const std::array<Bb84State, 4> alphabet{
      Bb84State{Basis::diagonal, 0}, Bb84State{Basis::diagonal, 1},
      Bb84State{Basis::circular, 0}, Bb84State{Basis::circular, 1}};
  for (const Bb84State& s : alphabet) {
    if (state_equivalent_up_to_phase(logical, canonical_state(s))) return s;
  }
  throw std::invalid_argument("decode_bb84: not a BB84 state");
}

std::pair<double, double> measure_probabilities(const JonesVector& j, Basis basis) {
  const auto [b0, b1] = basis_states(basis);
  const double p0 = std::norm(inner(b0, j));
  const double p1 = std::norm(inner(b1, j));
  return {p0, p1};
}

Measurement measure(const JonesVector& j, Basis basis, Rng& rng) {
  const auto [b0, b1] = basis_states(basis);
  double p1 = std::norm(inner(b1, j));
  // Snap float residue at the endpoints so eigenstate measurement is
  // error-free; uniform01() lands in [0, 1), making both endpoints exact.
  if (p1 < 1e-12) p1 = 0.0;
  if (p1 > 1.0 - 1e-12) p1 = 1.0;
  const int bit = rng.uniform01() < p1 ? 1 : 0;
  return {bit, bit == 0 ? b0 : b1};
}

bool state_equivalent_up_to_phase(const JonesVector& a, const JonesVector& b) {
  return std::abs(inner(a, b)) > 1.0 - 1e-9;
}

JonesVector orthogonal_state(const JonesVector& j) {
  return {-std::conj(j.v), std::conj(j.h)};
}

}  // namespace oamnet
