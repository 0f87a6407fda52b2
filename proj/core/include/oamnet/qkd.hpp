#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "oamnet/network.hpp"
#include "oamnet/polarization.hpp"
#include "oamnet/rng.hpp"
#include "oamnet/sorter.hpp"

namespace oamnet {

struct Eavesdropper {
  enum class Kind { none, intercept_resend };
  Kind kind = Kind::none;
  double fraction = 0.0;  // fraction of photons intercepted, in [0, 1]

  static Eavesdropper none() { return {}; }
  static Eavesdropper intercept_resend(double fraction) {
    return {Kind::intercept_resend, fraction};
  }

  bool operator==(const Eavesdropper&) const = default;
};

/// Parameters of one BB84 session between two network users.
struct SessionConfig {
  std::string sender;
  std::string receiver;
  int photon_count = 0;
  Eavesdropper eve;
  bool compensate_depth = true;
  std::uint64_t seed = 0;
  double sample_fraction = 0.1;    // disclosed share of the sifted key
  double abort_threshold = 0.11;   // QBER above this flags the session

  void validate() const;
};

struct PreparedPhoton {
  int bit = 0;
  Basis basis = Basis::diagonal;
  PhotonRecord record;
};

/// Draw an independent uniform bit and basis per photon and prepare the
/// matching canonical polarization, addressed to the receiver's ell.
std::vector<PreparedPhoton> bb84_prepare(int count, Rng& rng,
                                         const std::string& sender, int ell,
                                         std::uint64_t first_sequence = 0);

struct MeasuredBit {
  Basis logical_basis = Basis::diagonal;
  int bit = 0;
};

/// Receiver-side measurement of an arrived photon. The receiver draws a
/// uniform basis in its logical frame; with compensation on, the physical
/// measurement basis is the image of that basis under the depth-d plate
/// permutation (diagonal and circular swap on odd d) and the outcome is
/// mapped back through the inverse permutation. Without compensation the
/// logical basis is measured directly on the arrived polarization.
MeasuredBit bb84_measure_incoming(const PhotonRecord& record, int depth,
                                  bool compensate, Rng& rng);

/// Indices where the two basis strings agree. Throws on length mismatch.
std::vector<std::size_t> sift(const std::vector<Basis>& sender_bases,
                              const std::vector<Basis>& receiver_bases);

/// Disagreement fraction over the sampled positions of the sifted keys.
/// Throws std::invalid_argument on an empty sample.
double estimate_qber(const std::vector<int>& sender_bits,
                     const std::vector<int>& receiver_bits,
                     const std::vector<std::size_t>& sample_indices);

/// Intercept-resend attack at a point where the photon has passed
/// local_depth plates: Eve draws a uniform basis in that frame, measures,
/// and re-emits the collapsed canonical state with ell and qwp_depth
/// unchanged.
PhotonRecord eavesdrop_intercept_resend(const PhotonRecord& record, int local_depth,
                                        Rng& rng);

struct Bb84SessionResult {
  std::size_t raw_count = 0;     // photons the receiver detected
  std::size_t sifted_count = 0;  // of those, matching-basis positions
  double qber_estimate = 0.0;    // disagreement on the disclosed sample
  std::vector<int> key_bits_sender;
  std::vector<int> key_bits_receiver;
  std::string transcript_id;
  bool preamble_detected = false;
  bool aborted = false;
  std::string abort_reason;
  std::uint64_t seed = 0;

  double sift_fraction() const {
    return raw_count == 0 ? 0.0
                          : static_cast<double>(sifted_count) /
                                static_cast<double>(raw_count);
  }
};

/// Full pipeline under one in-port lease and one seed: preamble, prepare,
/// transmit (with optional eavesdropping), measure, sift, QBER sample, key
/// extraction. Throws when the in-port is busy, a user is unknown, or the
/// sifted key is too short to sample.
Bb84SessionResult run_session(const SessionConfig& session, const NetworkConfig& network,
                              InPortMux& mux, Transcript* transcript = nullptr);

/// Convenience overload with a private mux.
Bb84SessionResult run_session(const SessionConfig& session, const NetworkConfig& network,
                              Transcript* transcript = nullptr);

}  // namespace oamnet
