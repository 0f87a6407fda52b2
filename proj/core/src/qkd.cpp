#include "oamnet/qkd.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace oamnet {

void SessionConfig::validate() const {
  if (photon_count < 1) throw std::invalid_argument("photon_count must be >= 1");
  if (sender == receiver) {
    throw std::invalid_argument("sender and receiver must differ");
  }
  if (!(sample_fraction > 0.0 && sample_fraction < 1.0)) {
    throw std::invalid_argument("sample_fraction " + std::to_string(sample_fraction) +
                                " out of range (0, 1)");
  }
  if (eve.kind == Eavesdropper::Kind::intercept_resend &&
      !(eve.fraction >= 0.0 && eve.fraction <= 1.0)) {
    throw std::invalid_argument("eavesdropper fraction out of range [0, 1]");
  }
  if (!(abort_threshold >= 0.0 && abort_threshold <= 1.0)) {
    throw std::invalid_argument("abort_threshold out of range [0, 1]");
  }
}

std::vector<PreparedPhoton> bb84_prepare(int count, Rng& rng,
                                         const std::string& sender, int ell,
                                         std::uint64_t first_sequence) {
  if (count < 1) throw std::invalid_argument("bb84_prepare: count must be >= 1");
  std::vector<PreparedPhoton> photons;
  photons.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    PreparedPhoton p;
    p.bit = rng.bit();
    p.basis = rng.bit() ? Basis::circular : Basis::diagonal;
    p.record.ell = ell;
    p.record.polarization = canonical_state({p.basis, p.bit});
    p.record.origin = sender;
    p.record.sequence = first_sequence + static_cast<std::uint64_t>(i);
    photons.push_back(std::move(p));
  }
  return photons;
}

MeasuredBit bb84_measure_incoming(const PhotonRecord& record, int depth,
                                  bool compensate, Rng& rng) {
  const Basis logical = rng.bit() ? Basis::circular : Basis::diagonal;
  if (!compensate) {
    const Measurement m = measure(record.polarization, logical, rng);
    return {logical, m.bit};
  }
  const Basis physical = (depth % 2 == 1) ? other_basis(logical) : logical;
  const Measurement m = measure(record.polarization, physical, rng);
  // The collapsed state is canonical in the physical frame; pulling it back
  // through the plate permutation recovers the logical symbol.
  const Bb84State decoded = decode_bb84(m.collapsed, depth);
  return {decoded.basis, decoded.bit};
}

std::vector<std::size_t> sift(const std::vector<Basis>& sender_bases,
                              const std::vector<Basis>& receiver_bases) {
  if (sender_bases.size() != receiver_bases.size()) {
    throw std::invalid_argument("sift: transcript lengths differ (" +
                                std::to_string(sender_bases.size()) + " vs " +
                                std::to_string(receiver_bases.size()) + ")");
  }
  std::vector<std::size_t> matched;
  for (std::size_t i = 0; i < sender_bases.size(); ++i) {
    if (sender_bases[i] == receiver_bases[i]) matched.push_back(i);
  }
  return matched;
}

double estimate_qber(const std::vector<int>& sender_bits,
                     const std::vector<int>& receiver_bits,
                     const std::vector<std::size_t>& sample_indices) {
  if (sender_bits.size() != receiver_bits.size()) {
    throw std::invalid_argument("estimate_qber: key lengths differ");
  }
  if (sample_indices.empty()) {
    throw std::invalid_argument("estimate_qber: insufficient sample (empty)");
  }
  std::size_t disagreements = 0;
  for (const std::size_t i : sample_indices) {
    if (i >= sender_bits.size()) {
      throw std::out_of_range("estimate_qber: sample index out of range");
    }
    if (sender_bits[i] != receiver_bits[i]) ++disagreements;
  }
  return static_cast<double>(disagreements) /
         static_cast<double>(sample_indices.size());
}

PhotonRecord eavesdrop_intercept_resend(const PhotonRecord& record, int local_depth,
                                        Rng& rng) {
  const Basis logical = rng.bit() ? Basis::circular : Basis::diagonal;
  const Basis physical = (local_depth % 2 == 1) ? other_basis(logical) : logical;
  const Measurement m = measure(record.polarization, physical, rng);
  PhotonRecord out = record;
  out.polarization = m.collapsed;
  return out;
}

namespace {

struct ReceiverSide {
  std::vector<Basis> bases;
  std::vector<int> bits;
};

}  // namespace

Bb84SessionResult run_session(const SessionConfig& session, const NetworkConfig& network,
                              InPortMux& mux, Transcript* transcript) {
  session.validate();
  if (!network.has_user(session.sender)) {
    throw std::invalid_argument("unknown sender '" + session.sender + "'");
  }
  if (!network.has_user(session.receiver)) {
    throw std::invalid_argument("unknown receiver '" + session.receiver + "'");
  }

  auto lease = mux.acquire(session.sender, network, transcript);
  if (!lease) {
    throw std::runtime_error("in-port busy: held by " + mux.holder());
  }

  Rng rng(session.seed);
  Bb84SessionResult result;
  result.seed = session.seed;
  result.transcript_id = session.sender + ">" + session.receiver + "#" +
                         std::to_string(session.seed);
  if (transcript != nullptr) {
    transcript->push("session-begin", result.transcript_id);
  }

  const int depth = network.receiver_depth(session.receiver);

  // Sender-identification preamble: |R> then |L>, decoded in the receiver's
  // frame using the published leaf depth.
  std::vector<Bb84State> preamble_decoded;
  for (const PhotonRecord& photon :
       sender_preamble(session.sender, session.receiver, network)) {
    const Delivery d = transmit(photon, network, rng);
    if (!d.lost && d.user == session.receiver) {
      preamble_decoded.push_back(decode_bb84(d.record.polarization, depth));
    }
  }
  result.preamble_detected = detect_preamble(preamble_decoded);
  if (transcript != nullptr) {
    transcript->push("preamble", result.preamble_detected ? "detected" : "missed");
  }

  const int receiver_ell = encode_address(session.receiver, network);
  const std::vector<PreparedPhoton> prepared =
      bb84_prepare(session.photon_count, rng, session.sender, receiver_ell,
                   /*first_sequence=*/2);

  std::vector<Basis> sender_bases_detected;
  std::vector<int> sender_bits_detected;
  ReceiverSide receiver;
  for (const PreparedPhoton& p : prepared) {
    PhotonRecord in_flight = p.record;
    if (session.eve.kind == Eavesdropper::Kind::intercept_resend &&
        rng.bernoulli(session.eve.fraction)) {
      in_flight = eavesdrop_intercept_resend(in_flight, /*local_depth=*/0, rng);
    }
    const Delivery d = transmit(std::move(in_flight), network, rng);
    if (d.lost || d.user != session.receiver) continue;
    const MeasuredBit mb =
        bb84_measure_incoming(d.record, depth, session.compensate_depth, rng);
    sender_bases_detected.push_back(p.basis);
    sender_bits_detected.push_back(p.bit);
    receiver.bases.push_back(mb.logical_basis);
    receiver.bits.push_back(mb.bit);
  }

  result.raw_count = sender_bases_detected.size();
  const std::vector<std::size_t> sifted = sift(sender_bases_detected, receiver.bases);
  result.sifted_count = sifted.size();

  std::vector<int> sender_sifted, receiver_sifted;
  sender_sifted.reserve(sifted.size());
  receiver_sifted.reserve(sifted.size());
  for (const std::size_t i : sifted) {
    sender_sifted.push_back(sender_bits_detected[i]);
    receiver_sifted.push_back(receiver.bits[i]);
  }

  if (sender_sifted.empty()) {
    throw std::runtime_error("insufficient sifted bits for the QBER sample");
  }
  std::vector<std::size_t> order(sender_sifted.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  rng.shuffle(order);
  const std::size_t sample_size = std::max<std::size_t>(
      1, static_cast<std::size_t>(
             std::ceil(session.sample_fraction *
                       static_cast<double>(sender_sifted.size()))));
  std::vector<std::size_t> sample(order.begin(),
                                  order.begin() + static_cast<long>(sample_size));
  std::sort(sample.begin(), sample.end());

  result.qber_estimate = estimate_qber(sender_sifted, receiver_sifted, sample);

  std::vector<bool> disclosed(sender_sifted.size(), false);
  for (const std::size_t i : sample) disclosed[i] = true;
  for (std::size_t i = 0; i < sender_sifted.size(); ++i) {
    if (disclosed[i]) continue;
    result.key_bits_sender.push_back(sender_sifted[i]);
    result.key_bits_receiver.push_back(receiver_sifted[i]);
  }

  if (!result.preamble_detected) {
    result.aborted = true;
    result.abort_reason = "preamble not detected";
  } else if (result.qber_estimate > session.abort_threshold) {
    result.aborted = true;
    result.abort_reason = "qber above threshold";
  }

  if (transcript != nullptr) {
    transcript->push("session-end",
                     result.transcript_id + " raw=" + std::to_string(result.raw_count) +
                         " sifted=" + std::to_string(result.sifted_count) +
                         " qber=" + std::to_string(result.qber_estimate) +
                         (result.aborted ? " abort" : " ok"));
  }
  return result;
}

Bb84SessionResult run_session(const SessionConfig& session, const NetworkConfig& network,
                              Transcript* transcript) {
  InPortMux mux;
  return run_session(session, network, mux, transcript);
}

}  // namespace oamnet
