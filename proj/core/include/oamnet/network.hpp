#pragma once

#include <array>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "oamnet/angle.hpp"
#include "oamnet/polarization.hpp"
#include "oamnet/rng.hpp"
#include "oamnet/sorter.hpp"

namespace oamnet {

/// Channel imperfection knobs. All default to zero (ideal network).
struct NoiseModel {
  double ell_crosstalk_prob = 0.0;  // ell shifts by +-1 in transit, split evenly
  double pol_flip_prob = 0.0;       // bit flip within the arrival basis
  double loss_prob = 0.0;           // photon never detected

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
};

/// Rotating-mirror settings that steer one sender into the shared in-port.
struct MirrorAngles {
  PiAngle alpha1;
  PiAngle alpha2;

  bool operator==(const MirrorAngles&) const = default;
};

/// Static description of the mode-division-multiplexed network: the user
/// directory with ell addresses, the mirror lookup table, the sorter
/// cascade, and the noise model. Leaf depths are topology metadata and are
/// public; receivers read their own plate depth from here.
struct NetworkConfig {
  std::vector<std::pair<std::string, int>> users;  // (id, ell), insertion order
  std::map<std::string, MirrorAngles> mirror_table;
  SorterTree sorter;
  NoiseModel noise;
  int max_abs_ell = 8;
  bool use_qwp = true;

  bool has_user(const std::string& id) const;
  /// The user's ell address. Throws std::invalid_argument on unknown ids.
  int address_of(const std::string& id) const;
  /// The user owning the given ell; empty when unassigned.
  std::string owner_of_ell(int ell) const;
  /// The user owning the leaf (by the leaf's address set); empty when none.
  std::string owner_of_leaf(int leaf_id) const;
  /// Number of quarter-wave plates on the path to this user's leaf.
  int receiver_depth(const std::string& id) const;

  /// Checks every structural invariant: distinct addresses, mirror table
  /// coverage, addresses within the ell cap, leaf sets partitioning the
  /// address set. Throws std::invalid_argument naming the offending field.
  void validate() const;

  /// The four-user reference network: Alice ell=4, Bob ell=2,
  /// Charley ell=3, David ell=1, with the standard mirror table.
  static NetworkConfig four_user_default();
};

/// Default mirror settings for the four reference users; empty otherwise.
std::optional<MirrorAngles> default_mirror_angles(const std::string& user);

int encode_address(const std::string& destination, const NetworkConfig& config);
MirrorAngles mirror_angles(const std::string& sender, const NetworkConfig& config);

/// Append-only structured event log. Pushes are mutex-guarded so the mux
/// and concurrent routing tasks can share one transcript.
class Transcript {
 public:
  struct Event {
    std::string kind;
    std::string detail;

    bool operator==(const Event&) const = default;
  };

  void push(std::string kind, std::string detail);
  std::vector<Event> events() const;
  std::string to_text() const;

 private:
  mutable std::mutex mutex_;
  std::vector<Event> events_;
};

class InPortMux;

/// Single-owner lease on the network in-port. Releasing (or destroying)
/// the lease returns the mux to idle and logs the turnover.
class InPortLease {
 public:
  InPortLease(const InPortLease&) = delete;
  InPortLease& operator=(const InPortLease&) = delete;
  InPortLease(InPortLease&& other) noexcept;
  InPortLease& operator=(InPortLease&& other) noexcept;
  ~InPortLease();

  const std::string& holder() const { return holder_; }
  void release();

 private:
  friend class InPortMux;
  InPortLease(InPortMux* mux, std::string holder, Transcript* log);

  InPortMux* mux_ = nullptr;
  std::string holder_;
  Transcript* log_ = nullptr;
};

/// Arbitration for the single shared in-port of the multiplexer. One
/// sender holds the lease at a time; acquiring looks up and logs the
/// sender's mirror angles.
class InPortMux {
 public:
  /// Grant the lease, or nullopt (busy) when another sender holds it.
  std::optional<InPortLease> acquire(const std::string& sender,
                                     const NetworkConfig& config,
                                     Transcript* log = nullptr);
  bool busy() const;
  std::string holder() const;

 private:
  friend class InPortLease;
  void release(const std::string& holder, Transcript* log);

  mutable std::mutex mutex_;
  std::string holder_;
};

/// The two sender-identification photons sent before a session: |R> then
/// |L> in the sender's frame, addressed to the receiver's ell.
std::array<PhotonRecord, 2> sender_preamble(const std::string& sender,
                                            const std::string& receiver,
                                            const NetworkConfig& config,
                                            std::uint64_t first_sequence = 0);

/// True iff the first two decoded symbols are R then L, i.e.
/// (circular, 1) followed by (circular, 0).
bool detect_preamble(const std::vector<Bb84State>& decoded);

struct Delivery {
  bool lost = false;
  std::string user;     // receiver owning the reached leaf; empty when lost
  PhotonRecord record;  // final state (post routing and noise)
  bool stray = false;   // reached a leaf that does not list its ell
  bool ell_shifted = false;  // crosstalk moved the address in transit
};

/// Send one photon through the network: loss, then ell crosstalk, then
/// routing through the sorter cascade, then a polarization flip in the
/// arrival basis. Throws std::out_of_range when |ell| exceeds the cap.
Delivery transmit(PhotonRecord photon, const NetworkConfig& config, Rng& rng);

}  // namespace oamnet
