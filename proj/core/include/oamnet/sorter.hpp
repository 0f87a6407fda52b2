#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "oamnet/angle.hpp"
#include "oamnet/polarization.hpp"
#include "oamnet/rng.hpp"

namespace oamnet {

/// One Mach-Zehnder stage: a beam rotator (angle alpha) and a phase delay
/// plate (offset delta_phi_c) in one arm. A photon of azimuthal index ell
/// picks up the arm phase ell*alpha + delta_phi_c; the stage's prisms act
/// as a quarter-wave plate on the polarization when applies_qwp is set.
struct SorterStage {
  PiAngle alpha;
  PiAngle delta_phi_c;
  bool applies_qwp = false;

  bool operator==(const SorterStage&) const = default;
};

/// Interferometric arm phase ell*alpha + delta_phi_c, reduced to (-pi, pi].
double stage_phase(int ell, double alpha, double delta_phi_c);
double stage_phase(int ell, const SorterStage& stage);

/// Output-port probabilities (port 0, port 1) for the given stage phase:
/// p0 = cos^2(phi/2), p1 = sin^2(phi/2). Phase 0 mod 2pi is the
/// constructive port 0. Values within 1e-12 of an endpoint snap to exactly
/// 0/1 so configured addresses route deterministically; the pair always
/// sums to 1.
std::pair<double, double> stage_port_probabilities(int ell, double alpha,
                                                   double delta_phi_c);
std::pair<double, double> stage_port_probabilities(int ell, const SorterStage& stage);

/// Binary cascade of sorter stages. Node 0 is the root; internal nodes
/// carry a stage and two children, leaves carry the set of addresses that
/// route to them plus their depth (stage count from the root).
class SorterTree {
 public:
  struct Node {
    bool is_leaf = false;
    SorterStage stage;          // internal nodes only
    int child[2] = {-1, -1};    // port 0, port 1
    std::vector<int> ells;      // leaves only, sorted
    int depth = 0;

    bool operator==(const Node&) const;
  };

  SorterTree() = default;
  explicit SorterTree(std::vector<Node> nodes) : nodes_(std::move(nodes)) {}

  int root() const { return 0; }
  bool empty() const { return nodes_.empty(); }
  int size() const { return static_cast<int>(nodes_.size()); }
  const Node& node(int id) const { return nodes_[static_cast<std::size_t>(id)]; }
  const std::vector<Node>& nodes() const { return nodes_; }

  std::vector<int> leaf_ids() const;
  /// Leaf whose address set contains ell; -1 when ell is not configured.
  int leaf_for(int ell) const;
  /// All configured addresses, sorted.
  std::vector<int> addresses() const;
  /// Root-to-node port string ("" for the root).
  std::string path_of(int id) const;

  bool operator==(const SorterTree&) const = default;

 private:
  std::vector<Node> nodes_;
};

/// Synthesize a cascade that routes every address deterministically to its
/// own leaf. At each split the candidate schedule tries rotation angles
/// alpha = pi/2^j (j = 0..max_halvings) against delay offsets
/// delta_phi_c = -k*pi/4 (k = 0..7), keeping the first pair that puts every
/// ell of the current subset on a definite port with both ports occupied.
/// Every stage carries applies_qwp = use_qwp. Throws std::runtime_error
/// naming the offending subset when no candidate splits it.
SorterTree build_sorter_tree(const std::vector<int>& addresses, bool use_qwp,
                             int max_halvings = 12);

/// Structural check for trees that were not synthesized here (e.g. loaded
/// from a scenario file): every configured address must appear in exactly
/// one leaf, and walking the cascade must carry it to that leaf with port
/// probability 1 at every stage. Throws std::invalid_argument otherwise.
void validate_tree_routing(const SorterTree& tree);

/// One photon in transit. qwp_depth counts the quarter-wave-plate
/// applications accumulated since emission, which the receiver needs to
/// undo the polarization-frame rotation.
struct PhotonRecord {
  int ell = 0;
  int p = 0;
  JonesVector polarization;
  int qwp_depth = 0;
  std::string origin;
  std::uint64_t sequence = 0;
  bool preamble = false;
};

struct RouteResult {
  int leaf_id = -1;
  PhotonRecord record;
  /// Set when the photon's ell is not in the reached leaf's address set.
  bool stray = false;
};

/// Walk the cascade sampling ports from the stage probabilities
/// (deterministic for configured addresses). Each traversed stage with
/// applies_qwp increments qwp_depth and applies the quarter-wave plate to
/// the polarization. Unconfigured ell values route wherever the sampled
/// ports lead and come back flagged stray.
RouteResult route_photon(PhotonRecord photon, const SorterTree& tree, Rng& rng);

}  // namespace oamnet
