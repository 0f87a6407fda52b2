#include "oamnet/sorter.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <sstream>
#include <stdexcept>

namespace oamnet {

double stage_phase(int ell, double alpha, double delta_phi_c) {
  return reduce_angle(static_cast<double>(ell) * alpha + delta_phi_c);
}

double stage_phase(int ell, const SorterStage& stage) {
  return stage_phase(ell, stage.alpha.radians(), stage.delta_phi_c.radians());
}

std::pair<double, double> stage_port_probabilities(int ell, double alpha,
                                                   double delta_phi_c) {
  const double phi = stage_phase(ell, alpha, delta_phi_c);
  const double c = std::cos(phi / 2.0);
  double p0 = c * c;
  if (p0 < 1e-12) p0 = 0.0;
  if (p0 > 1.0 - 1e-12) p0 = 1.0;
  return {p0, 1.0 - p0};
}

std::pair<double, double> stage_port_probabilities(int ell, const SorterStage& stage) {
  return stage_port_probabilities(ell, stage.alpha.radians(),
                                  stage.delta_phi_c.radians());
}

bool SorterTree::Node::operator==(const Node& other) const {
  return is_leaf == other.is_leaf && stage == other.stage &&
         child[0] == other.child[0] && child[1] == other.child[1] &&
         ells == other.ells && depth == other.depth;
}

std::vector<int> SorterTree::leaf_ids() const {
  std::vector<int> ids;
  for (int i = 0; i < size(); ++i) {
    if (nodes_[static_cast<std::size_t>(i)].is_leaf) ids.push_back(i);
  }
  return ids;
}

int SorterTree::leaf_for(int ell) const {
  for (int i = 0; i < size(); ++i) {
    const Node& n = nodes_[static_cast<std::size_t>(i)];
    if (n.is_leaf && std::find(n.ells.begin(), n.ells.end(), ell) != n.ells.end()) {
      return i;
    }
  }
  return -1;
}

std::vector<int> SorterTree::addresses() const {
  std::vector<int> all;
  for (const Node& n : nodes_) {
    if (n.is_leaf) all.insert(all.end(), n.ells.begin(), n.ells.end());
  }
  std::sort(all.begin(), all.end());
  return all;
}

std::string SorterTree::path_of(int id) const {
  // walk up by scanning parents; trees are tiny
  std::string path;
  int current = id;
  while (current != root()) {
    for (int i = 0; i < size(); ++i) {
      const Node& n = nodes_[static_cast<std::size_t>(i)];
      if (n.is_leaf) continue;
      if (n.child[0] == current || n.child[1] == current) {
        path.insert(path.begin(), n.child[1] == current ? '1' : '0');
        current = i;
        break;
      }
    }
  }
  return path;
}

namespace {

// Exact port decision for alpha = pi/2^j, delta_phi_c = -k*pi/4. Works in
// integer units of pi/2^J so "probability exactly 0 or 1" is an integer
// divisibility test, immune to float rounding.
//   phi/pi = ell/2^j - k/4 = t / 2^J  with J = max(j, 2).
// Deterministic iff 2^J divides t; the port is the parity of t / 2^J.
std::optional<int> exact_port(long long ell, int j, int k) {
  const int big = std::max(j, 2);
  const long long scale = 1LL << big;
  const long long t = ell * (scale >> j) - static_cast<long long>(k) * (scale >> 2);
  if (t % scale != 0) return std::nullopt;
  const long long q = t / scale;
  return static_cast<int>(((q % 2) + 2) % 2);
}

std::string format_set(const std::vector<int>& ells) {
  std::ostringstream out;
  out << '{';
  for (std::size_t i = 0; i < ells.size(); ++i) {
    if (i) out << ", ";
    out << ells[i];
  }
  out << '}';
  return out.str();
}

}  // namespace

SorterTree build_sorter_tree(const std::vector<int>& addresses, bool use_qwp,
                             int max_halvings) {
  if (addresses.empty()) {
    throw std::invalid_argument("build_sorter_tree: empty address set");
  }
  std::vector<int> sorted = addresses;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw std::invalid_argument("build_sorter_tree: duplicate address");
  }

  std::vector<SorterTree::Node> nodes;
  // Pre-order construction: emit the node, then the port-0 subtree, then
  // the port-1 subtree. Serialization relies on this arena order.
  std::function<void(const std::vector<int>&, int)> synthesize =
      [&](const std::vector<int>& set, int depth) {
        if (set.size() == 1) {
          SorterTree::Node leaf;
          leaf.is_leaf = true;
          leaf.ells = set;
          leaf.depth = depth;
          nodes.push_back(std::move(leaf));
          return;
        }
        for (int j = 0; j <= max_halvings; ++j) {
          for (int k = 0; k <= 7; ++k) {
            std::vector<int> port0, port1;
            bool deterministic = true;
            for (const int ell : set) {
              const auto port = exact_port(ell, j, k);
              if (!port) {
                deterministic = false;
                break;
              }
              (*port == 0 ? port0 : port1).push_back(ell);
            }
            if (!deterministic || port0.empty() || port1.empty()) continue;

            SorterTree::Node inner;
            inner.is_leaf = false;
            inner.stage.alpha = PiAngle::of(1, 1LL << j);
            inner.stage.delta_phi_c = PiAngle::of(-k, 4);
            inner.stage.applies_qwp = use_qwp;
            inner.depth = depth;
            const int self = static_cast<int>(nodes.size());
            nodes.push_back(std::move(inner));
            nodes[static_cast<std::size_t>(self)].child[0] =
                static_cast<int>(nodes.size());
            synthesize(port0, depth + 1);
            nodes[static_cast<std::size_t>(self)].child[1] =
                static_cast<int>(nodes.size());
            synthesize(port1, depth + 1);
            return;
          }
        }
        throw std::runtime_error("build_sorter_tree: unsortable set " +
                                 format_set(set) +
                                 " (no deterministic split in candidate schedule)");
      };

  synthesize(sorted, 0);
  return SorterTree(std::move(nodes));
}

void validate_tree_routing(const SorterTree& tree) {
  if (tree.empty()) throw std::invalid_argument("sorter tree is empty");
  const std::vector<int> all = tree.addresses();
  if (std::adjacent_find(all.begin(), all.end()) != all.end()) {
    throw std::invalid_argument("an ell address appears in more than one sorter leaf");
  }
  for (const int ell : all) {
    int id = tree.root();
    int depth = 0;
    while (!tree.node(id).is_leaf) {
      const SorterTree::Node& n = tree.node(id);
      const auto [p0, p1] = stage_port_probabilities(ell, n.stage);
      (void)p1;
      if (p0 != 0.0 && p0 != 1.0) {
        throw std::invalid_argument(
            "sorter stage at node " + std::to_string(id) + " routes ell=" +
            std::to_string(ell) + " probabilistically (p0=" + std::to_string(p0) + ")");
      }
      id = n.child[p0 == 1.0 ? 0 : 1];
      ++depth;
    }
    const SorterTree::Node& leaf = tree.node(id);
    if (std::find(leaf.ells.begin(), leaf.ells.end(), ell) == leaf.ells.end()) {
      throw std::invalid_argument("ell=" + std::to_string(ell) +
                                  " routes to a leaf that does not declare it");
    }
    if (leaf.depth != depth) {
      throw std::invalid_argument("leaf depth mismatch for ell=" + std::to_string(ell));
    }
  }
}

RouteResult route_photon(PhotonRecord photon, const SorterTree& tree, Rng& rng) {
  if (tree.empty()) throw std::invalid_argument("route_photon: empty tree");
  int id = tree.root();
  while (!tree.node(id).is_leaf) {
    const SorterTree::Node& n = tree.node(id);
    const auto [p0, p1] = stage_port_probabilities(photon.ell, n.stage);
    (void)p0;
    const int port = rng.uniform01() < p1 ? 1 : 0;
    if (n.stage.applies_qwp) {
      photon.polarization = qwp_apply(photon.polarization);
      photon.qwp_depth += 1;
    }
    id = n.child[port];
  }
  const std::vector<int>& ells = tree.node(id).ells;
  const bool stray = std::find(ells.begin(), ells.end(), photon.ell) == ells.end();
  return RouteResult{id, std::move(photon), stray};
}

}  // namespace oamnet
