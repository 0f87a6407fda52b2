#include "oamnet/network.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <stdexcept>

namespace oamnet {

namespace {

void check_probability(double value, const char* field) {
  if (!(value >= 0.0 && value <= 1.0)) {
    throw std::invalid_argument(std::string(field) + " = " + std::to_string(value) +
                                " out of range [0, 1]");
  }
}

std::string angle_pair_text(const MirrorAngles& m) {
  auto one = [](const PiAngle& a) {
    if (a.num == 0) return std::string("0");
    return std::to_string(a.num) + "/" + std::to_string(a.den) + " pi";
  };
  return "(" + one(m.alpha1) + ", " + one(m.alpha2) + ")";
}

}  // namespace

void NoiseModel::validate() const {
  check_probability(ell_crosstalk_prob, "ell_crosstalk_prob");
  check_probability(pol_flip_prob, "pol_flip_prob");
  check_probability(loss_prob, "loss_prob");
  if (ell_crosstalk_prob + loss_prob > 1.0) {
    throw std::invalid_argument("ell_crosstalk_prob + loss_prob exceeds 1");
  }
}

bool NetworkConfig::has_user(const std::string& id) const {
  return std::any_of(users.begin(), users.end(),
                     [&](const auto& u) { return u.first == id; });
}

int NetworkConfig::address_of(const std::string& id) const {
  for (const auto& [user, ell] : users) {
    if (user == id) return ell;
  }
  throw std::invalid_argument("unknown user '" + id + "'");
}

std::string NetworkConfig::owner_of_ell(int ell) const {
  for (const auto& [user, address] : users) {
    if (address == ell) return user;
  }
  return {};
}

std::string NetworkConfig::owner_of_leaf(int leaf_id) const {
  const auto& leaf = sorter.node(leaf_id);
  for (const int ell : leaf.ells) {
    std::string owner = owner_of_ell(ell);
    if (!owner.empty()) return owner;
  }
  return {};
}

int NetworkConfig::receiver_depth(const std::string& id) const {
  const int leaf = sorter.leaf_for(address_of(id));
  if (leaf < 0) {
    throw std::invalid_argument("user '" + id + "' has no leaf in the sorter tree");
  }
  return sorter.node(leaf).depth;
}

void NetworkConfig::validate() const {
  if (users.empty()) throw std::invalid_argument("network has no users");
  std::map<int, std::string> by_address;
  std::set<std::string> names;
  for (const auto& [user, ell] : users) {
    if (!names.insert(user).second) {
      throw std::invalid_argument("duplicate user '" + user + "'");
    }
    if (std::abs(ell) > max_abs_ell) {
      throw std::invalid_argument("user '" + user + "' address ell=" +
                                  std::to_string(ell) + " exceeds max_abs_ell=" +
                                  std::to_string(max_abs_ell));
    }
    const auto [it, inserted] = by_address.emplace(ell, user);
    if (!inserted) {
      throw std::invalid_argument("users '" + it->second + "' and '" + user +
                                  "' share ell address " + std::to_string(ell));
    }
  }
  for (const auto& [user, ell] : users) {
    (void)ell;
    if (!mirror_table.count(user)) {
      throw std::invalid_argument("user '" + user + "' missing from mirror table");
    }
  }
  if (sorter.empty()) throw std::invalid_argument("network has no sorter tree");
  validate_tree_routing(sorter);

  // Leaf sets must partition the address set.
  std::vector<int> configured = sorter.addresses();
  std::vector<int> expected;
  for (const auto& [user, ell] : users) {
    (void)user;
    expected.push_back(ell);
  }
  std::sort(expected.begin(), expected.end());
  if (configured != expected) {
    throw std::invalid_argument("sorter leaves do not partition the address set");
  }
  noise.validate();
}

std::optional<MirrorAngles> default_mirror_angles(const std::string& user) {
  if (user == "Charley") return MirrorAngles{PiAngle::of(1, 4), PiAngle::of(-1, 4)};
  if (user == "David") return MirrorAngles{PiAngle::of(1, 4), PiAngle::of(-1, 2)};
  if (user == "Bob") return MirrorAngles{PiAngle::of(0, 1), PiAngle::of(-1, 2)};
  if (user == "Alice") return MirrorAngles{PiAngle::of(3, 4), PiAngle::of(-1, 2)};
  return std::nullopt;
}

NetworkConfig NetworkConfig::four_user_default() {
  NetworkConfig config;
  config.users = {{"Alice", 4}, {"Bob", 2}, {"Charley", 3}, {"David", 1}};
  for (const auto& [user, ell] : config.users) {
    (void)ell;
    config.mirror_table[user] = *default_mirror_angles(user);
  }
  config.sorter = build_sorter_tree({1, 2, 3, 4}, /*use_qwp=*/true);
  config.validate();
  return config;
}

int encode_address(const std::string& destination, const NetworkConfig& config) {
  return config.address_of(destination);
}

MirrorAngles mirror_angles(const std::string& sender, const NetworkConfig& config) {
  const auto it = config.mirror_table.find(sender);
  if (it == config.mirror_table.end()) {
    throw std::invalid_argument("unknown user '" + sender + "' in mirror table");
  }
  return it->second;
}

void Transcript::push(std::string kind, std::string detail) {
  std::lock_guard<std::mutex> lock(mutex_);
  events_.push_back(Event{std::move(kind), std::move(detail)});
}

std::vector<Transcript::Event> Transcript::events() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return events_;
}

std::string Transcript::to_text() const {
  std::lock_guard<std::mutex> lock(mutex_);
  std::ostringstream out;
  for (const Event& e : events_) out << e.kind << ' ' << e.detail << '\n';
  return out.str();
}

InPortLease::InPortLease(InPortMux* mux, std::string holder, Transcript* log)
    : mux_(mux), holder_(std::move(holder)), log_(log) {}

InPortLease::InPortLease(InPortLease&& other) noexcept
    : mux_(other.mux_), holder_(std::move(other.holder_)), log_(other.log_) {
  other.mux_ = nullptr;
  other.log_ = nullptr;
}

InPortLease& InPortLease::operator=(InPortLease&& other) noexcept {
  if (this != &other) {
    release();
    mux_ = other.mux_;
    holder_ = std::move(other.holder_);
    log_ = other.log_;
    other.mux_ = nullptr;
    other.log_ = nullptr;
  }
  return *this;
}

InPortLease::~InPortLease() { release(); }

void InPortLease::release() {
  if (mux_ == nullptr) return;
  mux_->release(holder_, log_);
  mux_ = nullptr;
  log_ = nullptr;
}

std::optional<InPortLease> InPortMux::acquire(const std::string& sender,
                                              const NetworkConfig& config,
                                              Transcript* log) {
  const MirrorAngles angles = mirror_angles(sender, config);
  // Logged inside the critical section so the transcript event order is a
  // faithful serialization of lease turnover.
  std::lock_guard<std::mutex> lock(mutex_);
  if (!holder_.empty()) {
    if (log != nullptr) {
      log->push("mux-busy", "sender=" + sender + " holder=" + holder_);
    }
    return std::nullopt;
  }
  holder_ = sender;
  if (log != nullptr) {
    log->push("mux-acquire", "sender=" + sender + " mirrors=" + angle_pair_text(angles));
  }
  return InPortLease(this, sender, log);
}

bool InPortMux::busy() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return !holder_.empty();
}

std::string InPortMux::holder() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return holder_;
}

void InPortMux::release(const std::string& holder, Transcript* log) {
  std::lock_guard<std::mutex> lock(mutex_);
  if (holder_ == holder) {
    holder_.clear();
    if (log != nullptr) log->push("mux-release", "sender=" + holder);
  }
}

std::array<PhotonRecord, 2> sender_preamble(const std::string& sender,
                                            const std::string& receiver,
                                            const NetworkConfig& config,
                                            std::uint64_t first_sequence) {
  const int ell = encode_address(receiver, config);
  PhotonRecord right;
  right.ell = ell;
  right.polarization = canonical_state({Basis::circular, 1});  // |R>
  right.origin = sender;
  right.sequence = first_sequence;
  right.preamble = true;
  PhotonRecord left = right;
  left.polarization = canonical_state({Basis::circular, 0});  // |L>
  left.sequence = first_sequence + 1;
  return {right, left};
}

bool detect_preamble(const std::vector<Bb84State>& decoded) {
  return decoded.size() >= 2 && decoded[0] == Bb84State{Basis::circular, 1} &&
         decoded[1] == Bb84State{Basis::circular, 0};
}

Delivery transmit(PhotonRecord photon, const NetworkConfig& config, Rng& rng) {
  if (std::abs(photon.ell) > config.max_abs_ell) {
    throw std::out_of_range("photon ell=" + std::to_string(photon.ell) +
                            " exceeds max_abs_ell=" +
                            std::to_string(config.max_abs_ell));
  }
  Delivery delivery;
  if (rng.bernoulli(config.noise.loss_prob)) {
    delivery.lost = true;
    return delivery;
  }
  if (rng.bernoulli(config.noise.ell_crosstalk_prob)) {
    photon.ell += rng.bit() ? 1 : -1;
    delivery.ell_shifted = true;
  }
  RouteResult routed = route_photon(std::move(photon), config.sorter, rng);
  delivery.stray = routed.stray;
  delivery.record = std::move(routed.record);
  if (rng.bernoulli(config.noise.pol_flip_prob)) {
    delivery.record.polarization = orthogonal_state(delivery.record.polarization);
  }
  delivery.user = config.owner_of_leaf(routed.leaf_id);
  if (delivery.user.empty()) delivery.lost = true;  // unowned leaf absorbs
  return delivery;
}

}  // namespace oamnet
