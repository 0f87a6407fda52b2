#include "oamnet/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <future>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace oamnet {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return {};
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string::size_type start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    if (pos == std::string::npos) {
      parts.push_back(trim(s.substr(start)));
      return parts;
    }
    parts.push_back(trim(s.substr(start, pos - start)));
    start = pos + 1;
  }
}

std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> parts;
  std::istringstream in(s);
  std::string token;
  while (in >> token) parts.push_back(token);
  return parts;
}

std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

[[noreturn]] void fail(const std::string& name, int line, const std::string& message) {
  throw std::runtime_error(name + ":" + std::to_string(line) + ": " + message);
}

long long parse_ll(const std::string& name, int line, const std::string& text,
                   const std::string& field) {
  long long value = 0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
    fail(name, line, field + ": expected integer, got '" + text + "'");
  }
  return value;
}

std::uint64_t parse_u64(const std::string& name, int line, const std::string& text,
                        const std::string& field) {
  std::uint64_t value = 0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
    fail(name, line, field + ": expected unsigned integer, got '" + text + "'");
  }
  return value;
}

double parse_double(const std::string& name, int line, const std::string& text,
                    const std::string& field) {
  try {
    std::size_t used = 0;
    const double value = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return value;
  } catch (const std::exception&) {
    fail(name, line, field + ": expected number, got '" + text + "'");
  }
}

bool parse_yes_no(const std::string& name, int line, const std::string& text,
                  const std::string& field) {
  if (text == "yes") return true;
  if (text == "no") return false;
  fail(name, line, field + ": expected yes or no, got '" + text + "'");
}

}  // namespace

std::string format_pi_angle(const PiAngle& angle) {
  if (angle.num == 0) return "0";
  return std::to_string(angle.num) + "/" + std::to_string(angle.den) + " pi";
}

PiAngle parse_pi_angle(const std::string& text) {
  const std::string t = trim(text);
  if (t == "0") return PiAngle::of(0, 1);
  const auto slash = t.find('/');
  const auto pi_pos = t.rfind("pi");
  if (slash == std::string::npos || pi_pos == std::string::npos || pi_pos < slash) {
    throw std::invalid_argument("expected angle as '0' or 'p/q pi', got '" + t + "'");
  }
  const std::string num_text = trim(t.substr(0, slash));
  const std::string den_text = trim(t.substr(slash + 1, pi_pos - slash - 1));
  const std::string tail = trim(t.substr(pi_pos + 2));
  if (!tail.empty()) {
    throw std::invalid_argument("trailing text after angle: '" + t + "'");
  }
  long long num = 0, den = 0;
  auto r1 = std::from_chars(num_text.data(), num_text.data() + num_text.size(), num);
  auto r2 = std::from_chars(den_text.data(), den_text.data() + den_text.size(), den);
  if (r1.ec != std::errc{} || r1.ptr != num_text.data() + num_text.size() ||
      r2.ec != std::errc{} || r2.ptr != den_text.data() + den_text.size()) {
    throw std::invalid_argument("expected angle as '0' or 'p/q pi', got '" + t + "'");
  }
  return PiAngle::of(num, den);
}

std::string serialize_sorter_tree(const SorterTree& tree) {
  std::ostringstream out;
  // Pre-order walk with explicit paths; "-" stands for the root's empty path.
  std::vector<std::pair<int, std::string>> stack{{tree.root(), ""}};
  while (!stack.empty()) {
    const auto [id, path] = stack.back();
    stack.pop_back();
    const SorterTree::Node& n = tree.node(id);
    const std::string label = path.empty() ? "-" : path;
    if (n.is_leaf) {
      out << "leaf = " << label;
      for (std::size_t i = 0; i < n.ells.size(); ++i) {
        out << (i == 0 ? ", " : " ") << n.ells[i];
      }
      out << '\n';
    } else {
      out << "node = " << label << ", " << format_pi_angle(n.stage.alpha) << ", "
          << format_pi_angle(n.stage.delta_phi_c) << ", "
          << (n.stage.applies_qwp ? "yes" : "no") << '\n';
      stack.emplace_back(n.child[1], path + "1");
      stack.emplace_back(n.child[0], path + "0");
    }
  }
  return out.str();
}

namespace {

struct TreeEntry {
  bool is_leaf = false;
  SorterStage stage;
  std::vector<int> ells;
  int line = 0;
  bool used = false;
};

SorterTree build_tree_from_entries(const std::string& name,
                                   std::map<std::string, TreeEntry>& entries,
                                   int section_line) {
  if (!entries.count("")) {
    fail(name, section_line, "[sorter] section has no root entry (path '-')");
  }
  std::vector<SorterTree::Node> nodes;
  auto build = [&](auto&& self, const std::string& path, int depth) -> void {
    auto it = entries.find(path);
    if (it == entries.end()) {
      fail(name, section_line,
           "[sorter] missing entry for path '" + (path.empty() ? "-" : path) + "'");
    }
    TreeEntry& entry = it->second;
    entry.used = true;
    if (entry.is_leaf) {
      SorterTree::Node leaf;
      leaf.is_leaf = true;
      leaf.ells = entry.ells;
      std::sort(leaf.ells.begin(), leaf.ells.end());
      leaf.depth = depth;
      nodes.push_back(std::move(leaf));
      return;
    }
    SorterTree::Node inner;
    inner.is_leaf = false;
    inner.stage = entry.stage;
    inner.depth = depth;
    const int self_id = static_cast<int>(nodes.size());
    nodes.push_back(std::move(inner));
    nodes[static_cast<std::size_t>(self_id)].child[0] = static_cast<int>(nodes.size());
    self(self, path + "0", depth + 1);
    nodes[static_cast<std::size_t>(self_id)].child[1] = static_cast<int>(nodes.size());
    self(self, path + "1", depth + 1);
  };
  build(build, "", 0);
  for (const auto& [path, entry] : entries) {
    if (!entry.used) {
      fail(name, entry.line,
           "[sorter] unreachable entry at path '" + (path.empty() ? "-" : path) + "'");
    }
  }
  return SorterTree(std::move(nodes));
}

}  // namespace

Scenario parse_scenario_text(const std::string& text, const std::string& name) {
  enum class Section { none, network, mirrors, noise, sorter, session };
  Section section = Section::none;

  Scenario scenario;
  NetworkConfig& net = scenario.network;
  bool have_sorter_section = false;
  int sorter_section_line = 0;
  std::map<std::string, TreeEntry> tree_entries;
  std::map<int, int> address_line;  // ell -> line of the declaring user

  struct PendingSession {
    SessionConfig cfg;
    int line = 0;
    bool has_sender = false, has_receiver = false, has_photons = false,
         has_seed = false;
  };
  std::vector<PendingSession> sessions;

  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    const std::string line = trim(raw);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') fail(name, line_no, "malformed section header");
      const std::string header = line.substr(1, line.size() - 2);
      if (header == "network") {
        section = Section::network;
      } else if (header == "mirrors") {
        section = Section::mirrors;
      } else if (header == "noise") {
        section = Section::noise;
      } else if (header == "sorter") {
        section = Section::sorter;
        have_sorter_section = true;
        sorter_section_line = line_no;
      } else if (header == "session") {
        section = Section::session;
        PendingSession s;
        s.line = line_no;
        sessions.push_back(std::move(s));
      } else {
        fail(name, line_no, "unknown section [" + header + "]");
      }
      continue;
    }

    const auto eq = line.find('=');
    std::string key = eq == std::string::npos ? line : trim(line.substr(0, eq));
    std::string value = eq == std::string::npos ? std::string{} : trim(line.substr(eq + 1));
    if (key.empty()) fail(name, line_no, "missing key before '='");

    switch (section) {
      case Section::none:
        fail(name, line_no, "entry before any section header");
      case Section::network: {
        if (key == "user") {
          const auto parts = split_ws(value);
          if (parts.size() != 2) {
            fail(name, line_no, "user: expected '<name> <ell>', got '" + value + "'");
          }
          const int ell =
              static_cast<int>(parse_ll(name, line_no, parts[1], "user ell"));
          for (const auto& [existing, existing_ell] : net.users) {
            if (existing == parts[0]) {
              fail(name, line_no, "duplicate user '" + parts[0] + "'");
            }
            if (existing_ell == ell) {
              fail(name, line_no, "users '" + existing + "' and '" + parts[0] +
                                      "' share ell address " + std::to_string(ell) +
                                      " (first declared at line " +
                                      std::to_string(address_line[ell]) + ")");
            }
          }
          net.users.emplace_back(parts[0], ell);
          address_line[ell] = line_no;
        } else if (key == "max_abs_ell") {
          const long long cap = parse_ll(name, line_no, value, "max_abs_ell");
          if (cap < 1) fail(name, line_no, "max_abs_ell must be positive");
          net.max_abs_ell = static_cast<int>(cap);
        } else if (key == "use_qwp") {
          net.use_qwp = parse_yes_no(name, line_no, value, "use_qwp");
        } else {
          fail(name, line_no, "unknown [network] key '" + key + "'");
        }
        break;
      }
      case Section::mirrors: {
        const auto parts = split(value, ',');
        if (parts.size() != 2) {
          fail(name, line_no, "mirrors: expected two angles for '" + key + "'");
        }
        try {
          net.mirror_table[key] = MirrorAngles{parse_pi_angle(parts[0]),
                                               parse_pi_angle(parts[1])};
        } catch (const std::invalid_argument& e) {
          fail(name, line_no, std::string("mirrors '") + key + "': " + e.what());
        }
        break;
      }
      case Section::noise: {
        const double v = parse_double(name, line_no, value, key);
        if (key == "ell_crosstalk_prob") {
          net.noise.ell_crosstalk_prob = v;
        } else if (key == "pol_flip_prob") {
          net.noise.pol_flip_prob = v;
        } else if (key == "loss_prob") {
          net.noise.loss_prob = v;
        } else {
          fail(name, line_no, "unknown [noise] key '" + key + "'");
        }
        break;
      }
      case Section::sorter: {
        const auto parts = split(value, ',');
        if (parts.empty() || parts[0].empty()) {
          fail(name, line_no, "[sorter] entry needs a path");
        }
        const std::string path = parts[0] == "-" ? "" : parts[0];
        if (path.find_first_not_of("01") != std::string::npos) {
          fail(name, line_no, "[sorter] path must be '-' or a 0/1 string");
        }
        if (tree_entries.count(path)) {
          fail(name, line_no, "[sorter] duplicate entry for path '" + parts[0] + "'");
        }
        TreeEntry entry;
        entry.line = line_no;
        if (key == "node") {
          if (parts.size() != 4) {
            fail(name, line_no,
                 "node: expected '<path>, <alpha>, <dphi>, <qwp>', got '" + value + "'");
          }
          try {
            entry.stage.alpha = parse_pi_angle(parts[1]);
            entry.stage.delta_phi_c = parse_pi_angle(parts[2]);
          } catch (const std::invalid_argument& e) {
            fail(name, line_no, std::string("node angle: ") + e.what());
          }
          entry.stage.applies_qwp = parse_yes_no(name, line_no, parts[3], "node qwp");
          auto in_range = [](const PiAngle& a) {
            // (-2pi, 2pi]: -2 < num/den <= 2
            return -2 * a.den < a.num && a.num <= 2 * a.den;
          };
          if (!in_range(entry.stage.alpha) || !in_range(entry.stage.delta_phi_c)) {
            fail(name, line_no, "node angle out of range (-2 pi, 2 pi]");
          }
        } else if (key == "leaf") {
          entry.is_leaf = true;
          if (parts.size() > 2) {
            fail(name, line_no, "leaf: expected '<path>[, <ells>]'");
          }
          if (parts.size() == 2 && !parts[1].empty()) {
            for (const std::string& tok : split_ws(parts[1])) {
              entry.ells.push_back(
                  static_cast<int>(parse_ll(name, line_no, tok, "leaf ell")));
            }
          }
        } else {
          fail(name, line_no, "unknown [sorter] key '" + key + "'");
        }
        tree_entries.emplace(path, std::move(entry));
        break;
      }
      case Section::session: {
        PendingSession& s = sessions.back();
        if (key == "sender") {
          s.cfg.sender = value;
          s.has_sender = true;
        } else if (key == "receiver") {
          s.cfg.receiver = value;
          s.has_receiver = true;
        } else if (key == "photons") {
          const long long count = parse_ll(name, line_no, value, "photons");
          if (count < 1) fail(name, line_no, "photons must be >= 1");
          s.cfg.photon_count = static_cast<int>(count);
          s.has_photons = true;
        } else if (key == "seed") {
          s.cfg.seed = parse_u64(name, line_no, value, "seed");
          s.has_seed = true;
        } else if (key == "sample_fraction") {
          s.cfg.sample_fraction = parse_double(name, line_no, value, key);
          if (!(s.cfg.sample_fraction > 0.0 && s.cfg.sample_fraction < 1.0)) {
            fail(name, line_no, "sample_fraction " + value + " out of range (0, 1)");
          }
        } else if (key == "compensate_depth") {
          s.cfg.compensate_depth = parse_yes_no(name, line_no, value, key);
        } else if (key == "abort_threshold") {
          s.cfg.abort_threshold = parse_double(name, line_no, value, key);
          if (!(s.cfg.abort_threshold >= 0.0 && s.cfg.abort_threshold <= 1.0)) {
            fail(name, line_no, "abort_threshold " + value + " out of range [0, 1]");
          }
        } else if (key == "eavesdropper") {
          const auto parts = split_ws(value);
          if (parts.size() == 1 && parts[0] == "none") {
            s.cfg.eve = Eavesdropper::none();
          } else if (parts.size() == 2 && parts[0] == "intercept_resend") {
            const double fraction =
                parse_double(name, line_no, parts[1], "eavesdropper fraction");
            if (!(fraction >= 0.0 && fraction <= 1.0)) {
              fail(name, line_no, "eavesdropper fraction " + parts[1] +
                                      " out of range [0, 1]");
            }
            s.cfg.eve = Eavesdropper::intercept_resend(fraction);
          } else {
            fail(name, line_no,
                 "eavesdropper: expected 'none' or 'intercept_resend <fraction>'");
          }
        } else {
          fail(name, line_no, "unknown [session] key '" + key + "'");
        }
        break;
      }
    }
  }

  if (net.users.empty()) fail(name, line_no, "[network] declares no users");

  // Mirror settings: explicit entries win; the four reference users have
  // built-in defaults; anyone else must be listed.
  for (const auto& [user, ell] : net.users) {
    (void)ell;
    if (net.mirror_table.count(user)) continue;
    const auto defaults = default_mirror_angles(user);
    if (!defaults) {
      fail(name, line_no, "user '" + user + "' has no [mirrors] entry");
    }
    net.mirror_table[user] = *defaults;
  }
  // Drop mirror entries for unknown names so serialization stays canonical.
  for (auto it = net.mirror_table.begin(); it != net.mirror_table.end();) {
    if (!net.has_user(it->first)) {
      fail(name, line_no, "[mirrors] entry for unknown user '" + it->first + "'");
    }
    ++it;
  }

  if (have_sorter_section) {
    net.sorter = build_tree_from_entries(name, tree_entries, sorter_section_line);
  } else {
    std::vector<int> addresses;
    for (const auto& [user, ell] : net.users) {
      (void)user;
      addresses.push_back(ell);
    }
    net.sorter = build_sorter_tree(addresses, net.use_qwp);
  }

  try {
    net.validate();
  } catch (const std::invalid_argument& e) {
    fail(name, line_no, std::string("network validation: ") + e.what());
  }

  for (std::size_t i = 0; i < sessions.size(); ++i) {
    PendingSession& s = sessions[i];
    const std::string where = "session " + std::to_string(i + 1);
    if (!s.has_sender) fail(name, s.line, where + ": missing sender");
    if (!s.has_receiver) fail(name, s.line, where + ": missing receiver");
    if (!s.has_photons) fail(name, s.line, where + ": missing photons");
    if (!s.has_seed) fail(name, s.line, where + ": missing seed");
    if (!net.has_user(s.cfg.sender)) {
      fail(name, s.line, where + ": unknown sender '" + s.cfg.sender + "'");
    }
    if (!net.has_user(s.cfg.receiver)) {
      fail(name, s.line, where + ": unknown receiver '" + s.cfg.receiver + "'");
    }
    try {
      s.cfg.validate();
    } catch (const std::invalid_argument& e) {
      fail(name, s.line, where + ": " + e.what());
    }
    scenario.sessions.push_back(std::move(s.cfg));
  }

  return scenario;
}

Scenario parse_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open scenario file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_scenario_text(buffer.str(), path);
}

std::string serialize_scenario(const Scenario& scenario) {
  const NetworkConfig& net = scenario.network;
  std::ostringstream out;
  out << "[network]\n";
  for (const auto& [user, ell] : net.users) {
    out << "user = " << user << ' ' << ell << '\n';
  }
  out << "max_abs_ell = " << net.max_abs_ell << '\n';
  out << "use_qwp = " << (net.use_qwp ? "yes" : "no") << '\n';

  out << "\n[mirrors]\n";
  for (const auto& [user, angles] : net.mirror_table) {
    out << user << " = " << format_pi_angle(angles.alpha1) << ", "
        << format_pi_angle(angles.alpha2) << '\n';
  }

  out << "\n[noise]\n";
  out << "ell_crosstalk_prob = " << format_double(net.noise.ell_crosstalk_prob) << '\n';
  out << "pol_flip_prob = " << format_double(net.noise.pol_flip_prob) << '\n';
  out << "loss_prob = " << format_double(net.noise.loss_prob) << '\n';

  out << "\n[sorter]\n";
  out << serialize_sorter_tree(net.sorter);

  for (const SessionConfig& s : scenario.sessions) {
    out << "\n[session]\n";
    out << "sender = " << s.sender << '\n';
    out << "receiver = " << s.receiver << '\n';
    out << "photons = " << s.photon_count << '\n';
    out << "seed = " << s.seed << '\n';
    out << "sample_fraction = " << format_double(s.sample_fraction) << '\n';
    out << "compensate_depth = " << (s.compensate_depth ? "yes" : "no") << '\n';
    if (s.eve.kind == Eavesdropper::Kind::intercept_resend) {
      out << "eavesdropper = intercept_resend " << format_double(s.eve.fraction)
          << '\n';
    } else {
      out << "eavesdropper = none\n";
    }
    out << "abort_threshold = " << format_double(s.abort_threshold) << '\n';
  }
  return out.str();
}

std::vector<ReportRow> run_scenario(const Scenario& scenario, bool parallel) {
  std::vector<ReportRow> rows(scenario.sessions.size());
  auto make_row = [&](std::size_t index) {
    const SessionConfig& cfg = scenario.sessions[index];
    const Bb84SessionResult result = run_session(cfg, scenario.network);
    ReportRow row;
    row.session = static_cast<int>(index);
    row.sender = cfg.sender;
    row.receiver = cfg.receiver;
    row.raw = result.raw_count;
    row.sifted = result.sifted_count;
    row.qber = result.qber_estimate;
    row.ok = !result.aborted;
    row.seed = result.seed;
    return row;
  };

  if (!parallel) {
    // One shared in-port: sessions execute strictly in order, each taking
    // and releasing the lease.
    InPortMux mux;
    for (std::size_t i = 0; i < scenario.sessions.size(); ++i) {
      const SessionConfig& cfg = scenario.sessions[i];
      const Bb84SessionResult result = run_session(cfg, scenario.network, mux);
      rows[i] = ReportRow{static_cast<int>(i), cfg.sender,
                          cfg.receiver,        result.raw_count,
                          result.sifted_count, result.qber_estimate,
                          !result.aborted,     result.seed};
    }
    return rows;
  }

  // Greedy batches of sessions on pairwise-disjoint user pairs; each batch
  // runs concurrently, each session on its own simulated in-port schedule.
  std::vector<bool> done(scenario.sessions.size(), false);
  std::size_t remaining = scenario.sessions.size();
  while (remaining > 0) {
    std::set<std::string> in_use;
    std::vector<std::size_t> batch;
    for (std::size_t i = 0; i < scenario.sessions.size(); ++i) {
      if (done[i]) continue;
      const SessionConfig& cfg = scenario.sessions[i];
      if (in_use.count(cfg.sender) || in_use.count(cfg.receiver)) continue;
      in_use.insert(cfg.sender);
      in_use.insert(cfg.receiver);
      batch.push_back(i);
    }
    std::vector<std::future<ReportRow>> futures;
    futures.reserve(batch.size());
    for (const std::size_t i : batch) {
      futures.push_back(std::async(std::launch::async, make_row, i));
    }
    for (std::size_t b = 0; b < batch.size(); ++b) {
      rows[batch[b]] = futures[b].get();
      done[batch[b]] = true;
      --remaining;
    }
  }
  return rows;
}

std::string format_report(const std::vector<ReportRow>& rows) {
  std::ostringstream out;
  out << "# oamnet bb84 report\n";
  out << "# session sender receiver raw sifted qber verdict seed\n";
  for (const ReportRow& row : rows) {
    char qber[32];
    std::snprintf(qber, sizeof(qber), "%.6f", row.qber);
    out << row.session << ' ' << row.sender << ' ' << row.receiver << ' ' << row.raw
        << ' ' << row.sifted << ' ' << qber << ' ' << (row.ok ? "ok" : "abort") << ' '
        << row.seed << '\n';
  }
  return out.str();
}

std::string run_scenario_report(const Scenario& scenario, bool parallel) {
  return format_report(run_scenario(scenario, parallel));
}

}  // namespace oamnet
