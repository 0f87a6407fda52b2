#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "oamnet/network.hpp"
#include "oamnet/qkd.hpp"

namespace oamnet {

/// A network plus an ordered list of sessions to run against it. Seeds are
/// explicit in the file; nothing is drawn from ambient entropy.
struct Scenario {
  NetworkConfig network;
  std::vector<SessionConfig> sessions;
};

/// Parse and fully validate a scenario file. Errors carry
/// "file:line: message" diagnostics naming the offending field.
Scenario parse_scenario(const std::string& path);
Scenario parse_scenario_text(const std::string& text,
                             const std::string& name = "<scenario>");

/// Canonical text form; parse(serialize(s)) reproduces s exactly,
/// including the sorter tree.
std::string serialize_scenario(const Scenario& scenario);

/// The [sorter] section body for a tree, one node/leaf line per entry in
/// pre-order with root-relative port paths.
std::string serialize_sorter_tree(const SorterTree& tree);

/// Angle formatting used throughout the config format: "0" or "p/q pi".
std::string format_pi_angle(const PiAngle& angle);
PiAngle parse_pi_angle(const std::string& text);

struct ReportRow {
  int session = 0;
  std::string sender;
  std::string receiver;
  std::size_t raw = 0;
  std::size_t sifted = 0;
  double qber = 0.0;
  bool ok = true;
  std::uint64_t seed = 0;
};

/// Execute all sessions in order. With parallel set, sessions on disjoint
/// user pairs run concurrently (per-session seeds and transcripts keep the
/// result deterministic); rows always come back in session order.
std::vector<ReportRow> run_scenario(const Scenario& scenario, bool parallel = false);

/// Line-delimited report with a fixed field order, suitable for byte-wise
/// golden comparisons:
///   session sender receiver raw sifted qber verdict seed
std::string format_report(const std::vector<ReportRow>& rows);

std::string run_scenario_report(const Scenario& scenario, bool parallel = false);

}  // namespace oamnet
