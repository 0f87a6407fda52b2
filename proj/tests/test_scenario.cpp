#include <string>
#include <vector>

#include "doctest.h"
#include "oamnet/scenario.hpp"

using namespace oamnet;

namespace {

const char* kScenarioPath = OAMNET_SCENARIO_DIR "/four_user.scenario";

std::string minimal_scenario_text() {
  return "[network]\n"
         "user = Alice 4\n"
         "user = Bob 2\n"
         "user = Charley 3\n"
         "user = David 1\n"
         "\n"
         "[session]\n"
         "sender = Alice\n"
         "receiver = Bob\n"
         "photons = 200\n"
         "seed = 9\n";
}

}  // namespace

TEST_CASE("pi-angle parsing and formatting") {
  CHECK(parse_pi_angle("3/4 pi") == PiAngle::of(3, 4));
  CHECK(parse_pi_angle("-1/2 pi") == PiAngle::of(-1, 2));
  CHECK(parse_pi_angle("0") == PiAngle::of(0, 1));
  CHECK(parse_pi_angle("2/8 pi") == PiAngle::of(1, 4));  // reduced
  CHECK(format_pi_angle(PiAngle::of(1, 1)) == "1/1 pi");
  CHECK(format_pi_angle(PiAngle::of(0, 1)) == "0");
  CHECK(format_pi_angle(PiAngle::of(-3, 2)) == "-3/2 pi");
  for (const char* bad : {"pi", "1/2", "0.5 pi", "1/2 pi trailing", "one pi"}) {
    CHECK_THROWS_AS(parse_pi_angle(bad), std::invalid_argument);
  }
  // round trip on a spread of rationals
  for (long long num = -8; num <= 8; ++num) {
    for (long long den = 1; den <= 8; ++den) {
      const PiAngle a = PiAngle::of(num, den);
      CHECK(parse_pi_angle(format_pi_angle(a)) == a);
    }
  }
}

TEST_CASE("bundled four-user scenario loads") {
  const Scenario scenario = parse_scenario(kScenarioPath);
  const NetworkConfig& net = scenario.network;
  CHECK(net.users.size() == 4);
  CHECK(net.address_of("Alice") == 4);
  CHECK(net.address_of("Bob") == 2);
  CHECK(net.address_of("Charley") == 3);
  CHECK(net.address_of("David") == 1);
  CHECK(net.mirror_table.at("Charley") ==
        MirrorAngles{PiAngle::of(1, 4), PiAngle::of(-1, 4)});
  CHECK(net.noise.loss_prob == 0.0);
  CHECK(scenario.sessions.size() == 12);
  CHECK(scenario.sessions.front().sender == "Alice");
  CHECK(scenario.sessions.front().photon_count == 10000);
  CHECK(scenario.sessions.front().seed == 101);
  // synthesized tree matches the directly built one
  CHECK(net.sorter == build_sorter_tree({1, 2, 3, 4}, true));
}

TEST_CASE("serialize-parse round trip is the identity") {
  const Scenario original = parse_scenario(kScenarioPath);
  const std::string first = serialize_scenario(original);
  const Scenario reparsed = parse_scenario_text(first, "roundtrip");
  const std::string second = serialize_scenario(reparsed);
  CHECK(first == second);
  CHECK(reparsed.network.users == original.network.users);
  CHECK(reparsed.network.sorter == original.network.sorter);
  CHECK(reparsed.sessions.size() == original.sessions.size());
}

TEST_CASE("explicit sorter section is honored") {
  std::string text = minimal_scenario_text();
  text +=
      "\n[sorter]\n"
      "node = -, 1/1 pi, 0, yes\n"
      "node = 0, 1/2 pi, 0, yes\n"
      "leaf = 00, 4\n"
      "leaf = 01, 2\n"
      "node = 1, 1/2 pi, -1/2 pi, yes\n"
      "leaf = 10, 1\n"
      "leaf = 11, 3\n";
  const Scenario scenario = parse_scenario_text(text, "inline");
  CHECK(scenario.network.sorter == build_sorter_tree({1, 2, 3, 4}, true));
}

TEST_CASE("scenario defaults") {
  const Scenario scenario = parse_scenario_text(minimal_scenario_text(), "mini");
  // mirror table filled from the reference defaults
  CHECK(scenario.network.mirror_table.at("Bob") ==
        MirrorAngles{PiAngle::of(0, 1), PiAngle::of(-1, 2)});
  const SessionConfig& s = scenario.sessions.front();
  CHECK(s.sample_fraction == 0.1);
  CHECK(s.compensate_depth);
  CHECK(s.eve == Eavesdropper::none());
  CHECK(s.abort_threshold == 0.11);
}

TEST_CASE("empty session list is a valid scenario") {
  const std::string text =
      "[network]\nuser = Alice 4\nuser = Bob 2\n";
  const Scenario scenario = parse_scenario_text(text, "empty");
  CHECK(scenario.sessions.empty());
  CHECK(run_scenario(scenario).empty());
}

TEST_CASE("parse diagnostics name the offending field and line") {
  SUBCASE("duplicate address names both users") {
    const std::string text = "[network]\nuser = Alice 4\nuser = Eve 4\n";
    CHECK_THROWS_WITH_AS(parse_scenario_text(text, "dup"),
                         doctest::Contains("'Alice' and 'Eve' share ell address 4"),
                         std::runtime_error);
    try {
      parse_scenario_text(text, "dup");
    } catch (const std::runtime_error& e) {
      CHECK(std::string(e.what()).find("dup:3:") != std::string::npos);
    }
  }
  SUBCASE("unknown session user") {
    std::string text = minimal_scenario_text();
    text += "\n[session]\nsender = Mallory\nreceiver = Bob\nphotons = 10\nseed = 1\n";
    CHECK_THROWS_WITH_AS(parse_scenario_text(text, "who"),
                         doctest::Contains("unknown sender 'Mallory'"),
                         std::runtime_error);
  }
  SUBCASE("fraction out of range") {
    std::string text = minimal_scenario_text();
    text += "sample_fraction = 1.5\n";
    CHECK_THROWS_WITH_AS(parse_scenario_text(text, "frac"),
                         doctest::Contains("sample_fraction 1.5 out of range"),
                         std::runtime_error);
  }
  SUBCASE("unknown keys and sections") {
    CHECK_THROWS_WITH_AS(parse_scenario_text("[network]\nuser = A 1\nwhat = 3\n", "k"),
                         doctest::Contains("unknown [network] key 'what'"),
                         std::runtime_error);
    CHECK_THROWS_WITH_AS(parse_scenario_text("[nonsense]\n", "s"),
                         doctest::Contains("unknown section"), std::runtime_error);
  }
  SUBCASE("bad angle") {
    const std::string text =
        "[network]\nuser = Alice 4\nuser = Bob 2\n[mirrors]\nAlice = 0.7, 0\n";
    CHECK_THROWS_WITH_AS(parse_scenario_text(text, "ang"),
                         doctest::Contains("mirrors 'Alice'"), std::runtime_error);
  }
  SUBCASE("missing required session field") {
    std::string text = "[network]\nuser = Alice 4\nuser = Bob 2\n";
    text += "[session]\nsender = Alice\nreceiver = Bob\nphotons = 10\n";
    CHECK_THROWS_WITH_AS(parse_scenario_text(text, "seed"),
                         doctest::Contains("missing seed"), std::runtime_error);
  }
  SUBCASE("incomplete sorter tree") {
    std::string text = "[network]\nuser = Alice 4\nuser = Bob 2\n";
    text += "[sorter]\nnode = -, 1/1 pi, 0, yes\nleaf = 0, 2\n";
    CHECK_THROWS_WITH_AS(parse_scenario_text(text, "tree"),
                         doctest::Contains("missing entry for path '1'"),
                         std::runtime_error);
  }
  SUBCASE("unreachable sorter entry") {
    std::string text = "[network]\nuser = Alice 4\nuser = Bob 2\n";
    text +=
        "[sorter]\nnode = -, 1/1 pi, 0, yes\nleaf = 0, 2\nleaf = 1, 4\n"
        "leaf = 10, 7\n";
    CHECK_THROWS_WITH_AS(parse_scenario_text(text, "orphan"),
                         doctest::Contains("unreachable entry at path '10'"),
                         std::runtime_error);
  }
  SUBCASE("unknown mirror user") {
    const std::string text =
        "[network]\nuser = Alice 4\nuser = Bob 2\n[mirrors]\nZed = 0, 0\n";
    CHECK_THROWS_WITH_AS(parse_scenario_text(text, "mz"),
                         doctest::Contains("unknown user 'Zed'"), std::runtime_error);
  }
}

TEST_CASE("report format and determinism") {
  std::string text = minimal_scenario_text();
  text += "\n[session]\nsender = Charley\nreceiver = David\nphotons = 300\nseed = 44\n";
  const Scenario scenario = parse_scenario_text(text, "small");

  const std::string report1 = run_scenario_report(scenario);
  const std::string report2 = run_scenario_report(scenario);
  CHECK(report1 == report2);

  // header plus one line per session, fields in documented order
  CHECK(report1.find("# oamnet bb84 report\n") == 0);
  CHECK(report1.find("# session sender receiver raw sifted qber verdict seed\n") !=
        std::string::npos);
  CHECK(report1.find("0 Alice Bob 200 ") != std::string::npos);
  CHECK(report1.find("1 Charley David 300 ") != std::string::npos);
  CHECK(report1.find(" ok 9\n") != std::string::npos);
  CHECK(report1.find(" ok 44\n") != std::string::npos);
}

TEST_CASE("parallel execution matches sequential rows") {
  const Scenario scenario = parse_scenario(kScenarioPath);
  Scenario trimmed = scenario;
  trimmed.sessions.clear();
  for (std::size_t i = 0; i < scenario.sessions.size(); ++i) {
    SessionConfig s = scenario.sessions[i];
    s.photon_count = 500;
    trimmed.sessions.push_back(s);
  }
  const std::string sequential = run_scenario_report(trimmed, false);
  const std::string parallel = run_scenario_report(trimmed, true);
  CHECK(sequential == parallel);
}
