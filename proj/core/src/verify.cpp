#include "oamnet/verify.hpp"

#include <cmath>
#include <complex>

#include "oamnet/mode_algebra.hpp"
#include "oamnet/polarization.hpp"
#include "oamnet/rng.hpp"
#include "oamnet/sorter.hpp"

namespace oamnet {

namespace {

VerifyCheck check_table1_permutations() {
  VerifyCheck check{"table1-permutations", true, 0, ""};
  const Bb84State columns[4] = {{Basis::diagonal, 0},
                                {Basis::diagonal, 1},
                                {Basis::circular, 0},
                                {Basis::circular, 1}};
  // Rows P, P.P, P.P.P of the plate-action grid.
  const Bb84State expected[3][4] = {
      {{Basis::circular, 0}, {Basis::circular, 1}, {Basis::diagonal, 1}, {Basis::diagonal, 0}},
      {{Basis::diagonal, 1}, {Basis::diagonal, 0}, {Basis::circular, 1}, {Basis::circular, 0}},
      {{Basis::circular, 1}, {Basis::circular, 0}, {Basis::diagonal, 0}, {Basis::diagonal, 1}}};
  for (int d = 1; d <= 3; ++d) {
    for (int c = 0; c < 4; ++c) {
      const JonesVector actual = qwp_power(canonical_state(columns[c]), d);
      const JonesVector want = canonical_state(expected[d - 1][c]);
      if (!state_equivalent_up_to_phase(actual, want)) {
        check.passed = false;
        check.note = "row P^" + std::to_string(d) + " column " + std::to_string(c);
      }
      ++check.cases;
    }
  }
  return check;
}

VerifyCheck check_rotation_closed_form() {
  VerifyCheck check{"rot-N2-closed-form", true, 0, ""};
  Rng rng(0x5eed0002);
  for (int trial = 0; trial < 50; ++trial) {
    const double alpha = (rng.uniform01() * 4.0 - 2.0) * kPi;
    UnitaryMatrix expected(3);
    const double c2 = std::cos(alpha) * std::cos(alpha);
    const double s2 = std::sin(alpha) * std::sin(alpha);
    const double s2a = std::sin(2.0 * alpha);
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    expected.at(0, 0) = c2;
    expected.at(0, 1) = s2a * inv_sqrt2;
    expected.at(0, 2) = s2;
    expected.at(1, 0) = -s2a * inv_sqrt2;
    expected.at(1, 1) = std::cos(2.0 * alpha);
    expected.at(1, 2) = s2a * inv_sqrt2;
    expected.at(2, 0) = s2;
    expected.at(2, 1) = -s2a * inv_sqrt2;
    expected.at(2, 2) = c2;
    const double err = rotation_matrix(2, alpha).max_abs_diff(expected);
    if (err > 1e-12) {
      check.passed = false;
      check.note = "entrywise error " + std::to_string(err);
    }
    ++check.cases;
  }
  return check;
}

VerifyCheck check_eigenphase_law() {
  VerifyCheck check{"eigenphase-law-N6", true, 0, ""};
  Rng rng(0x5eed0003);
  for (int order = 0; order <= 6; ++order) {
    for (const int ell : admissible_ells(order)) {
      const ModeVector mode = lg_mode(ell, (order - std::abs(ell)) / 2);
      for (int trial = 0; trial < 20; ++trial) {
        const double alpha = (rng.uniform01() * 4.0 - 2.0) * kPi;
        const ModeVector rotated = apply_rotation(mode, alpha);
        const Complex phase = std::exp(Complex{0.0, -static_cast<double>(ell) * alpha});
        double worst = 0.0;
        for (std::size_t k = 0; k < mode.amplitudes.size(); ++k) {
          worst = std::max(worst,
                           std::abs(rotated.amplitudes[k] - phase * mode.amplitudes[k]));
        }
        if (worst > 1e-10) {
          check.passed = false;
          check.note = "order " + std::to_string(order) + " ell " + std::to_string(ell);
        }
        ++check.cases;
      }
    }
  }
  return check;
}

VerifyCheck check_sorter_determinism() {
  VerifyCheck check{"sorter-determinism-1234", true, 0, ""};
  const SorterTree tree = build_sorter_tree({1, 2, 3, 4}, /*use_qwp=*/true);
  Rng rng(0x5eed0004);
  for (const int ell : tree.addresses()) {
    const int expected_leaf = tree.leaf_for(ell);
    for (int trial = 0; trial < 10000; ++trial) {
      PhotonRecord photon;
      photon.ell = ell;
      photon.polarization = canonical_state({Basis::diagonal, 0});
      const RouteResult routed = route_photon(photon, tree, rng);
      if (routed.leaf_id != expected_leaf || routed.stray) {
        check.passed = false;
        check.note = "ell " + std::to_string(ell) + " strayed";
        break;
      }
    }
    ++check.cases;
  }
  return check;
}

}  // namespace

std::vector<VerifyCheck> run_builtin_checks() {
  return {check_table1_permutations(), check_rotation_closed_form(),
          check_eigenphase_law(), check_sorter_determinism()};
}

bool all_passed(const std::vector<VerifyCheck>& checks) {
  for (const VerifyCheck& c : checks) {
    if (!c.passed) return false;
  }
  return true;
}

}  // namespace oamnet
