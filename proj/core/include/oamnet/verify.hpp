#pragma once

#include <string>
#include <vector>

namespace oamnet {

struct VerifyCheck {
  std::string name;
  bool passed = false;
  int cases = 0;
  std::string note;
};

/// The built-in invariant suite behind `oamnet verify`: the quarter-wave
/// plate permutation grid, the order-2 rotation matrix closed form, the
/// eigenphase law for orders up to 6, and sorter determinism on {1,2,3,4}.
std::vector<VerifyCheck> run_builtin_checks();

bool all_passed(const std::vector<VerifyCheck>& checks);

}  // namespace oamnet
