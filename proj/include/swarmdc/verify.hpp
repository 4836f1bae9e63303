#pragma once

#include <functional>
#include <string>
#include <vector>

namespace swarmdc {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Quick self-checks of the library invariants (stencil exactness and order, FPK mass
/// and positivity, KDE normalization, controller identities, RNG known answers,
/// robot/integrator agreement, run determinism). Runs in a few seconds.
std::vector<CheckResult> run_verification(const std::function<void(const CheckResult&)>& on_result = {});

}  // namespace swarmdc
