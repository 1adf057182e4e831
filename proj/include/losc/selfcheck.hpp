#pragma once

#include <functional>
#include <string>
#include <vector>

namespace losc {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Fast property and oracle checks across every module. Runs in order and
/// stops at the first failure; `on_result` sees each result as it completes.
std::vector<CheckResult> run_selfcheck(const std::function<void(const CheckResult&)>& on_result = {});

}  // namespace losc
