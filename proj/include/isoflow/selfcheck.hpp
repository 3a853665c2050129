#pragma once

#include <functional>
#include <string>
#include <vector>

namespace isoflow {

struct CheckResult {
  bool pass = true;
  std::string detail;
};

struct Check {
  std::string name;  // "module/short_name"
  std::function<CheckResult()> fn;
};

/// Registry of the worked numeric examples behind `isoflow selftest`.
const std::vector<Check>& all_checks();

/// Checks whose name starts with the given prefix ("" = all).
std::vector<const Check*> checks_matching(const std::string& prefix);

}  // namespace isoflow
