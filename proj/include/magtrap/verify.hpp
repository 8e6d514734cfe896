#ifndef MAGTRAP_VERIFY_HPP
#define MAGTRAP_VERIFY_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace magtrap {

struct CheckResult {
  std::string name;
  bool passed = false;
  double worst = 0.0;      // largest observed deviation
  double tolerance = 0.0;
  std::string detail;
};

//! Runs the invariant suite (random draws seeded by `seed`). Never throws for a
//! failing check; an exception inside a check is reported as a failure.
std::vector<CheckResult> run_verify(std::uint64_t seed = 0);

}  // namespace magtrap

#endif
