#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace gimcf {

struct CheckResult {
  int id;
  std::string name;
  bool passed;
  std::string detail;
  double seconds;
};

// The full verification suite: exact kernel/capacity identities, pole
// asymptotics, decay exponents, the mesh solver against closed-form annulus
// solutions, the p -> 1 obstacle limit, margin certificates, the constants
// ledger, and the no-schedule certificate. Deterministic for a fixed seed.
std::vector<CheckResult> run_acceptance_checks(std::uint64_t seed = 12345,
                                               int max_threads = 1);

// One pass/fail line per check.
std::string format_check_line(const CheckResult& r);

}  // namespace gimcf
