#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

// Oracle-equivalence suite: every engine in the library is checked against
// an independent route to the same number (closed forms vs quadrature vs
// scenario enumeration vs Monte Carlo vs the stepped protocol simulator).
// Each check reports its worst absolute deviation; a tolerance profile can
// tighten, loosen, or subset the checks.

namespace repqed::cli {

struct VerifyCheck {
  std::string name;
  double deviation = 0.0;  // worst absolute deviation observed
  double tolerance = 0.0;
  bool pass = false;
};

// Runs the checks in their fixed order.  `tolerance_overrides` maps check
// names (or "all") to replacement tolerances; `selected` restricts the run
// to the named checks (empty = all).  Unknown names throw UsageError.
std::vector<VerifyCheck> run_verify_checks(
    const std::map<std::string, double>& tolerance_overrides = {},
    const std::vector<std::string>& selected = {});

// CLI entry point.  `profile_path` names a `key = value` tolerance profile
// ("all", a check name, or "checks = a,b" to subset); empty runs the
// defaults.  Prints one line per check; returns 0 iff all pass, 1 on any
// failure.  A missing or malformed profile is a usage error.
int run_verify(const std::string& profile_path, std::ostream& out,
               std::ostream& diag);

}  // namespace repqed::cli
