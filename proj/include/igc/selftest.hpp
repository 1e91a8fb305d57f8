#pragma once

// Numerical self-checks against independent oracles (finite differences,
// vector algebra, exact identities, step halving).

#include <string>
#include <vector>

namespace igc {

struct SelftestCheck {
  std::string name;
  double value = 0.0;      // worst error or measured ratio
  double threshold = 0.0;  // value must be below this (or inside [lo, hi])
  double lower = 0.0;      // used by range checks only
  bool passed = false;
  std::string detail;
};

struct SelftestReport {
  std::vector<SelftestCheck> checks;
  double seconds = 0.0;

  bool passed() const;
};

SelftestReport run_selftest();

}  // namespace igc
