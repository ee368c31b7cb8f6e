#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace selfdual {

struct PropertyResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct SelftestOptions {
  std::uint64_t seed = 0;
  std::string only;                        // substring filter on property names
  std::vector<std::string> catalog_paths;  // empty: built-in catalog
};

// Runs the invariant suite at reduced sizes. Failures are recorded in the
// results, never thrown. Output depends only on the options.
std::vector<PropertyResult> run_selftest(const SelftestOptions& options);

std::vector<std::string> selftest_property_names();

// One "PASS name: detail" / "FAIL name: detail" line per property, then a
// summary line.
std::string format_selftest_report(const std::vector<PropertyResult>& results);

}  // namespace selfdual
