#ifndef EIGENTUBE_ACCEPTANCE_HPP
#define EIGENTUBE_ACCEPTANCE_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include "eigentube/common.hpp"

namespace eigentube {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
};

struct AcceptanceOptions {
  std::uint64_t seed = 7;
  std::string out_dir;  // when set, reports are written under this directory
};

struct AcceptanceOutcome {
  std::vector<CriterionResult> criteria;
  bool all_passed() const;
};

// Runs every acceptance criterion at its pinned tolerance, printing one
// pass/fail line per criterion to `log`.
AcceptanceOutcome verify_all(std::ostream& log, const AcceptanceOptions& opt = {});

// The canonical deterministic report bundle (used by the byte-identity
// criterion and by `verify --out`): sweep JSON + microlocal JSON + toral
// L4 CSV built from one seed.
std::string report_bundle(std::uint64_t seed);

}  // namespace eigentube

#endif
