#pragma once

#include <string>
#include <vector>

namespace heun::verify {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;  // measured numbers, human readable
  double seconds = 0.0;
};

// Runs the full verification suite (12 criteria).  Heavy spectra are solved
// once and shared between criteria.
std::vector<CriterionResult> run_all();

}  // namespace heun::verify
