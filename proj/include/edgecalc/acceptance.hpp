#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace edgecalc {

struct CriterionResult {
  int number = 0;
  std::string name;
  bool pass = false;
  std::string detail;
};

/// Runs the full acceptance suite, printing one pass/fail line per criterion.
std::vector<CriterionResult> run_acceptance(int jobs, std::ostream& log);

/// True iff every criterion passed.
bool all_passed(const std::vector<CriterionResult>& results);

}  // namespace edgecalc
