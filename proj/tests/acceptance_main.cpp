// Prints one PASS/FAIL block per acceptance criterion. Arguments select
// criteria by number; none runs all nine. Exit status is nonzero when any
// selected criterion fails.

#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include "sumtails/acceptance.hpp"

int main(int argc, char** argv) {
  std::vector<int> ids;
  for (int i = 1; i < argc; ++i) {
    char* end = nullptr;
    const long id = std::strtol(argv[i], &end, 10);
    if (*end != '\0' || id < 1 || id > sumtails::kCriterionCount) {
      std::cerr << "usage: sumtails_acceptance [criterion 1-9 ...]\n";
      return 2;
    }
    ids.push_back(static_cast<int>(id));
  }
  if (ids.empty()) {
    for (int id = 1; id <= sumtails::kCriterionCount; ++id) ids.push_back(id);
  }
  int failed = 0;
  for (int id : ids) {
    const auto result = sumtails::run_criterion(id);
    std::cout << sumtails::format_result(result) << std::flush;
    failed += result.passed() ? 0 : 1;
  }
  return failed == 0 ? 0 : 1;
}
