#include <cstring>
#include <iostream>

#include "vfield/acceptance.hpp"

int main(int argc, char** argv) {
  vfield::AcceptanceOptions options;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--quick") == 0) options.quick = true;
  }
  int failed = 0;
  for (const vfield::CriterionResult& r : vfield::run_acceptance(options)) {
    std::cout << vfield::format_result(r) << std::endl;
    failed += r.passed ? 0 : 1;
  }
  std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criteria failed") << std::endl;
  return failed == 0 ? 0 : 1;
}
