#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace vfield {

struct AcceptanceOptions {
  /// Fewer random samples; every criterion still runs at its stated tolerance.
  bool quick = false;
  std::uint64_t seed = 20240229;
};

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

/// Runs the nine acceptance criteria in order. Exceptions inside a criterion
/// are caught and reported as a failure of that criterion.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options = {});

/// "PASS [id] name: detail (x.xx s)"
std::string format_result(const CriterionResult& result);

}  // namespace vfield
