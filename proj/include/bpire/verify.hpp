#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace bpire {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

struct VerifyOptions {
  std::uint64_t seed = 1;
  unsigned workers = 4;
  std::string scratch_dir;  // empty: system temp
};

// Runs the full verification suite on the built-in environments and
// returns one result per criterion.
std::vector<CriterionResult> run_acceptance(const VerifyOptions& opt);

bool all_pass(const std::vector<CriterionResult>& results);

}  // namespace bpire
