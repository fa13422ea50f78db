#pragma once

// The acceptance suite: one runner per criterion, each returning a
// pass/fail verdict with a byte-stable detail string.

#include <cstdint>
#include <string>
#include <vector>

namespace aztac {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
};

// Criteria 1..9 (10, report determinism, is checked by the caller running
// this twice and comparing the rendered reports).
std::vector<CriterionResult> run_acceptance(std::uint64_t seed);

std::string render_report(const std::vector<CriterionResult>& results);

// Full self-test: runs the suite twice for the determinism criterion and
// returns (report, all_pass).
std::pair<std::string, bool> run_selftest(std::uint64_t seed);

}  // namespace aztac
