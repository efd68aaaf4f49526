#pragma once

#include <map>
#include <string>
#include <vector>

#include "twm/sweep.hpp"

namespace twm {

enum class CheckKind { rel, abs, at_least, at_most };

// value compared with expected: |v - e| <= tol |e| (rel), |v - e| <= tol
// (abs), v >= e (at_least) or v <= e (at_most).
struct CaseCheck {
  std::string name;
  double value = 0.0;
  double expected = 0.0;
  double tol = 0.0;
  CheckKind kind = CheckKind::rel;
  bool passed = false;
};

CaseCheck make_check(std::string name, double value, double expected, double tol, CheckKind kind);

struct CaseReport {
  std::string id;
  std::string description;
  std::vector<CaseCheck> checks;
  std::vector<SweepResult> results;
  std::map<std::string, std::string> metadata;
  double wall_time_s = 0.0;

  bool passed() const;
};

std::vector<std::string> case_ids();

// Runs a built-in case; throws ConfigError for an unknown id.
CaseReport reproduce(const std::string& id, int workers = 1);

std::string to_string(CheckKind kind);
// Human-readable report, one line per check.
std::string format_report(const CaseReport& report);
std::string report_to_json_text(const CaseReport& report);

}  // namespace twm
