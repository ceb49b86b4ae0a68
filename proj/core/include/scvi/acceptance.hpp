#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace scvi {

struct CriterionResult {
  std::string id;
  std::string title;
  bool passed = false;
  std::string detail;
  nlohmann::json data;
  double seconds = 0.0;
  double time_limit = 0.0;
  bool within_time() const { return seconds <= time_limit; }
};

struct AcceptanceOptions {
  double gamma0_scale = 1.0;     // multiplies the A2 stepsize γ₀ (mutation hook)
  std::vector<std::string> only;  // criterion ids to run; empty: all
  std::size_t threads = 0;
  bool enforce_time = true;
};

struct AcceptanceReport {
  std::vector<CriterionResult> criteria;
  bool passed() const;
  // Deterministic part of the report (no timings).
  nlohmann::json to_json(bool include_timing = false) const;
};

AcceptanceReport run_acceptance_suite(const AcceptanceOptions& options = {});
std::string format_criterion_line(const CriterionResult& c);

}  // namespace scvi
