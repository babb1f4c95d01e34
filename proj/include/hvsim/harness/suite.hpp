#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hvsim/machine.hpp"

namespace hvsim::harness {

/// Where an expected value comes from.
enum class Provenance : uint8_t {
  Specification,  ///< Architectural rule or decision table.
  Oracle,         ///< Independent computation (e.g. recorded page-table mappings).
  Trivial,        ///< Forced by construction of the test.
};

std::string_view to_string(Provenance p);

struct Check {
  std::string what;
  uint64_t expected = 0;
  uint64_t observed = 0;
  Provenance provenance = Provenance::Trivial;

  bool ok() const { return expected == observed; }
};

struct CaseResult {
  std::string name;
  std::vector<Check> checks;

  explicit CaseResult(std::string case_name) : name(std::move(case_name)) {}

  void expect(std::string what, uint64_t expected, uint64_t observed, Provenance provenance)
  {
    checks.push_back({std::move(what), expected, observed, provenance});
  }
  /// The program must reach the exit device with PASS.
  void expect_pass(const RunResult& r)
  {
    expect("run.status", static_cast<uint64_t>(RunStatus::Pass), static_cast<uint64_t>(r.status),
           Provenance::Trivial);
  }
  bool passed() const;
};

struct SuiteResult {
  std::string name;
  std::vector<CaseResult> cases;

  bool passed() const;
};

using SuiteFn = std::vector<CaseResult> (*)();

struct SuiteInfo {
  std::string_view name;
  std::string_view description;
  SuiteFn run;
};

/// All built-in suites, sorted by name.
std::span<const SuiteInfo> all_suites();
const SuiteInfo* find_suite(std::string_view name);

/// Runs the selected suites (all when `filter` is empty), one machine per
/// case, concurrently when `parallel`. Results are sorted by suite name.
std::vector<SuiteResult> run_suites(std::optional<std::string_view> filter = std::nullopt, bool parallel = true);

/// Human-readable report with expected/observed values for failing checks.
std::string format_report(const std::vector<SuiteResult>& results);
/// `suite.case=pass|fail` lines.
std::string format_machine(const std::vector<SuiteResult>& results);

// Suite entry points.
std::vector<CaseResult> tinst_cases();
std::vector<CaseResult> wfi_cases();
std::vector<CaseResult> hfence_cases();
std::vector<CaseResult> virtual_instruction_cases();
std::vector<CaseResult> interrupt_cases();
std::vector<CaseResult> xip_cases();
std::vector<CaseResult> hyp_access_cases();
std::vector<CaseResult> gstage_only_cases();
std::vector<CaseResult> two_stage_cases();

}  // namespace hvsim::harness
