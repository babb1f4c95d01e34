#include <algorithm>
#include <future>

#include <fmt/format.h>

#include "hvsim/harness/suite.hpp"

namespace hvsim::harness {

namespace {

constexpr SuiteInfo kSuites[] = {
    {"check_xip_regs", "aliasing of mip/hip/hvip/sip/vsip views", xip_cases},
    {"hfence_tests", "hfence.vvma / hfence.gvma affect only guest translations", hfence_cases},
    {"interrupt_tests", "interrupt priority and delegation across M/HS/VS", interrupt_cases},
    {"m_and_hs_using_vs_access", "hypervisor loads and stores from M and HS", hyp_access_cases},
    {"second_stage_only_translation", "G-stage translation with a bare VS stage", gstage_only_cases},
    {"tinst_tests", "tinst values written on trap entry", tinst_cases},
    {"two_stage_translation", "full VS-stage + G-stage translation and fault metadata", two_stage_cases},
    {"virtual_instruction", "virtual-instruction exception triggers", virtual_instruction_cases},
    {"wfi_exception_tests", "wfi trapping under TW/VTW", wfi_cases},
};

}  // namespace

std::string_view to_string(Provenance p)
{
  switch (p) {
    case Provenance::Specification: return "specification-derived";
    case Provenance::Oracle: return "oracle-derived";
    case Provenance::Trivial: return "trivially forced";
  }
  return "?";
}

bool CaseResult::passed() const
{
  return !checks.empty() && std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.ok(); });
}

bool SuiteResult::passed() const
{
  return !cases.empty() && std::all_of(cases.begin(), cases.end(), [](const CaseResult& c) { return c.passed(); });
}

std::span<const SuiteInfo> all_suites() { return kSuites; }

const SuiteInfo* find_suite(std::string_view name)
{
  auto it = std::find_if(std::begin(kSuites), std::end(kSuites),
                         [name](const SuiteInfo& s) { return s.name == name; });
  return it == std::end(kSuites) ? nullptr : &*it;
}

std::vector<SuiteResult> run_suites(std::optional<std::string_view> filter, bool parallel)
{
  std::vector<const SuiteInfo*> selected;
  for (const SuiteInfo& s : kSuites) {
    if (!filter || s.name == *filter)
      selected.push_back(&s);
  }
  std::vector<SuiteResult> results;
  if (parallel) {
    std::vector<std::future<SuiteResult>> futures;
    for (const SuiteInfo* s : selected) {
      futures.push_back(std::async(std::launch::async, [s] { return SuiteResult{std::string(s->name), s->run()}; }));
    }
    for (auto& f : futures)
      results.push_back(f.get());
  } else {
    for (const SuiteInfo* s : selected)
      results.push_back({std::string(s->name), s->run()});
  }
  std::sort(results.begin(), results.end(), [](const SuiteResult& a, const SuiteResult& b) { return a.name < b.name; });
  return results;
}

std::string format_report(const std::vector<SuiteResult>& results)
{
  std::string out;
  std::size_t passed = 0;
  for (const SuiteResult& s : results) {
    passed += s.passed();
    out += fmt::format("[{}] {} ({} cases)\n", s.passed() ? "PASS" : "FAIL", s.name, s.cases.size());
    for (const CaseResult& c : s.cases) {
      out += fmt::format("  [{}] {}\n", c.passed() ? "ok" : "FAIL", c.name);
      for (const Check& k : c.checks) {
        if (!k.ok()) {
          out += fmt::format("      {}: expected 0x{:x} observed 0x{:x} ({})\n", k.what, k.expected, k.observed,
                             to_string(k.provenance));
        }
      }
    }
  }
  out += fmt::format("{}/{} suites passed\n", passed, results.size());
  return out;
}

std::string format_machine(const std::vector<SuiteResult>& results)
{
  std::string out;
  for (const SuiteResult& s : results) {
    for (const CaseResult& c : s.cases)
      out += fmt::format("{}.{}={}\n", s.name, c.name, c.passed() ? "pass" : "fail");
  }
  return out;
}

}  // namespace hvsim::harness
