#pragma once

#include <optional>
#include <string>

#include "hvsim/harness/scenario.hpp"
#include "hvsim/harness/suite.hpp"

namespace hvsim::harness {

/// Expected contents of the standard trap record.
struct ExpectedTrap {
  uint64_t level = kLevelM;
  uint64_t cause = 0;
  std::optional<uint64_t> tval = std::nullopt;
  std::optional<uint64_t> tval2 = std::nullopt;
  std::optional<uint64_t> tinst = std::nullopt;
  std::optional<bool> gva = std::nullopt;
};

inline bool recorded_gva(const Scenario& sc)
{
  const uint64_t st = sc.reg(record::kStatus);
  switch (sc.reg(record::kLevel)) {
    case kLevelM: return st & status::kGVA;
    case kLevelHS: return st & hstatus::kGVA;
    default: return false;
  }
}

inline void expect_trap(CaseResult& c, const Scenario& sc, const ExpectedTrap& e, Provenance p)
{
  c.expect("level", e.level, sc.reg(record::kLevel), p);
  c.expect("cause", e.cause, sc.reg(record::kCause), p);
  if (e.tval)
    c.expect("tval", *e.tval, sc.reg(record::kTval), p);
  if (e.tval2)
    c.expect("tval2", *e.tval2, sc.reg(record::kTval2), p);
  if (e.tinst)
    c.expect("tinst", *e.tinst, sc.reg(record::kTinst), p);
  if (e.gva)
    c.expect("gva", *e.gva, recorded_gva(sc), p);
}

inline uint64_t interrupt_cause(uint64_t code) { return kInterruptFlag | code; }

/// Writes `value` to CSR `address` from the current (M-mode) code. Clobbers t0.
inline void set_csr(Scenario& sc, uint16_t address, uint64_t value)
{
  sc.as.li(t0, value);
  sc.as.csrw(address, t0);
}

/// Sets bits of CSR `address`. Clobbers t0.
inline void or_csr(Scenario& sc, uint16_t address, uint64_t bits)
{
  sc.as.li(t0, bits);
  sc.as.csrs(address, t0);
}

/// Points hgatp at the scenario's G-stage tables. Clobbers t0.
inline void enable_gstage(Scenario& sc, uint16_t vmid = 0) { set_csr(sc, csr::kHgatp, make_hgatp(sc.g_root(), vmid)); }
/// Points vsatp at the scenario's VS-stage tables. Clobbers t0.
inline void enable_vs_stage(Scenario& sc, uint16_t asid = 0) { set_csr(sc, csr::kVsatp, make_satp(sc.vs_root(), asid)); }

/// Host address of a page-table slot, for programs that rewrite PTEs.
inline uint64_t host_slot(PageTableBuilder& b, uint64_t root, uint64_t va, unsigned level)
{
  return b.host_address(b.slot_address(root, va, level).value());
}

inline uint64_t leaf_pte(uint64_t pa, uint64_t flags) { return ((pa >> 12) << pte::kPpnShift) | flags | pte::kV; }

/// Composes the scenario's recorded VS-stage and G-stage mappings.
inline std::optional<uint64_t> composed(Scenario& sc, uint64_t va)
{
  auto gpa = sc.vs().lookup(va);
  return gpa ? sc.g().lookup(*gpa) : std::nullopt;
}

}  // namespace hvsim::harness
