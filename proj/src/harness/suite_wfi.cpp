#include "suite_util.hpp"

namespace hvsim::harness {

namespace {

/// Sets `mstatus_bits` and `hstatus_bits`, then executes WFI in `mode`.
/// Virtual-instruction faults are delegated to HS; illegal instructions stay in M.
CaseResult wfi_in(std::string name, Mode mode, uint64_t mstatus_bits, uint64_t hstatus_bits, uint64_t level,
                  uint64_t cause)
{
  CaseResult c(std::move(name));
  Scenario sc;
  auto start = sc.as.new_label();
  sc.prologue();
  set_csr(sc, csr::kMedeleg, bit(exc::kVirtualInstruction));
  if (mstatus_bits)
    or_csr(sc, csr::kMstatus, mstatus_bits);
  if (hstatus_bits)
    or_csr(sc, csr::kHstatus, hstatus_bits);
  sc.enter(mode, start);
  sc.as.bind(start);
  sc.as.wfi();
  sc.exit_fail(1);
  sc.handlers();
  c.expect_pass(sc.run());
  expect_trap(c, sc, {.level = level, .cause = cause, .tval = enc::kWfi}, Provenance::Specification);
  c.expect("traps", 1, sc.reg(record::kCount), Provenance::Trivial);
  return c;
}

CaseResult m_wfi_with_pending_interrupt()
{
  CaseResult c("m_wfi_with_pending_interrupt");
  Scenario sc;
  sc.prologue();
  // Pending and enabled in mie but globally masked: WFI completes, no trap.
  set_csr(sc, csr::kMie, irq_bit::kMSI);
  set_csr(sc, csr::kMip, irq_bit::kMSI);
  sc.as.wfi();
  sc.as.li(a0, 0x5A);
  sc.exit_pass();
  sc.handlers();
  c.expect_pass(sc.run());
  c.expect("a0", 0x5A, sc.reg(a0), Provenance::Trivial);
  c.expect("traps", 0, sc.reg(record::kCount), Provenance::Specification);
  return c;
}

CaseResult vs_wfi_permitted()
{
  CaseResult c("vs_wfi_permitted");
  Scenario sc;
  auto start = sc.as.new_label();
  sc.prologue();
  set_csr(sc, csr::kHideleg, irq_bit::kVSSI);
  set_csr(sc, csr::kMie, irq_bit::kVSSI);
  set_csr(sc, csr::kHvip, irq_bit::kVSSI);
  sc.enter(Mode::VS, start);
  sc.as.bind(start);
  // vsstatus.SIE is clear: the VS software interrupt wakes WFI without being taken.
  sc.as.wfi();
  sc.as.li(a0, 0x5B);
  sc.exit_pass();
  sc.handlers();
  c.expect_pass(sc.run());
  c.expect("a0", 0x5B, sc.reg(a0), Provenance::Trivial);
  c.expect("traps", 0, sc.reg(record::kCount), Provenance::Specification);
  return c;
}

}  // namespace

std::vector<CaseResult> wfi_cases()
{
  return {
      wfi_in("vs_vtw_virtual", Mode::VS, 0, hstatus::kVTW, kLevelHS, exc::kVirtualInstruction),
      wfi_in("vs_tw_illegal", Mode::VS, status::kTW, hstatus::kVTW, kLevelM, exc::kIllegalInstruction),
      wfi_in("hs_tw_illegal", Mode::HS, status::kTW, 0, kLevelM, exc::kIllegalInstruction),
      wfi_in("u_illegal", Mode::U, 0, 0, kLevelM, exc::kIllegalInstruction),
      wfi_in("vu_virtual", Mode::VU, 0, 0, kLevelHS, exc::kVirtualInstruction),
      wfi_in("vu_tw_illegal", Mode::VU, status::kTW, 0, kLevelM, exc::kIllegalInstruction),
      m_wfi_with_pending_interrupt(),
      vs_wfi_permitted(),
  };
}

}  // namespace hvsim::harness
