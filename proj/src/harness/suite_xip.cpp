#include "suite_util.hpp"

namespace hvsim::harness {

namespace {

CaseResult hvip_visible_in_mip_and_hip()
{
  CaseResult c("hvip_visible_in_mip_and_hip");
  Scenario sc;
  auto hs = sc.as.new_label(), back = sc.as.new_label();
  sc.prologue();
  sc.arm(TrapTarget::M, back);
  sc.enter(Mode::HS, hs);
  sc.as.bind(hs);
  sc.as.csrrsi(zero, csr::kHvip, 4);
  sc.as.csrr(a1, csr::kHip);
  sc.as.ecall();
  sc.as.bind(back);
  sc.as.csrr(a0, csr::kMip);
  sc.exit_pass();
  sc.handlers();
  c.expect_pass(sc.run());
  c.expect("mip.VSSIP", 1, (sc.reg(a0) & irq_bit::kVSSI) != 0, Provenance::Specification);
  c.expect("hip.VSSIP", 1, (sc.reg(a1) & irq_bit::kVSSI) != 0, Provenance::Specification);
  return c;
}

CaseResult hvip_seen_as_vsip_ssip()
{
  CaseResult c("hvip_seen_as_vsip_ssip");
  Scenario sc;
  auto hs = sc.as.new_label(), back = sc.as.new_label(), vs = sc.as.new_label();
  sc.prologue();
  set_csr(sc, csr::kHideleg, irq_bit::kVSSI);
  sc.arm(TrapTarget::M, back);
  sc.enter(Mode::HS, hs);
  sc.as.bind(hs);
  sc.as.csrrsi(zero, csr::kHvip, 4);
  sc.as.ecall();
  sc.as.bind(back);
  sc.enter(Mode::VS, vs);
  sc.as.bind(vs);
  sc.as.csrr(a0, csr::kSip);
  sc.as.csrr(a1, csr::kVsip);
  sc.exit_pass();
  sc.handlers();
  c.expect_pass(sc.run());
  c.expect("sip (VS)", irq_bit::kSSI, sc.reg(a0), Provenance::Specification);
  // Reading vsip directly from VS is a virtual-instruction fault; no value is produced.
  c.expect("vsip (VS) cause", exc::kVirtualInstruction, sc.reg(record::kCause), Provenance::Specification);
  return c;
}

CaseResult vs_clear_sip_clears_hvip()
{
  CaseResult c("vs_clear_sip_clears_hvip");
  Scenario sc;
  auto vs = sc.as.new_label(), back = sc.as.new_label();
  sc.prologue();
  set_csr(sc, csr::kHideleg, irq_bit::kVSSI);
  set_csr(sc, csr::kHvip, irq_bit::kVSSI);
  sc.arm(TrapTarget::M, back);
  sc.enter(Mode::VS, vs);
  sc.as.bind(vs);
  sc.as.csrr(a2, csr::kSip);
  sc.as.csrrci(zero, csr::kSip, 2);
  sc.as.ecall();
  sc.as.bind(back);
  sc.as.csrr(a0, csr::kHvip);
  sc.as.csrr(a1, csr::kMip);
  sc.exit_pass();
  sc.handlers();
  c.expect_pass(sc.run());
  c.expect("sip before", irq_bit::kSSI, sc.reg(a2), Provenance::Specification);
  c.expect("hvip", 0, sc.reg(a0), Provenance::Specification);
  c.expect("mip.VSSIP", 0, sc.reg(a1) & irq_bit::kVSSI, Provenance::Specification);
  return c;
}

CaseResult mideleg_forced_bits()
{
  CaseResult c("mideleg_forced_bits");
  Scenario sc;
  sc.prologue();
  sc.as.csrw(csr::kMideleg, zero);
  sc.as.csrr(a0, csr::kMideleg);
  set_csr(sc, csr::kMideleg, 0x222);
  sc.as.csrr(a1, csr::kMideleg);
  set_csr(sc, csr::kMideleg, ~uint64_t{0});
  sc.as.csrr(a2, csr::kMideleg);
  sc.exit_pass();
  sc.handlers();
  c.expect_pass(sc.run());
  c.expect("after 0", 0x1444, sc.reg(a0), Provenance::Specification);
  c.expect("after 0x222", 0x1666, sc.reg(a1), Provenance::Specification);
  c.expect("after ~0", 0x1666, sc.reg(a2), Provenance::Specification);
  return c;
}

CaseResult vsip_hidden_without_hideleg()
{
  CaseResult c("vsip_hidden_without_hideleg");
  Scenario sc;
  auto vs = sc.as.new_label();
  sc.prologue();
  set_csr(sc, csr::kHideleg, 0);
  set_csr(sc, csr::kHvip, irq_bit::kVSSI);
  sc.as.csrr(a1, csr::kVsip);
  sc.as.csrr(a2, csr::kHip);
  sc.enter(Mode::VS, vs);
  sc.as.bind(vs);
  sc.as.csrr(a0, csr::kSip);
  sc.exit_pass();
  sc.handlers();
  c.expect_pass(sc.run());
  c.expect("sip (VS)", 0, sc.reg(a0), Provenance::Specification);
  c.expect("vsip (M)", 0, sc.reg(a1), Provenance::Specification);
  c.expect("hip.VSSIP", 1, (sc.reg(a2) & irq_bit::kVSSI) != 0, Provenance::Specification);
  return c;
}

CaseResult sip_aliases_mip()
{
  CaseResult c("sip_aliases_mip");
  Scenario sc;
  auto hs = sc.as.new_label(), back = sc.as.new_label();
  sc.prologue();
  set_csr(sc, csr::kMideleg, irq_bit::kSSI);
  sc.as.csrrsi(zero, csr::kMip, 2);
  sc.arm(TrapTarget::M, back);
  sc.enter(Mode::HS, hs);
  sc.as.bind(hs);
  sc.as.csrr(a0, csr::kSip);
  sc.as.csrrci(zero, csr::kSip, 2);
  sc.as.ecall();
  sc.as.bind(back);
  sc.as.csrr(a1, csr::kMip);
  sc.exit_pass();
  sc.handlers();
  c.expect_pass(sc.run());
  c.expect("sip", irq_bit::kSSI, sc.reg(a0) & irq_bit::kSSI, Provenance::Specification);
  c.expect("mip.SSIP", 0, sc.reg(a1) & irq_bit::kSSI, Provenance::Specification);
  return c;
}

CaseResult hie_is_mie_view()
{
  CaseResult c("hie_is_mie_view");
  Scenario sc;
  sc.prologue();
  set_csr(sc, csr::kMie, ~uint64_t{0});
  sc.as.csrr(a0, csr::kHie);
  sc.as.csrr(a1, csr::kMie);
  sc.as.csrw(csr::kHie, zero);
  sc.as.csrr(a2, csr::kMie);
  sc.exit_pass();
  sc.handlers();
  c.expect_pass(sc.run());
  c.expect("hie", irq_bit::kHsMask, sc.reg(a0), Provenance::Specification);
  c.expect("mie", irq_bit::kAll, sc.reg(a1), Provenance::Specification);
  c.expect("mie after hie=0", irq_bit::kAll & ~irq_bit::kHsMask, sc.reg(a2), Provenance::Specification);
  return c;
}

}  // namespace

std::vector<CaseResult> xip_cases()
{
  return {hvip_visible_in_mip_and_hip(), hvip_seen_as_vsip_ssip(),      vs_clear_sip_clears_hvip(),
          mideleg_forced_bits(),         vsip_hidden_without_hideleg(), sip_aliases_mip(),
          hie_is_mie_view()};
}

}  // namespace hvsim::harness
