#include "suite_util.hpp"

namespace hvsim::harness {

namespace {

CaseResult vsei_before_vsti()
{
  CaseResult c("vsei_before_vsti");
  Scenario sc;
  auto start = sc.as.new_label();
  sc.prologue();
  const uint64_t both = irq_bit::kVSEI | irq_bit::kVSTI;
  set_csr(sc, csr::kHideleg, both);
  set_csr(sc, csr::kMie, both);
  set_csr(sc, csr::kHvip, both);
  or_csr(sc, csr::kVsstatus, status::kSIE);
  sc.enter(Mode::VS, start);
  sc.as.bind(start);
  sc.as.nop();
  sc.exit_fail(1);
  sc.handlers();
  c.expect_pass(sc.run());
  expect_trap(c, sc, {.level = kLevelVS, .cause = interrupt_cause(irq::kSEI)},
              Provenance::Specification);
  c.expect("epc", sc.as.address_of(start), sc.reg(record::kEpc), Provenance::Specification);
  c.expect("vsstatus.SPIE", 1, (sc.reg(record::kStatus) & status::kSPIE) != 0, Provenance::Specification);
  return c;
}

CaseResult mti_gated_by_mie()
{
  CaseResult c("mti_gated_by_mie");
  Scenario sc;
  auto after = sc.as.new_label();
  sc.prologue();
  set_csr(sc, csr::kMie, irq_bit::kMTI);
  set_csr(sc, csr::kMip, irq_bit::kMTI);
  sc.as.li(a0, 1);
  sc.as.csrrsi(zero, csr::kMstatus, 8);
  sc.as.bind(after);
  sc.as.li(a0, 2);
  sc.exit_fail(1);
  sc.handlers();
  c.expect_pass(sc.run());
  expect_trap(c, sc, {.level = kLevelM, .cause = interrupt_cause(irq::kMTI)}, Provenance::Specification);
  c.expect("a0", 1, sc.reg(a0), Provenance::Specification);
  c.expect("epc", sc.as.address_of(after), sc.reg(record::kEpc), Provenance::Specification);
  c.expect("mstatus.MPIE", 1, (sc.reg(record::kStatus) & status::kMPIE) != 0, Provenance::Specification);
  return c;
}

CaseResult ssi_to_hs_from_vs()
{
  CaseResult c("ssi_to_hs_from_vs");
  Scenario sc;
  auto start = sc.as.new_label();
  sc.prologue();
  set_csr(sc, csr::kMideleg, irq_bit::kSSI);
  set_csr(sc, csr::kMie, irq_bit::kSSI);
  set_csr(sc, csr::kMip, irq_bit::kSSI);
  sc.enter(Mode::VS, start);
  sc.as.bind(start);
  sc.as.nop();
  sc.exit_fail(1);
  sc.handlers();
  c.expect_pass(sc.run());
  expect_trap(c, sc, {.level = kLevelHS, .cause = interrupt_cause(irq::kSSI)},
              Provenance::Specification);
  c.expect("hstatus.SPV", 1, (sc.reg(record::kStatus) & hstatus::kSPV) != 0, Provenance::Specification);
  return c;
}

CaseResult msi_over_ssi()
{
  CaseResult c("msi_over_ssi");
  Scenario sc;
  auto start = sc.as.new_label();
  sc.prologue();
  set_csr(sc, csr::kMideleg, irq_bit::kSSI);
  set_csr(sc, csr::kMie, irq_bit::kSSI | irq_bit::kMSI);
  set_csr(sc, csr::kMip, irq_bit::kSSI | irq_bit::kMSI);
  sc.enter(Mode::U, start);
  sc.as.bind(start);
  sc.as.nop();
  sc.exit_fail(1);
  sc.handlers();
  c.expect_pass(sc.run());
  expect_trap(c, sc, {.level = kLevelM, .cause = interrupt_cause(irq::kMSI)},
              Provenance::Specification);
  return c;
}

CaseResult vssi_undelegated_to_hs()
{
  CaseResult c("vssi_undelegated_to_hs");
  Scenario sc;
  auto start = sc.as.new_label();
  sc.prologue();
  set_csr(sc, csr::kHideleg, 0);
  set_csr(sc, csr::kMie, irq_bit::kVSSI);
  set_csr(sc, csr::kHvip, irq_bit::kVSSI);
  sc.enter(Mode::VS, start);
  sc.as.bind(start);
  sc.as.nop();
  sc.exit_fail(1);
  sc.handlers();
  c.expect_pass(sc.run());
  expect_trap(c, sc, {.level = kLevelHS, .cause = interrupt_cause(irq::kVSSI)},
              Provenance::Specification);
  return c;
}

CaseResult sti_waits_for_sie()
{
  CaseResult c("sti_waits_for_sie");
  Scenario sc;
  auto start = sc.as.new_label();
  auto after = sc.as.new_label();
  sc.prologue();
  set_csr(sc, csr::kMideleg, irq_bit::kSTI);
  set_csr(sc, csr::kMie, irq_bit::kSTI);
  set_csr(sc, csr::kMip, irq_bit::kSTI);
  sc.enter(Mode::HS, start);
  sc.as.bind(start);
  sc.as.li(a0, 1);
  sc.as.csrrsi(zero, csr::kSstatus, 2);
  sc.as.bind(after);
  sc.as.li(a0, 2);
  sc.exit_fail(1);
  sc.handlers();
  c.expect_pass(sc.run());
  expect_trap(c, sc, {.level = kLevelHS, .cause = interrupt_cause(irq::kSTI)},
              Provenance::Specification);
  c.expect("a0", 1, sc.reg(a0), Provenance::Specification);
  c.expect("epc", sc.as.address_of(after), sc.reg(record::kEpc), Provenance::Specification);
  return c;
}

CaseResult vs_vectored()
{
  CaseResult c("vs_vectored");
  Scenario sc;
  auto start = sc.as.new_label();
  auto table = sc.as.new_label();
  std::vector<Assembler::Label> stubs;
  for (int i = 0; i < 16; ++i)
    stubs.push_back(sc.as.new_label());
  sc.prologue();
  sc.as.la(t0, table);
  sc.as.ori(t0, t0, 1);
  sc.as.csrw(csr::kVstvec, t0);
  set_csr(sc, csr::kHideleg, irq_bit::kVSTI);
  set_csr(sc, csr::kMie, irq_bit::kVSTI);
  set_csr(sc, csr::kHvip, irq_bit::kVSTI);
  or_csr(sc, csr::kVsstatus, status::kSIE);
  sc.enter(Mode::VS, start);
  sc.as.bind(start);
  sc.as.nop();
  sc.exit_fail(1);
  sc.as.bind(table);
  for (const auto& stub : stubs)
    sc.as.j(stub);
  for (int i = 0; i < 16; ++i) {
    sc.as.bind(stubs[i]);
    sc.as.li(s9, i);
    sc.as.j(sc.vs_handler);
  }
  sc.handlers();
  c.expect_pass(sc.run());
  expect_trap(c, sc, {.level = kLevelVS, .cause = interrupt_cause(irq::kSTI)},
              Provenance::Specification);
  c.expect("vector", irq::kSTI, sc.reg(s9), Provenance::Specification);
  return c;
}

}  // namespace

std::vector<CaseResult> interrupt_cases()
{
  return {vsei_before_vsti(),       mti_gated_by_mie(),  ssi_to_hs_from_vs(), msi_over_ssi(),
          vssi_undelegated_to_hs(), sti_waits_for_sie(), vs_vectored()};
}

}  // namespace hvsim::harness
