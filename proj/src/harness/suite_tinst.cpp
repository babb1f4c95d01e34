#include "suite_util.hpp"

namespace hvsim::harness {

namespace {

constexpr uint64_t kGpa = layout::kGuestData;
constexpr uint64_t kGuestFaults =
    bit(exc::kInstrGuestPageFault) | bit(exc::kLoadGuestPageFault) | bit(exc::kStoreGuestPageFault);

template <typename Body>
void guest(Scenario& sc, bool vs_stage, uint64_t medeleg, Body body)
{
  auto start = sc.as.new_label();
  sc.prologue();
  enable_gstage(sc);
  if (vs_stage)
    enable_vs_stage(sc);
  set_csr(sc, csr::kMedeleg, medeleg);
  sc.enter(Mode::VS, start);
  sc.as.bind(start);
  body();
  sc.exit_pass();
  sc.handlers();
}

CaseResult explicit_load()
{
  CaseResult c("explicit_load");
  Scenario sc;
  guest(sc, false, kGuestFaults, [&] {
    sc.as.li(a1, kGpa);
    sc.as.lw(a0, a1, 8);
  });
  c.expect_pass(sc.run());
  expect_trap(c, sc,
              {.level = kLevelHS,
               .cause = exc::kLoadGuestPageFault,
               .tval = kGpa + 8,
               .tval2 = (kGpa + 8) >> 2,
               .tinst = enc::lw(a0, 0, 0)},
              Provenance::Specification);
  return c;
}

CaseResult explicit_store()
{
  CaseResult c("explicit_store");
  Scenario sc;
  guest(sc, false, kGuestFaults, [&] {
    sc.as.li(a1, kGpa);
    sc.as.sd(a2, a1, 16);
  });
  c.expect_pass(sc.run());
  expect_trap(c, sc,
              {.level = kLevelHS,
               .cause = exc::kStoreGuestPageFault,
               .tval = kGpa + 16,
               .tval2 = (kGpa + 16) >> 2,
               .tinst = enc::sd(a2, 0, 0)},
              Provenance::Specification);
  return c;
}

CaseResult amo_store()
{
  CaseResult c("amo_store");
  Scenario sc;
  guest(sc, false, kGuestFaults, [&] {
    sc.as.li(a1, kGpa + 0x20);
    sc.as.amoadd_d(a0, a2, a1);
  });
  c.expect_pass(sc.run());
  expect_trap(c, sc,
              {.level = kLevelHS,
               .cause = exc::kStoreGuestPageFault,
               .tval = kGpa + 0x20,
               .tval2 = (kGpa + 0x20) >> 2,
               .tinst = enc::r_type(0x2F, a0, 3, 0, a2, 0)},
              Provenance::Specification);
  return c;
}

CaseResult implicit_pte_read()
{
  CaseResult c("implicit_pte_read");
  Scenario sc;
  constexpr uint64_t kVa = 0x1000'0000;
  sc.vs().map(sc.vs_root(), kVa, kGpa, 0, perm::kRW);
  const uint64_t slot = sc.vs().slot_address(sc.vs_root(), kVa, 0).value();
  sc.g().set_raw(sc.g_root(), slot & ~uint64_t{0xFFF}, 0, 0);
  guest(sc, true, kGuestFaults, [&] {
    sc.as.li(a1, kVa);
    sc.as.ld(a0, a1);
  });
  c.expect_pass(sc.run());
  expect_trap(c, sc,
              {.level = kLevelHS,
               .cause = exc::kLoadGuestPageFault,
               .tval = kVa,
               .tval2 = slot >> 2,
               .tinst = kTinstPteRead,
               .gva = true},
              Provenance::Specification);
  return c;
}

CaseResult implicit_pte_read_on_store()
{
  CaseResult c("implicit_pte_read_on_store");
  Scenario sc;
  constexpr uint64_t kVa = 0x1000'0000;
  sc.vs().map(sc.vs_root(), kVa, kGpa, 0, perm::kRW);
  const uint64_t slot = sc.vs().slot_address(sc.vs_root(), kVa, 0).value();
  sc.g().set_raw(sc.g_root(), slot & ~uint64_t{0xFFF}, 0, 0);
  guest(sc, true, kGuestFaults, [&] {
    sc.as.li(a1, kVa);
    sc.as.sd(a0, a1);
  });
  c.expect_pass(sc.run());
  // The walk itself only reads, yet the fault reports the original access type.
  expect_trap(c, sc,
              {.level = kLevelHS,
               .cause = exc::kStoreGuestPageFault,
               .tval = kVa,
               .tval2 = slot >> 2,
               .tinst = kTinstPteRead},
              Provenance::Specification);
  return c;
}

CaseResult fetch_fault_tinst_zero()
{
  CaseResult c("fetch_fault_tinst_zero");
  Scenario sc;
  guest(sc, false, kGuestFaults, [&] {
    sc.as.li(a1, kGpa);
    sc.as.jr(a1);
  });
  c.expect_pass(sc.run());
  expect_trap(c, sc,
              {.level = kLevelHS, .cause = exc::kInstrGuestPageFault, .tval = kGpa, .tval2 = kGpa >> 2, .tinst = 0},
              Provenance::Specification);
  return c;
}

CaseResult illegal_tinst_zero()
{
  CaseResult c("illegal_tinst_zero");
  Scenario sc;
  guest(sc, false, 0, [&] { sc.as.emit(0xFFFF'FFFF); });
  c.expect_pass(sc.run());
  expect_trap(c, sc, {.level = kLevelM, .cause = exc::kIllegalInstruction, .tval = 0xFFFF'FFFF, .tval2 = 0, .tinst = 0},
              Provenance::Specification);
  return c;
}

}  // namespace

std::vector<CaseResult> tinst_cases()
{
  return {explicit_load(),          explicit_store(),         amo_store(),         implicit_pte_read(),
          implicit_pte_read_on_store(), fetch_fault_tinst_zero(), illegal_tinst_zero()};
}

}  // namespace hvsim::harness
