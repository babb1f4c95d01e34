#include "suite_util.hpp"

namespace hvsim::harness {

namespace {

constexpr uint64_t kVa = 0x1000'0000;
constexpr uint64_t kGpa = layout::kGuestData;
constexpr uint64_t kHost = layout::kGuestDataHost;
constexpr uint64_t kPattern = 0x0123'4567'89AB'CDEF;

/// Delegates the given exception codes to HS, then runs `body` in VS with both stages on.
template <typename Body>
void guest(Scenario& sc, uint64_t medeleg, uint64_t hedeleg, Body body)
{
  auto start = sc.as.new_label();
  sc.prologue();
  enable_gstage(sc);
  enable_vs_stage(sc);
  set_csr(sc, csr::kMedeleg, medeleg);
  set_csr(sc, csr::kHedeleg, hedeleg);
  sc.enter(Mode::VS, start);
  sc.as.bind(start);
  body();
  sc.exit_pass();
  sc.handlers();
}

CaseResult full_walk_load()
{
  CaseResult c("full_walk_load");
  Scenario sc;
  sc.vs().map(sc.vs_root(), kVa, kGpa, 0, perm::kRW);
  sc.g().map(sc.g_root(), kGpa, kHost, 0, perm::kRW | perm::kU);
  sc.memory().write(kHost + 0x18, 8, kPattern);
  guest(sc, 0, 0, [&] {
    sc.as.li(a1, kVa + 0x18);
    sc.as.ld(a0, a1);
  });
  c.expect_pass(sc.run());
  const auto pa = composed(sc, kVa + 0x18);
  c.expect("composed.pa", kHost + 0x18, pa.value_or(0), Provenance::Oracle);
  c.expect("a0", sc.memory().read(pa.value_or(0), 8), sc.reg(a0), Provenance::Oracle);
  c.expect("traps", 0, sc.reg(record::kCount), Provenance::Trivial);
  return c;
}

CaseResult gstage_store_fault()
{
  CaseResult c("gstage_store_fault");
  Scenario sc;
  sc.vs().map(sc.vs_root(), kVa, kGpa, 0, perm::kRW);
  sc.g().map(sc.g_root(), kGpa, kHost, 0, perm::kR | perm::kU);
  guest(sc, bit(exc::kStoreGuestPageFault), 0, [&] {
    sc.as.li(a1, kVa + 0x40);
    sc.as.li(a2, 7);
    sc.as.sd(a2, a1);
  });
  c.expect_pass(sc.run());
  expect_trap(c, sc,
              {.level = kLevelHS,
               .cause = exc::kStoreGuestPageFault,
               .tval = kVa + 0x40,
               .tval2 = (kGpa + 0x40) >> 2,
               .tinst = enc::sd(a2, 0, 0),
               .gva = true},
              Provenance::Specification);
  c.expect("hstatus.SPV", 1, (sc.reg(record::kStatus) & hstatus::kSPV) != 0, Provenance::Specification);
  c.expect("memory.unchanged", 0, sc.memory().read(kHost + 0x40, 8), Provenance::Trivial);
  return c;
}

CaseResult vs_stage_fault_to_vs()
{
  CaseResult c("vs_stage_fault_to_vs");
  Scenario sc;
  sc.vs().map(sc.vs_root(), kVa, kGpa, 0, perm::kR);
  sc.g().map(sc.g_root(), kGpa, kHost, 0, perm::kRW | perm::kU);
  const uint64_t code = bit(exc::kStorePageFault);
  guest(sc, code, code, [&] {
    sc.as.li(a1, kVa + 8);
    sc.as.sw(a1, a1);
  });
  c.expect_pass(sc.run());
  expect_trap(c, sc, {.level = kLevelVS, .cause = exc::kStorePageFault, .tval = kVa + 8},
              Provenance::Specification);
  c.expect("vsstatus.SPP", 1, (sc.reg(record::kStatus) & status::kSPP) != 0, Provenance::Specification);
  return c;
}

CaseResult implicit_pte_fault_to_m()
{
  CaseResult c("implicit_pte_fault_to_m");
  Scenario sc;
  sc.vs().map(sc.vs_root(), kVa, kGpa, 0, perm::kRW);
  sc.g().map(sc.g_root(), kGpa, kHost, 0, perm::kRW | perm::kU);
  // Remove the G-stage mapping of the guest's leaf table page.
  const uint64_t slot = sc.vs().slot_address(sc.vs_root(), kVa, 0).value();
  sc.g().set_raw(sc.g_root(), slot & ~uint64_t{0xFFF}, 0, 0);
  guest(sc, 0, 0, [&] {
    sc.as.li(a1, kVa);
    sc.as.ld(a0, a1);
  });
  c.expect_pass(sc.run());
  expect_trap(c, sc,
              {.level = kLevelM,
               .cause = exc::kLoadGuestPageFault,
               .tval = kVa,
               .tval2 = slot >> 2,
               .tinst = kTinstPteRead,
               .gva = true},
              Provenance::Specification);
  c.expect("mstatus.MPV", 1, (sc.reg(record::kStatus) & status::kMPV) != 0, Provenance::Specification);
  c.expect("mstatus.MPP", 1, get_bits(sc.reg(record::kStatus), status::kMppShift, 2), Provenance::Specification);
  return c;
}

CaseResult vs_gigapage_over_g_4k()
{
  CaseResult c("vs_gigapage_over_g_4k");
  Scenario sc;
  constexpr uint64_t kGigaVa = 0x1'0000'0000;
  sc.vs().map(sc.vs_root(), kGigaVa, kGpa, 2, perm::kRW);
  sc.g().map(sc.g_root(), kGpa + 0x5000, kHost + 0x5000, 0, perm::kRW | perm::kU);
  sc.memory().write(kHost + 0x5008, 8, kPattern ^ 0xFF);
  guest(sc, 0, 0, [&] {
    sc.as.li(a1, kGigaVa + 0x5008);
    sc.as.ld(a0, a1);
    sc.as.ld(a2, a1);
  });
  c.expect_pass(sc.run());
  const auto pa = composed(sc, kGigaVa + 0x5008);
  c.expect("composed.pa", kHost + 0x5008, pa.value_or(0), Provenance::Oracle);
  c.expect("a0", sc.memory().read(pa.value_or(0), 8), sc.reg(a0), Provenance::Oracle);
  c.expect("a2", sc.reg(a0), sc.reg(a2), Provenance::Trivial);
  return c;
}

CaseResult vu_store_to_supervisor_page()
{
  CaseResult c("vu_store_to_supervisor_page");
  Scenario sc;
  auto start = sc.as.new_label();
  auto user = sc.as.new_label();
  // VU code runs from a U mapping of the code page.
  sc.vs().map(sc.vs_root(), 0x2000'0000, layout::kCode, 0, perm::kRX | perm::kU);
  sc.vs().map(sc.vs_root(), 0x2000'1000, layout::kCode + 0x1000, 0, perm::kRX | perm::kU);
  sc.vs().map(sc.vs_root(), kVa, kGpa, 0, perm::kRW);
  sc.g().map(sc.g_root(), kGpa, kHost, 0, perm::kRW | perm::kU);
  sc.prologue();
  enable_gstage(sc);
  enable_vs_stage(sc);
  set_csr(sc, csr::kMedeleg, bit(exc::kStorePageFault));
  set_csr(sc, csr::kHedeleg, bit(exc::kStorePageFault));
  sc.enter(Mode::VS, start);
  sc.as.bind(start);
  // From VS, sret into VU at the U alias of `user`.
  sc.as.la(t0, user);
  sc.as.li(t1, layout::kCode);
  sc.as.sub(t0, t0, t1);
  sc.as.li(t1, 0x2000'0000);
  sc.as.add(t0, t0, t1);
  sc.as.csrw(csr::kSepc, t0);
  sc.as.li(t0, status::kSPP);
  sc.as.csrc(csr::kSstatus, t0);
  sc.as.sret();
  sc.as.bind(user);
  sc.as.li(a1, kVa);
  sc.as.sd(a1, a1);
  sc.exit_pass();
  sc.handlers();
  c.expect_pass(sc.run());
  expect_trap(c, sc, {.level = kLevelVS, .cause = exc::kStorePageFault, .tval = kVa}, Provenance::Specification);
  c.expect("vsstatus.SPP", 0, (sc.reg(record::kStatus) & status::kSPP) != 0, Provenance::Specification);
  return c;
}

}  // namespace

std::vector<CaseResult> two_stage_cases()
{
  return {full_walk_load(),         gstage_store_fault(),   vs_stage_fault_to_vs(),
          implicit_pte_fault_to_m(), vs_gigapage_over_g_4k(), vu_store_to_supervisor_page()};
}

}  // namespace hvsim::harness
