#include "suite_util.hpp"

namespace hvsim::harness {

namespace {

constexpr uint64_t kGpa = layout::kGuestData;
constexpr uint64_t kHost = layout::kGuestDataHost;

/// Emits the store of `value` to physical `addr` from M. Clobbers t1, t2.
void store_pte(Scenario& sc, uint64_t addr, uint64_t value)
{
  sc.as.li(t1, addr);
  sc.as.li(t2, value);
  sc.as.sd(t2, t1);
}

CaseResult gvma_all_after_gstage_remap()
{
  CaseResult c("gvma_all_after_gstage_remap");
  Scenario sc;
  sc.g().map(sc.g_root(), kGpa, kHost, 0, perm::kRW | perm::kU);
  sc.memory().write(kHost, 8, 0x1111);
  sc.memory().write(kHost + 0x1000, 8, 0x2222);
  const uint64_t slot = host_slot(sc.g(), sc.g_root(), kGpa, 0);
  auto first = sc.as.new_label(), remap = sc.as.new_label(), second = sc.as.new_label();
  auto fence = sc.as.new_label(), third = sc.as.new_label();

  sc.prologue();
  enable_gstage(sc);
  sc.as.li(a1, kGpa);
  sc.arm(TrapTarget::M, remap);
  sc.enter(Mode::VS, first);
  sc.as.bind(first);
  sc.as.ld(a2, a1);
  sc.as.ecall();
  sc.as.bind(remap);
  store_pte(sc, slot, leaf_pte(kHost + 0x1000, perm::kRW | perm::kU));
  sc.arm(TrapTarget::M, fence);
  sc.enter(Mode::VS, second);
  sc.as.bind(second);
  sc.as.ld(a3, a1);
  sc.as.ecall();
  sc.as.bind(fence);
  sc.as.hfence_gvma();
  sc.enter(Mode::VS, third);
  sc.as.bind(third);
  sc.as.ld(a4, a1);
  sc.as.ecall();
  sc.handlers();

  c.expect_pass(sc.run());
  c.expect("before", 0x1111, sc.reg(a2), Provenance::Trivial);
  c.expect("stale", 0x1111, sc.reg(a3), Provenance::Trivial);
  c.expect("after", 0x2222, sc.reg(a4), Provenance::Specification);
  return c;
}

CaseResult vvma_all_after_vs_remap()
{
  CaseResult c("vvma_all_after_vs_remap");
  Scenario sc;
  constexpr uint64_t kVa = 0x1000'0000;
  sc.vs().map(sc.vs_root(), kVa, layout::kData, 0, perm::kRW);
  sc.memory().write(layout::kData, 8, 0xA);
  sc.memory().write(layout::kData + 0x1000, 8, 0xB);
  const uint64_t slot = host_slot(sc.vs(), sc.vs_root(), kVa, 0);
  auto first = sc.as.new_label(), remap = sc.as.new_label(), second = sc.as.new_label();
  auto fence = sc.as.new_label(), hs_fence = sc.as.new_label(), after_fence = sc.as.new_label();
  auto third = sc.as.new_label();

  sc.prologue();
  enable_gstage(sc);
  enable_vs_stage(sc);
  sc.as.li(a1, kVa);
  sc.arm(TrapTarget::M, remap);
  sc.enter(Mode::VS, first);
  sc.as.bind(first);
  sc.as.ld(a2, a1);
  sc.as.ecall();
  sc.as.bind(remap);
  store_pte(sc, slot, leaf_pte(layout::kData + 0x1000, perm::kRW));
  sc.arm(TrapTarget::M, fence);
  sc.enter(Mode::VS, second);
  sc.as.bind(second);
  sc.as.ld(a3, a1);
  sc.as.ecall();
  sc.as.bind(fence);
  sc.arm(TrapTarget::M, after_fence);
  sc.enter(Mode::HS, hs_fence);
  sc.as.bind(hs_fence);
  sc.as.hfence_vvma();
  sc.as.ecall();
  sc.as.bind(after_fence);
  sc.enter(Mode::VS, third);
  sc.as.bind(third);
  sc.as.ld(a4, a1);
  sc.as.ecall();
  sc.handlers();

  c.expect_pass(sc.run());
  c.expect("before", 0xA, sc.reg(a2), Provenance::Trivial);
  c.expect("stale", 0xA, sc.reg(a3), Provenance::Trivial);
  c.expect("after", 0xB, sc.reg(a4), Provenance::Specification);
  return c;
}

CaseResult vvma_spares_single_stage()
{
  CaseResult c("vvma_spares_single_stage");
  Scenario sc;
  constexpr uint64_t kVa = 0x2000'0000;
  sc.host().map(sc.host_root(), kVa, layout::kData + 0x2000, 0, perm::kRW);
  sc.memory().write(layout::kData + 0x2000, 8, 0xC);
  sc.memory().write(layout::kData + 0x3000, 8, 0xD);
  const uint64_t slot = host_slot(sc.host(), sc.host_root(), kVa, 0);
  auto first = sc.as.new_label(), remap = sc.as.new_label(), second = sc.as.new_label();

  sc.prologue();
  set_csr(sc, csr::kSatp, make_satp(sc.host_root()));
  sc.as.li(a1, kVa);
  sc.arm(TrapTarget::M, remap);
  sc.enter(Mode::HS, first);
  sc.as.bind(first);
  sc.as.ld(a2, a1);
  sc.as.ecall();
  sc.as.bind(remap);
  store_pte(sc, slot, leaf_pte(layout::kData + 0x3000, perm::kRW));
  sc.enter(Mode::HS, second);
  sc.as.bind(second);
  sc.as.hfence_vvma();
  sc.as.ld(a3, a1);
  sc.as.sfence_vma();
  sc.as.ld(a4, a1);
  sc.as.ecall();
  sc.handlers();

  c.expect_pass(sc.run());
  c.expect("before", 0xC, sc.reg(a2), Provenance::Trivial);
  c.expect("after_vvma", 0xC, sc.reg(a3), Provenance::Specification);
  c.expect("after_sfence", 0xD, sc.reg(a4), Provenance::Specification);
  return c;
}

CaseResult gvma_by_address_is_selective()
{
  CaseResult c("gvma_by_address_is_selective");
  Scenario sc;
  constexpr uint64_t kGpa2 = kGpa + 0x1000;
  sc.g().map(sc.g_root(), kGpa, kHost, 0, perm::kRW | perm::kU);
  sc.g().map(sc.g_root(), kGpa2, kHost + 0x1000, 0, perm::kRW | perm::kU);
  sc.memory().write(kHost, 8, 0x10);
  sc.memory().write(kHost + 0x1000, 8, 0x20);
  sc.memory().write(kHost + 0x2000, 8, 0x30);
  sc.memory().write(kHost + 0x3000, 8, 0x40);
  const uint64_t slot1 = host_slot(sc.g(), sc.g_root(), kGpa, 0);
  const uint64_t slot2 = host_slot(sc.g(), sc.g_root(), kGpa2, 0);
  auto first = sc.as.new_label(), remap = sc.as.new_label(), second = sc.as.new_label();

  sc.prologue();
  enable_gstage(sc);
  sc.as.li(a1, kGpa);
  sc.as.li(a2, kGpa2);
  sc.arm(TrapTarget::M, remap);
  sc.enter(Mode::VS, first);
  sc.as.bind(first);
  sc.as.ld(a3, a1);
  sc.as.ld(a4, a2);
  sc.as.ecall();
  sc.as.bind(remap);
  store_pte(sc, slot1, leaf_pte(kHost + 0x2000, perm::kRW | perm::kU));
  store_pte(sc, slot2, leaf_pte(kHost + 0x3000, perm::kRW | perm::kU));
  sc.as.li(t1, kGpa >> 2);
  sc.as.hfence_gvma(t1, zero);
  sc.enter(Mode::VS, second);
  sc.as.bind(second);
  sc.as.ld(a5, a1);
  sc.as.ld(a6, a2);
  sc.as.ecall();
  sc.handlers();

  c.expect_pass(sc.run());
  c.expect("first.before", 0x10, sc.reg(a3), Provenance::Trivial);
  c.expect("second.before", 0x20, sc.reg(a4), Provenance::Trivial);
  c.expect("first.flushed", 0x30, sc.reg(a5), Provenance::Specification);
  c.expect("second.stale", 0x20, sc.reg(a6), Provenance::Specification);
  return c;
}

CaseResult hfence_in(std::string name, Mode mode, bool gvma, uint64_t level, uint64_t cause)
{
  CaseResult c(std::move(name));
  Scenario sc;
  auto start = sc.as.new_label();
  sc.prologue();
  set_csr(sc, csr::kMedeleg, bit(exc::kVirtualInstruction));
  sc.enter(mode, start);
  sc.as.bind(start);
  const uint32_t raw = enc::r_type(0x73, 0, 0, 0, 0, gvma ? 0x31 : 0x11);
  sc.as.emit(raw);
  sc.exit_fail(1);
  sc.handlers();
  c.expect_pass(sc.run());
  expect_trap(c, sc, {.level = level, .cause = cause, .tval = raw}, Provenance::Specification);
  return c;
}

}  // namespace

std::vector<CaseResult> hfence_cases()
{
  return {
      gvma_all_after_gstage_remap(),
      vvma_all_after_vs_remap(),
      vvma_spares_single_stage(),
      gvma_by_address_is_selective(),
      hfence_in("vs_gvma_virtual", Mode::VS, true, kLevelHS, exc::kVirtualInstruction),
      hfence_in("vs_vvma_virtual", Mode::VS, false, kLevelHS, exc::kVirtualInstruction),
      hfence_in("u_vvma_illegal", Mode::U, false, kLevelM, exc::kIllegalInstruction),
  };
}

}  // namespace hvsim::harness
