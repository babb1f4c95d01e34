#include "suite_util.hpp"

namespace hvsim::harness {

namespace {

constexpr uint64_t kVa = 0x1000'0000;
constexpr uint64_t kGpa = layout::kGuestData;
constexpr uint64_t kHost = layout::kGuestDataHost;
constexpr uint64_t kPattern = 0x8877'6655'4433'2211;

/// Maps kVa + page -> kGpa + page -> kHost + page with the given VS-stage permissions.
void map_page(Scenario& sc, uint64_t page, uint64_t vs_perms, uint64_t g_perms = perm::kRWX | perm::kU)
{
  sc.vs().map(sc.vs_root(), kVa + page, kGpa + page, 0, vs_perms);
  sc.g().map(sc.g_root(), kGpa + page, kHost + page, 0, g_perms);
}

/// Enables both stages and `hstatus_bits`, then runs `body` in `mode`.
template <typename Body>
void host_side(Scenario& sc, Mode mode, uint64_t hstatus_bits, Body body)
{
  auto start = sc.as.new_label();
  sc.prologue();
  enable_gstage(sc);
  enable_vs_stage(sc);
  if (hstatus_bits)
    or_csr(sc, csr::kHstatus, hstatus_bits);
  if (mode == Mode::M) {
    body();
  } else {
    sc.enter(mode, start);
    sc.as.bind(start);
    body();
  }
  sc.exit_pass();
  sc.handlers();
}

CaseResult hs_hlv_reads_guest()
{
  CaseResult c("hs_hlv_reads_guest");
  Scenario sc;
  map_page(sc, 0, perm::kRW);
  sc.memory().write(kHost + 0x20, 8, kPattern);
  host_side(sc, Mode::HS, hstatus::kSPVP, [&] {
    sc.as.li(a1, kVa + 0x20);
    sc.as.hlv_d(a0, a1);
    sc.as.hlv_w(a2, a1);
    sc.as.hlv_bu(a3, a1);
  });
  c.expect_pass(sc.run());
  const auto pa = composed(sc, kVa + 0x20);
  c.expect("composed.pa", kHost + 0x20, pa.value_or(0), Provenance::Oracle);
  const uint64_t mem = sc.memory().read(pa.value_or(0), 8);
  c.expect("hlv.d", mem, sc.reg(a0), Provenance::Oracle);
  c.expect("hlv.w", sign_extend(mem & 0xFFFF'FFFF, 32), sc.reg(a2), Provenance::Oracle);
  c.expect("hlv.bu", mem & 0xFF, sc.reg(a3), Provenance::Oracle);
  c.expect("traps", 0, sc.reg(record::kCount), Provenance::Trivial);
  return c;
}

CaseResult hs_hsv_writes_guest()
{
  CaseResult c("hs_hsv_writes_guest");
  Scenario sc;
  map_page(sc, 0, perm::kRW);
  host_side(sc, Mode::HS, hstatus::kSPVP, [&] {
    sc.as.li(a1, kVa + 0x30);
    sc.as.li(a2, 0xCAFE'BABE);
    sc.as.hsv_w(a2, a1);
    sc.as.hlv_wu(a3, a1);
  });
  c.expect_pass(sc.run());
  const auto pa = composed(sc, kVa + 0x30);
  c.expect("memory", 0xCAFE'BABE, sc.memory().read(pa.value_or(0), 4), Provenance::Oracle);
  c.expect("hlv.wu", 0xCAFE'BABE, sc.reg(a3), Provenance::Trivial);
  return c;
}

CaseResult hsv_to_readonly_page()
{
  CaseResult c("hsv_to_readonly_page");
  Scenario sc;
  map_page(sc, 0x1000, perm::kR);
  host_side(sc, Mode::HS, hstatus::kSPVP, [&] {
    sc.as.li(a1, kVa + 0x1004);
    sc.as.hsv_b(a1, a1);
  });
  c.expect_pass(sc.run());
  expect_trap(c, sc,
              {.level = kLevelM, .cause = exc::kStorePageFault, .tval = kVa + 0x1004, .tval2 = 0, .gva = true},
              Provenance::Specification);
  c.expect("mstatus.MPV", 0, (sc.reg(record::kStatus) & status::kMPV) != 0, Provenance::Specification);
  return c;
}

CaseResult hlvx_needs_execute()
{
  CaseResult c("hlvx_needs_execute");
  Scenario sc;
  map_page(sc, 0x2000, perm::kX);
  sc.memory().write(kHost + 0x2000, 8, kPattern);
  host_side(sc, Mode::HS, hstatus::kSPVP, [&] {
    sc.as.li(a1, kVa + 0x2000);
    sc.as.hlvx_wu(a0, a1);
    sc.as.hlv_w(a2, a1);
  });
  c.expect_pass(sc.run());
  c.expect("hlvx.wu", kPattern & 0xFFFF'FFFF, sc.reg(a0), Provenance::Oracle);
  expect_trap(c, sc, {.level = kLevelM, .cause = exc::kLoadPageFault, .tval = kVa + 0x2000, .gva = true},
              Provenance::Specification);
  return c;
}

CaseResult u_with_hu()
{
  CaseResult c("u_with_hu");
  Scenario sc;
  map_page(sc, 0, perm::kRW);
  sc.memory().write(kHost, 8, kPattern);
  host_side(sc, Mode::U, hstatus::kHU | hstatus::kSPVP, [&] {
    sc.as.li(a1, kVa);
    sc.as.hlv_d(a0, a1);
  });
  c.expect_pass(sc.run());
  c.expect("hlv.d", kPattern, sc.reg(a0), Provenance::Oracle);
  c.expect("traps", 0, sc.reg(record::kCount), Provenance::Specification);
  return c;
}

CaseResult u_without_hu()
{
  CaseResult c("u_without_hu");
  Scenario sc;
  map_page(sc, 0, perm::kRW);
  host_side(sc, Mode::U, hstatus::kSPVP, [&] {
    sc.as.li(a1, kVa);
    sc.as.hlv_d(a0, a1);
  });
  c.expect_pass(sc.run());
  expect_trap(c, sc, {.level = kLevelM, .cause = exc::kIllegalInstruction, .tval = enc::hyp(0x36, a0, a1, 0)},
              Provenance::Specification);
  return c;
}

CaseResult spvp_clear_is_user_access()
{
  CaseResult c("spvp_clear_is_user_access");
  Scenario sc;
  map_page(sc, 0, perm::kRW);
  map_page(sc, 0x1000, perm::kRW | perm::kU);
  sc.memory().write(kHost + 0x1000, 8, kPattern);
  host_side(sc, Mode::M, 0, [&] {
    sc.as.li(a1, kVa + 0x1000);
    sc.as.hlv_d(a0, a1);
    sc.as.li(a1, kVa);
    sc.as.hlv_d(a2, a1);
  });
  c.expect_pass(sc.run());
  c.expect("user page", kPattern, sc.reg(a0), Provenance::Oracle);
  expect_trap(c, sc, {.level = kLevelM, .cause = exc::kLoadPageFault, .tval = kVa, .gva = true},
              Provenance::Specification);
  return c;
}

CaseResult hlv_gstage_fault()
{
  CaseResult c("hlv_gstage_fault");
  Scenario sc;
  sc.vs().map(sc.vs_root(), kVa + 0x3000, kGpa + 0x3000, 0, perm::kRW);
  host_side(sc, Mode::HS, hstatus::kSPVP, [&] {
    sc.as.li(a1, kVa + 0x3008);
    sc.as.hlv_w(a0, a1);
  });
  c.expect_pass(sc.run());
  expect_trap(c, sc,
              {.level = kLevelM,
               .cause = exc::kLoadGuestPageFault,
               .tval = kVa + 0x3008,
               .tval2 = (kGpa + 0x3008) >> 2,
               .tinst = enc::hlv_w(a0, 0),
               .gva = true},
              Provenance::Specification);
  return c;
}

}  // namespace

std::vector<CaseResult> hyp_access_cases()
{
  return {hs_hlv_reads_guest(), hs_hsv_writes_guest(), hsv_to_readonly_page(),      hlvx_needs_execute(),
          u_with_hu(),          u_without_hu(),        spvp_clear_is_user_access(), hlv_gstage_fault()};
}

}  // namespace hvsim::harness
