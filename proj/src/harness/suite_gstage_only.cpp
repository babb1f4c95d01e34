#include "suite_util.hpp"

namespace hvsim::harness {

namespace {

constexpr uint64_t kGpa = layout::kGuestData;
constexpr uint64_t kHost = layout::kGuestDataHost;
constexpr uint64_t kGuestFaults =
    bit(exc::kInstrGuestPageFault) | bit(exc::kLoadGuestPageFault) | bit(exc::kStoreGuestPageFault);

/// Runs `body` in VS with vsatp bare and G-stage faults delegated to HS.
template <typename Body>
void guest(Scenario& sc, Body body)
{
  auto start = sc.as.new_label();
  sc.prologue();
  enable_gstage(sc);
  set_csr(sc, csr::kMedeleg, kGuestFaults);
  sc.enter(Mode::VS, start);
  sc.as.bind(start);
  body();
  sc.exit_pass();
  sc.handlers();
}

CaseResult load_through_gstage()
{
  CaseResult c("load_through_gstage");
  Scenario sc;
  sc.g().map(sc.g_root(), kGpa, kHost, 0, perm::kRW | perm::kU);
  sc.memory().write(kHost + 0x100, 8, 0xFEED'FACE'0000'0042);
  guest(sc, [&] {
    sc.as.li(a1, kGpa + 0x100);
    sc.as.ld(a0, a1);
    sc.as.lw(a2, a1);
  });
  c.expect_pass(sc.run());
  const auto pa = sc.g().lookup(kGpa + 0x100);
  c.expect("g.pa", kHost + 0x100, pa.value_or(0), Provenance::Oracle);
  c.expect("a0", sc.memory().read(pa.value_or(0), 8), sc.reg(a0), Provenance::Oracle);
  c.expect("a2", sign_extend(sc.memory().read(pa.value_or(0), 4), 32), sc.reg(a2), Provenance::Oracle);
  c.expect("traps", 0, sc.reg(record::kCount), Provenance::Trivial);
  return c;
}

CaseResult store_to_readonly_gpage()
{
  CaseResult c("store_to_readonly_gpage");
  Scenario sc;
  sc.g().map(sc.g_root(), kGpa + 0x1000, kHost + 0x1000, 0, perm::kR | perm::kU);
  guest(sc, [&] {
    sc.as.li(a1, kGpa + 0x1010);
    sc.as.sd(a1, a1);
  });
  c.expect_pass(sc.run());
  expect_trap(c, sc,
              {.level = kLevelHS,
               .cause = exc::kStoreGuestPageFault,
               .tval = kGpa + 0x1010,
               .tval2 = (kGpa + 0x1010) >> 2,
               .tinst = enc::sd(a1, 0, 0),
               .gva = true},
              Provenance::Specification);
  c.expect("hstatus.SPV", 1, (sc.reg(record::kStatus) & hstatus::kSPV) != 0, Provenance::Specification);
  return c;
}

CaseResult gpage_without_u()
{
  CaseResult c("gpage_without_u");
  Scenario sc;
  sc.g().map(sc.g_root(), kGpa + 0x2000, kHost + 0x2000, 0, perm::kRW);
  guest(sc, [&] {
    sc.as.li(a1, kGpa + 0x2000);
    sc.as.ld(a0, a1);
  });
  c.expect_pass(sc.run());
  expect_trap(c, sc,
              {.level = kLevelHS,
               .cause = exc::kLoadGuestPageFault,
               .tval = kGpa + 0x2000,
               .tval2 = (kGpa + 0x2000) >> 2,
               .gva = true},
              Provenance::Specification);
  return c;
}

CaseResult gpa_beyond_41_bits()
{
  CaseResult c("gpa_beyond_41_bits");
  Scenario sc;
  constexpr uint64_t kWide = uint64_t{1} << 41;
  guest(sc, [&] {
    sc.as.li(a1, kWide);
    sc.as.ld(a0, a1);
  });
  c.expect_pass(sc.run());
  expect_trap(c, sc, {.level = kLevelHS, .cause = exc::kLoadGuestPageFault, .tval = kWide, .tval2 = kWide >> 2},
              Provenance::Specification);
  return c;
}

CaseResult fetch_without_gstage_x()
{
  CaseResult c("fetch_without_gstage_x");
  Scenario sc;
  sc.g().map(sc.g_root(), kGpa + 0x3000, kHost + 0x3000, 0, perm::kRW | perm::kU);
  guest(sc, [&] {
    sc.as.li(a1, kGpa + 0x3000);
    sc.as.jr(a1);
  });
  c.expect_pass(sc.run());
  expect_trap(c, sc,
              {.level = kLevelHS,
               .cause = exc::kInstrGuestPageFault,
               .tval = kGpa + 0x3000,
               .tval2 = (kGpa + 0x3000) >> 2,
               .tinst = 0},
              Provenance::Specification);
  c.expect("epc", kGpa + 0x3000, sc.reg(record::kEpc), Provenance::Specification);
  return c;
}

CaseResult gstage_megapage()
{
  CaseResult c("gstage_megapage");
  Scenario sc;
  constexpr uint64_t kMegaGpa = 0x4040'0000;
  constexpr uint64_t kMegaHost = 0x8060'0000;
  sc.g().map(sc.g_root(), kMegaGpa, kMegaHost, 1, perm::kRW | perm::kU);
  sc.memory().write(kMegaHost + 0x12340, 8, 0x5555'AAAA'5555'AAAA);
  guest(sc, [&] {
    sc.as.li(a1, kMegaGpa + 0x12340);
    sc.as.ld(a0, a1);
    sc.as.li(a2, 0x77);
    sc.as.sd(a2, a1, 8);
  });
  c.expect_pass(sc.run());
  const auto pa = sc.g().lookup(kMegaGpa + 0x12340);
  c.expect("g.pa", kMegaHost + 0x12340, pa.value_or(0), Provenance::Oracle);
  c.expect("a0", 0x5555'AAAA'5555'AAAA, sc.reg(a0), Provenance::Trivial);
  c.expect("stored", 0x77, sc.memory().read(pa.value_or(0) + 8, 8), Provenance::Oracle);
  return c;
}

}  // namespace

std::vector<CaseResult> gstage_only_cases()
{
  return {load_through_gstage(), store_to_readonly_gpage(), gpage_without_u(),
          gpa_beyond_41_bits(),  fetch_without_gstage_x(),  gstage_megapage()};
}

}  // namespace hvsim::harness
