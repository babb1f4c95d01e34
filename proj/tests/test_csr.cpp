#include <random>
#include <set>

#include <gtest/gtest.h>

#include "csr_checks.hpp"
#include "hvsim/csr.hpp"

using namespace hvsim;

namespace {

constexpr PrivilegeLevel kM = PrivilegeLevel::machine();


}  // namespace

TEST(CsrFile, ResetValues)
{
  CsrFile f;
  const uint64_t misa = f.peek(csr::kMisa);
  EXPECT_EQ(misa >> 62, 2u);
  for (char ext : {'A', 'H', 'I', 'M', 'S', 'U'})
    EXPECT_TRUE(misa & bit(ext - 'A')) << ext;
  EXPECT_FALSE(misa & bit('F' - 'A'));
  EXPECT_EQ(get_bits(f.peek(csr::kMstatus), 32, 2), 2u);
  EXPECT_EQ(get_bits(f.peek(csr::kMstatus), 34, 2), 2u);
  EXPECT_EQ(get_bits(f.peek(csr::kHstatus), 32, 2), 2u);
  EXPECT_EQ(f.peek(csr::kMideleg), irq_bit::kMidelegForced);
}

TEST(CsrFile, TableIsWellFormed)
{
  std::set<uint16_t> seen;
  for (const CsrSpec& s : csr_specs()) {
    EXPECT_TRUE(seen.insert(s.address).second) << s.name;
    EXPECT_EQ(find_csr(s.address), &s);
    EXPECT_EQ(s.write_mask & ~s.read_mask, 0u) << s.name << " writes unreadable bits";
    if (s.read_only()) {
      EXPECT_EQ(s.write_mask, 0u) << s.name;
    }
    if (s.redirect_in_vs) {
      EXPECT_NE(find_csr(*s.redirect_in_vs), nullptr) << s.name;
    }
  }
  EXPECT_EQ(find_csr(0x7C0), nullptr);
}

TEST(CsrFile, AliasWriteThroughBothDirections)
{
  EXPECT_GE(hvsim::testing::csr_aliases().size(), 30u);
  for (const std::string& v : hvsim::testing::alias_violations())
    ADD_FAILURE() << v;
}

TEST(CsrFile, DelegationGatesSupervisorViews)
{
  CsrFile f;
  f.poke(csr::kMideleg, 0);
  f.poke(csr::kMie, irq_bit::kAll);
  f.poke(csr::kMip, irq_bit::kSSI);
  EXPECT_EQ(f.peek(csr::kSie), 0u);
  EXPECT_EQ(f.peek(csr::kSip), 0u);
  f.poke(csr::kSie, 0);
  EXPECT_EQ(f.peek(csr::kMie), irq_bit::kAll) << "undelegated bits must not be writable through sie";

  f.poke(csr::kHideleg, 0);
  f.poke(csr::kHvip, irq_bit::kVsMask);
  EXPECT_EQ(f.peek(csr::kVsip), 0u);
  EXPECT_EQ(f.peek(csr::kVsie), 0u);
  f.poke(csr::kHideleg, irq_bit::kVSTI);
  EXPECT_EQ(f.peek(csr::kVsip), irq_bit::kSTI);
}

TEST(CsrFile, MidelegReadOnlyOnes)
{
  CsrFile f;
  for (uint64_t v : {uint64_t{0}, ~uint64_t{0}, uint64_t{0x222}, uint64_t{0x1444}}) {
    ASSERT_EQ(f.write(csr::kMideleg, kM, v), CsrStatus::Ok);
    EXPECT_EQ(f.peek(csr::kMideleg) & 0x1444, 0x1444u) << std::hex << v;
    EXPECT_EQ(f.peek(csr::kMideleg) & ~uint64_t{0x1666}, 0u) << std::hex << v;
  }
  f.poke(csr::kHideleg, ~uint64_t{0});
  EXPECT_EQ(f.peek(csr::kHideleg), irq_bit::kVsMask);
}

TEST(CsrFile, DelegationRegisterMasks)
{
  CsrFile f;
  f.poke(csr::kMedeleg, ~uint64_t{0});
  f.poke(csr::kHedeleg, ~uint64_t{0});
  const uint64_t medeleg = f.peek(csr::kMedeleg);
  const uint64_t hedeleg = f.peek(csr::kHedeleg);
  EXPECT_FALSE(medeleg & bit(11)) << "ecall from M is never delegated";
  for (unsigned code : {0u, 2u, 8u, 9u, 10u, 12u, 13u, 15u, 20u, 21u, 22u, 23u})
    EXPECT_TRUE(medeleg & bit(code)) << code;
  for (unsigned code : {9u, 10u, 11u, 20u, 21u, 22u, 23u})
    EXPECT_FALSE(hedeleg & bit(code)) << code;
  for (unsigned code : {0u, 2u, 3u, 8u, 12u, 13u, 15u})
    EXPECT_TRUE(hedeleg & bit(code)) << code;
}

TEST(CsrFile, WriteReadIdempotence)
{
  std::mt19937_64 rng(7);
  for (const CsrSpec& s : csr_specs()) {
    for (int i = 0; i < 64; ++i) {
      CsrFile f = hvsim::testing::open_csr_file();
      const uint64_t v = rng();
      f.poke(s.address, v);
      const uint64_t once = f.peek(s.address);
      f.poke(s.address, once);
      EXPECT_EQ(f.peek(s.address), once) << s.name;
    }
  }
}

TEST(CsrFile, FuzzNeverTouchesBitsOutsideWriteMask)
{
  const auto violations = hvsim::testing::write_fuzz_violations(2024, 10'000);
  EXPECT_TRUE(violations.empty()) << violations.size() << " violations, first: " << violations.front();
}

TEST(CsrFile, WarlFields)
{
  CsrFile f;
  f.poke(csr::kMstatus, uint64_t{2} << status::kMppShift);
  EXPECT_NE(get_bits(f.peek(csr::kMstatus), status::kMppShift, 2), 2u);
  f.poke(csr::kSatp, (uint64_t{9} << 60) | 0x1234);
  EXPECT_EQ(f.peek(csr::kSatp), 0x1234u) << "Sv48 is not supported: mode keeps its old value";
  f.poke(csr::kSatp, (uint64_t{8} << 60) | 0x1234);
  EXPECT_EQ(f.peek(csr::kSatp), (uint64_t{8} << 60) | 0x1234);
  f.poke(csr::kSatp, (uint64_t{10} << 60) | 0x5678);
  EXPECT_EQ(f.peek(csr::kSatp), (uint64_t{8} << 60) | 0x5678);
  f.poke(csr::kHgatp, (uint64_t{8} << 60) | 0x1237);
  EXPECT_EQ(atp::ppn(f.peek(csr::kHgatp)), 0x1234u) << "root must be 16 KiB aligned";
}

namespace {

/// Independent statement of the CSR access rule for the default
/// configuration (no TVM/VTVM traps, counters enabled everywhere).
CsrStatus expected_access(uint16_t addr, Mode mode, bool write)
{
  if (!find_csr(addr))
    return CsrStatus::IllegalInstruction;
  if (write && (addr >> 10) == 3)
    return CsrStatus::IllegalInstruction;
  const unsigned rank = (addr >> 8) & 3;
  switch (mode) {
    case Mode::M: return CsrStatus::Ok;
    case Mode::HS: return rank <= 2 ? CsrStatus::Ok : CsrStatus::IllegalInstruction;
    case Mode::U: return rank == 0 ? CsrStatus::Ok : CsrStatus::IllegalInstruction;
    case Mode::VS:
      if (rank == 3)
        return CsrStatus::IllegalInstruction;
      return rank <= 1 ? CsrStatus::Ok : CsrStatus::VirtualInstruction;
    case Mode::VU:
      if (rank == 3)
        return CsrStatus::IllegalInstruction;
      return rank == 0 ? CsrStatus::Ok : CsrStatus::VirtualInstruction;
  }
  return CsrStatus::IllegalInstruction;
}

}  // namespace

TEST(CsrFile, AccessDecisionMatchesRuleForEveryAddress)
{
  CsrFile f;
  for (uint16_t c : {csr::kMcounteren, csr::kScounteren, csr::kHcounteren})
    f.poke(c, 0x5);
  for (unsigned addr = 0; addr < 0x1000; ++addr) {
    for (Mode mode : {Mode::M, Mode::HS, Mode::VS, Mode::U, Mode::VU}) {
      for (bool write : {false, true}) {
        const auto r = f.resolve(static_cast<uint16_t>(addr), level_of(mode), write);
        ASSERT_EQ(r.status, expected_access(static_cast<uint16_t>(addr), mode, write))
            << std::hex << addr << " mode=" << to_string(mode) << " write=" << write;
      }
    }
  }
}

TEST(CsrFile, VsRedirectionIsTotal)
{
  CsrFile f;
  for (const CsrSpec& s : csr_specs()) {
    if (s.min_rank() != 1)
      continue;
    const auto r = f.resolve(s.address, PrivilegeLevel::vs(), false);
    ASSERT_TRUE(r.ok()) << s.name;
    if (s.redirect_in_vs) {
      EXPECT_EQ(r.spec->address, *s.redirect_in_vs) << s.name;
      EXPECT_EQ(r.spec->min_rank(), 2u) << s.name;
    } else {
      EXPECT_EQ(r.spec, &s) << s.name << " (no VS counterpart: accesses the HS register)";
    }
    const auto hs = f.resolve(s.address, PrivilegeLevel::hs(), false);
    EXPECT_EQ(hs.spec, &s) << s.name;
  }
}

TEST(CsrFile, VsWritesLandInVsRegisters)
{
  CsrFile f;
  ASSERT_EQ(f.write(csr::kSscratch, PrivilegeLevel::vs(), 0xABC), CsrStatus::Ok);
  EXPECT_EQ(f.peek(csr::kVsscratch), 0xABCu);
  EXPECT_EQ(f.peek(csr::kSscratch), 0u);
  ASSERT_EQ(f.write(csr::kSstatus, PrivilegeLevel::vs(), status::kSIE), CsrStatus::Ok);
  EXPECT_TRUE(f.peek(csr::kVsstatus) & status::kSIE);
  EXPECT_FALSE(f.peek(csr::kMstatus) & status::kSIE);
}

TEST(CsrFile, TrapVirtualMemoryGating)
{
  CsrFile f;
  f.poke(csr::kMstatus, status::kTVM);
  EXPECT_EQ(f.resolve(csr::kSatp, PrivilegeLevel::hs(), false).status, CsrStatus::IllegalInstruction);
  EXPECT_EQ(f.resolve(csr::kHgatp, PrivilegeLevel::hs(), true).status, CsrStatus::IllegalInstruction);
  EXPECT_EQ(f.resolve(csr::kSatp, kM, false).status, CsrStatus::Ok);
  f.poke(csr::kMstatus, 0);
  f.poke(csr::kHstatus, hstatus::kVTVM);
  EXPECT_EQ(f.resolve(csr::kSatp, PrivilegeLevel::vs(), false).status, CsrStatus::VirtualInstruction);
  EXPECT_EQ(f.resolve(csr::kSatp, PrivilegeLevel::hs(), false).status, CsrStatus::Ok);
}

TEST(CsrFile, CounterGatingMatrix)
{
  struct Row {
    uint64_t m, h, s;
    Mode mode;
    CsrStatus expected;
  };
  const CsrStatus ok = CsrStatus::Ok, ill = CsrStatus::IllegalInstruction, vi = CsrStatus::VirtualInstruction;
  const Row rows[] = {
      {0, 1, 1, Mode::HS, ill}, {1, 0, 0, Mode::HS, ok},  {1, 1, 0, Mode::U, ill},  {1, 0, 1, Mode::U, ok},
      {0, 1, 1, Mode::VS, ill}, {1, 0, 1, Mode::VS, vi},  {1, 1, 0, Mode::VS, ok},  {0, 1, 1, Mode::VU, ill},
      {1, 0, 1, Mode::VU, vi},  {1, 1, 0, Mode::VU, vi},  {1, 1, 1, Mode::VU, ok},  {0, 0, 0, Mode::M, ok},
  };
  for (const Row& r : rows) {
    CsrFile f;
    f.poke(csr::kMcounteren, r.m);
    f.poke(csr::kHcounteren, r.h);
    f.poke(csr::kScounteren, r.s);
    EXPECT_EQ(f.resolve(csr::kCycle, level_of(r.mode), false).status, r.expected)
        << "m=" << r.m << " h=" << r.h << " s=" << r.s << " mode=" << to_string(r.mode);
  }
}
