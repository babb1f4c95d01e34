#include <gtest/gtest.h>

#include "delegation_oracle.hpp"
#include "hvsim/trap.hpp"

using namespace hvsim;
using hvsim::testing::expected_target;

namespace {

constexpr Mode kModes[] = {Mode::M, Mode::HS, Mode::VS, Mode::U, Mode::VU};
constexpr uint64_t kExceptionCodes[] = {0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 15, 20, 21, 22, 23};
constexpr uint64_t kInterruptCodes[] = {1, 2, 3, 5, 6, 7, 9, 10, 11, 12};

Hart hart_in(Mode mode, uint64_t pc = 0x8000'0100)
{
  Hart h;
  h.reset(pc);
  h.priv = level_of(mode);
  return h;
}

}  // namespace

TEST(Delegation, ExhaustiveTruthTable)
{
  int cases = 0;
  for (bool interrupt : {false, true}) {
    const auto codes = interrupt ? std::span<const uint64_t>(kInterruptCodes) : std::span<const uint64_t>(kExceptionCodes);
    for (uint64_t code : codes) {
      for (bool m_bit : {false, true}) {
        for (bool h_bit : {false, true}) {
          for (Mode mode : kModes) {
            Hart h = hart_in(mode);
            h.csrs.poke(interrupt ? csr::kMideleg : csr::kMedeleg, m_bit ? bit(code) : 0);
            h.csrs.poke(interrupt ? csr::kHideleg : csr::kHedeleg, h_bit ? bit(code) : 0);
            const TrapCause cause{interrupt, code};
            const TrapTarget want = expected_target(interrupt, code, m_bit, h_bit, mode);
            ASSERT_EQ(resolve_target(cause, h), want)
                << "int=" << interrupt << " code=" << code << " m=" << m_bit << " h=" << h_bit
                << " mode=" << to_string(mode);
            const TrapRecord rec = take_trap(h, Trap{cause});
            ASSERT_EQ(rec.target, want);
            ++cases;
          }
        }
      }
    }
  }
  EXPECT_EQ(cases, 2 * 2 * 5 * (19 + 10));
}

TEST(TrapEntry, ExceptionFromVuToVs)
{
  Hart h = hart_in(Mode::VU, 0x1000);
  h.csrs.poke(csr::kMedeleg, bit(exc::kLoadPageFault));
  h.csrs.poke(csr::kHedeleg, bit(exc::kLoadPageFault));
  h.csrs.poke(csr::kVstvec, 0x9000);
  h.csrs.poke(csr::kVsstatus, h.csrs.peek(csr::kVsstatus) | status::kSIE);
  h.reservation = 0x40;
  const TrapRecord rec = take_trap(h, Trap::exception(exc::kLoadPageFault, 0xDEAD));
  EXPECT_EQ(rec.target, TrapTarget::VS);
  EXPECT_EQ(h.mode(), Mode::VS);
  EXPECT_EQ(h.pc, 0x9000u);
  EXPECT_EQ(h.csrs.peek(csr::kVscause), exc::kLoadPageFault);
  EXPECT_EQ(h.csrs.peek(csr::kVsepc), 0x1000u);
  EXPECT_EQ(h.csrs.peek(csr::kVstval), 0xDEADu);
  const uint64_t vs = h.csrs.peek(csr::kVsstatus);
  EXPECT_FALSE(vs & status::kSPP);
  EXPECT_TRUE(vs & status::kSPIE);
  EXPECT_FALSE(vs & status::kSIE);
  EXPECT_EQ(h.csrs.peek(csr::kScause), 0u) << "HS registers untouched";
  EXPECT_FALSE(h.reservation.has_value());
}

TEST(TrapEntry, GuestFaultFromVsToHs)
{
  Hart h = hart_in(Mode::VS, 0x2000);
  h.csrs.poke(csr::kMedeleg, bit(exc::kStoreGuestPageFault));
  h.csrs.poke(csr::kStvec, 0x7000);
  Trap t = Trap::exception(exc::kStoreGuestPageFault, 0x1234'5678);
  t.tval2 = 0x4000'0000 >> 2;
  t.tinst = 0x3000;
  t.gva = true;
  take_trap(h, t);
  EXPECT_EQ(h.mode(), Mode::HS);
  EXPECT_EQ(h.csrs.peek(csr::kScause), exc::kStoreGuestPageFault);
  EXPECT_EQ(h.csrs.peek(csr::kStval), 0x1234'5678u);
  EXPECT_EQ(h.csrs.peek(csr::kHtval), 0x1000'0000u);
  EXPECT_EQ(h.csrs.peek(csr::kHtinst), 0x3000u);
  const uint64_t hs = h.csrs.peek(csr::kHstatus);
  EXPECT_TRUE(hs & hstatus::kSPV);
  EXPECT_TRUE(hs & hstatus::kSPVP);
  EXPECT_TRUE(hs & hstatus::kGVA);
  EXPECT_TRUE(h.csrs.peek(csr::kSstatus) & status::kSPP);
}

TEST(TrapEntry, ToMachineRecordsVirtualization)
{
  Hart h = hart_in(Mode::VU, 0x3000);
  h.csrs.poke(csr::kMtvec, 0x100);
  Trap t = Trap::exception(exc::kLoadGuestPageFault, 0x55);
  t.tval2 = 0x77;
  t.gva = true;
  take_trap(h, t);
  EXPECT_EQ(h.mode(), Mode::M);
  const uint64_t ms = h.csrs.peek(csr::kMstatus);
  EXPECT_TRUE(ms & status::kMPV);
  EXPECT_TRUE(ms & status::kGVA);
  EXPECT_EQ(get_bits(ms, status::kMppShift, 2), 0u);
  EXPECT_EQ(h.csrs.peek(csr::kMtval2), 0x77u);
  EXPECT_EQ(h.csrs.peek(csr::kMepc), 0x3000u);
}

TEST(TrapEntry, VsInterruptPresentedShiftedAndVectored)
{
  Hart h = hart_in(Mode::VS);
  h.csrs.poke(csr::kHideleg, irq_bit::kVSTI);
  h.csrs.poke(csr::kVstvec, 0x8000 | 1);
  const TrapRecord rec = take_trap(h, Trap::interrupt(irq::kVSTI));
  EXPECT_EQ(rec.target, TrapTarget::VS);
  EXPECT_EQ(rec.presented_code, irq::kSTI);
  EXPECT_EQ(h.csrs.peek(csr::kVscause), kInterruptFlag | irq::kSTI);
  EXPECT_EQ(h.pc, 0x8000u + 4 * irq::kSTI);
}

TEST(TrapEntry, VectoredModeOnlyOffsetsInterrupts)
{
  Hart h = hart_in(Mode::U);
  h.csrs.poke(csr::kMtvec, 0x4000 | 1);
  take_trap(h, Trap::interrupt(irq::kMTI));
  EXPECT_EQ(h.pc, 0x4000u + 4 * irq::kMTI);
  Hart e = hart_in(Mode::U);
  e.csrs.poke(csr::kMtvec, 0x4000 | 1);
  take_trap(e, Trap::exception(exc::kEcallU));
  EXPECT_EQ(e.pc, 0x4000u);
}

TEST(TrapEntry, WakesHaltedHart)
{
  Hart h = hart_in(Mode::HS);
  h.halted = true;
  take_trap(h, Trap::interrupt(irq::kMSI));
  EXPECT_FALSE(h.halted);
}

TEST(TrapReturn, RoundTripRestoresModeAndPc)
{
  for (Mode mode : kModes) {
    for (TrapTarget target : {TrapTarget::M, TrapTarget::HS, TrapTarget::VS}) {
      const bool virt = mode == Mode::VS || mode == Mode::VU;
      if (target == TrapTarget::VS && !virt)
        continue;
      if (target == TrapTarget::HS && mode == Mode::M)
        continue;
      Hart h = hart_in(mode, 0x8000'4000);
      const uint64_t code = exc::kBreakpoint;
      if (target != TrapTarget::M)
        h.csrs.poke(csr::kMedeleg, bit(code));
      if (target == TrapTarget::VS)
        h.csrs.poke(csr::kHedeleg, bit(code));
      const TrapRecord rec = take_trap(h, Trap::exception(code));
      ASSERT_EQ(rec.target, target) << to_string(mode);
      const auto fault = trap_return(h, target == TrapTarget::M ? ReturnKind::Mret : ReturnKind::Sret);
      ASSERT_FALSE(fault.has_value()) << to_string(mode) << "->" << to_string(target);
      EXPECT_EQ(h.mode(), mode) << to_string(mode) << "->" << to_string(target);
      EXPECT_EQ(h.pc, 0x8000'4000u);
    }
  }
}

TEST(TrapReturn, InterruptEnableRestored)
{
  Hart h = hart_in(Mode::M);
  h.csrs.poke(csr::kMstatus, h.csrs.peek(csr::kMstatus) | status::kMIE);
  take_trap(h, Trap::exception(exc::kBreakpoint));
  EXPECT_FALSE(h.csrs.peek(csr::kMstatus) & status::kMIE);
  trap_return(h, ReturnKind::Mret);
  EXPECT_TRUE(h.csrs.peek(csr::kMstatus) & status::kMIE);
  EXPECT_TRUE(h.csrs.peek(csr::kMstatus) & status::kMPIE);
}

TEST(TrapReturn, Gating)
{
  struct Row {
    Mode mode;
    ReturnKind kind;
    uint64_t mstatus;
    uint64_t hstatus;
    std::optional<uint64_t> fault;
  };
  const Row rows[] = {
      {Mode::HS, ReturnKind::Mret, 0, 0, exc::kIllegalInstruction},
      {Mode::VS, ReturnKind::Mret, 0, 0, exc::kIllegalInstruction},
      {Mode::U, ReturnKind::Sret, 0, 0, exc::kIllegalInstruction},
      {Mode::VU, ReturnKind::Sret, 0, 0, exc::kVirtualInstruction},
      {Mode::HS, ReturnKind::Sret, status::kTSR, 0, exc::kIllegalInstruction},
      {Mode::VS, ReturnKind::Sret, 0, hstatus::kVTSR, exc::kVirtualInstruction},
      {Mode::VS, ReturnKind::Sret, status::kTSR, 0, std::nullopt},
      {Mode::HS, ReturnKind::Sret, 0, hstatus::kVTSR, std::nullopt},
      {Mode::M, ReturnKind::Sret, status::kTSR, 0, std::nullopt},
  };
  for (const Row& r : rows) {
    Hart h = hart_in(r.mode);
    h.csrs.poke(csr::kMstatus, h.csrs.peek(csr::kMstatus) | r.mstatus);
    h.csrs.poke(csr::kHstatus, h.csrs.peek(csr::kHstatus) | r.hstatus);
    EXPECT_EQ(trap_return(h, r.kind), r.fault) << to_string(r.mode);
  }
}

TEST(TrapReturn, SretFromHsEntersGuestWhenSpvSet)
{
  Hart h = hart_in(Mode::HS);
  h.csrs.poke(csr::kHstatus, h.csrs.peek(csr::kHstatus) | hstatus::kSPV);
  h.csrs.poke(csr::kSstatus, status::kSPP);
  h.csrs.poke(csr::kSepc, 0x5000);
  ASSERT_FALSE(trap_return(h, ReturnKind::Sret));
  EXPECT_EQ(h.mode(), Mode::VS);
  EXPECT_EQ(h.pc, 0x5000u);
  EXPECT_FALSE(h.csrs.peek(csr::kHstatus) & hstatus::kSPV);
}

TEST(Interrupts, PriorityOrder)
{
  const uint64_t order[] = {11, 3, 7, 9, 1, 5, 12, 10, 2, 6};
  uint64_t pending = 0;
  for (uint64_t c : order)
    pending |= bit(c);
  for (uint64_t expected : order) {
    Hart h = hart_in(Mode::U);
    h.csrs.set_cell(Cell::Mip, pending);
    h.csrs.set_cell(Cell::Mie, pending);
    const auto t = check_interrupts(h);
    ASSERT_TRUE(t.has_value());
    EXPECT_EQ(t->cause.code, expected);
    pending &= ~bit(expected);
  }
}

TEST(Interrupts, EnableMatrix)
{
  struct Row {
    Mode mode;
    uint64_t irq_bit_mask;
    uint64_t mideleg;
    uint64_t hideleg;
    uint64_t mstatus;
    uint64_t vsstatus;
    bool taken;
  };
  const Row rows[] = {
      {Mode::M, irq_bit::kMTI, 0, 0, 0, 0, false},
      {Mode::M, irq_bit::kMTI, 0, 0, status::kMIE, 0, true},
      {Mode::HS, irq_bit::kMTI, 0, 0, 0, 0, true},
      {Mode::M, irq_bit::kSTI, irq_bit::kSTI, 0, status::kMIE | status::kSIE, 0, false},
      {Mode::HS, irq_bit::kSTI, irq_bit::kSTI, 0, 0, 0, false},
      {Mode::HS, irq_bit::kSTI, irq_bit::kSTI, 0, status::kSIE, 0, true},
      {Mode::U, irq_bit::kSTI, irq_bit::kSTI, 0, 0, 0, true},
      {Mode::VS, irq_bit::kSTI, irq_bit::kSTI, 0, 0, 0, true},
      {Mode::HS, irq_bit::kVSTI, 0, irq_bit::kVSTI, status::kSIE, 0, false},
      {Mode::VS, irq_bit::kVSTI, 0, irq_bit::kVSTI, 0, 0, false},
      {Mode::VS, irq_bit::kVSTI, 0, irq_bit::kVSTI, 0, status::kSIE, true},
      {Mode::VU, irq_bit::kVSTI, 0, irq_bit::kVSTI, 0, 0, true},
      {Mode::VS, irq_bit::kVSTI, 0, 0, 0, 0, true},
  };
  for (const Row& r : rows) {
    Hart h = hart_in(r.mode);
    h.csrs.poke(csr::kMideleg, r.mideleg);
    h.csrs.poke(csr::kHideleg, r.hideleg);
    h.csrs.poke(csr::kMstatus, h.csrs.peek(csr::kMstatus) | r.mstatus);
    h.csrs.poke(csr::kVsstatus, h.csrs.peek(csr::kVsstatus) | r.vsstatus);
    h.csrs.set_cell(Cell::Mip, r.irq_bit_mask);
    h.csrs.set_cell(Cell::Mie, r.irq_bit_mask);
    EXPECT_EQ(check_interrupts(h).has_value(), r.taken)
        << to_string(r.mode) << " irq=" << std::hex << r.irq_bit_mask;
  }
}
