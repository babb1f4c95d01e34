#include "hvsim/trap.hpp"

namespace hvsim {

namespace {

bool bit_set(uint64_t mask, uint64_t code) { return code < 64 && ((mask >> code) & 1); }

uint64_t vector_offset(uint64_t tvec, const TrapCause& cause, uint64_t code)
{
  return ((tvec & 1) && cause.interrupt) ? 4 * code : 0;
}

uint64_t push_supervisor_status(uint64_t s, BasePriv from)
{
  s = set_bits(s, 5, 1, get_bits(s, 1, 1));  // SPIE <- SIE
  s = set_bits(s, 8, 1, static_cast<uint64_t>(from) & 1);
  return s & ~status::kSIE;
}

}  // namespace

std::optional<Trap> check_interrupts(const Hart& hart)
{
  const CsrFile& c = hart.csrs;
  const uint64_t pending = c.mip() & c.mie();
  if (pending == 0)
    return std::nullopt;

  const BasePriv base = hart.priv.base();
  const bool virt = hart.priv.virt();
  const uint64_t mideleg = c.mideleg();
  const uint64_t hideleg = c.hideleg();

  const bool m_enabled = base != BasePriv::M || (c.mstatus() & status::kMIE);
  uint64_t enabled = m_enabled ? pending & ~mideleg : 0;
  if (enabled == 0) {
    const bool sie = virt ? (c.vsstatus() & status::kSIE) : (c.mstatus() & status::kSIE);
    const bool hs_enabled = virt || base == BasePriv::U || (base == BasePriv::S && sie);
    enabled = hs_enabled ? pending & mideleg & ~hideleg : 0;
    if (virt && enabled == 0) {
      const bool vs_enabled = base == BasePriv::U || (base == BasePriv::S && sie);
      enabled = vs_enabled ? pending & hideleg : 0;
    }
  }
  if (enabled == 0)
    return std::nullopt;
  for (uint64_t code : irq::kPriority) {
    if (bit_set(enabled, code))
      return Trap::interrupt(code);
  }
  return std::nullopt;
}

TrapTarget resolve_target(const TrapCause& cause, const Hart& hart)
{
  const CsrFile& c = hart.csrs;
  const bool below_m = hart.priv.base() != BasePriv::M;
  const bool virt = hart.priv.virt();
  uint64_t vsdeleg = 0;
  uint64_t hsdeleg = 0;
  if (cause.interrupt) {
    vsdeleg = (virt && below_m) ? c.hideleg() : 0;
    hsdeleg = below_m ? c.mideleg() : 0;
  } else {
    vsdeleg = (virt && below_m) ? (c.medeleg() & c.hedeleg()) : 0;
    hsdeleg = below_m ? c.medeleg() : 0;
  }
  if (bit_set(vsdeleg, cause.code))
    return TrapTarget::VS;
  if (bit_set(hsdeleg, cause.code))
    return TrapTarget::HS;
  return TrapTarget::M;
}

TrapRecord take_trap(Hart& hart, const Trap& trap)
{
  CsrFile& c = hart.csrs;
  TrapRecord rec;
  rec.target = resolve_target(trap.cause, hart);
  rec.trap = trap;
  rec.epc = hart.pc;
  rec.from = hart.mode();
  rec.presented_code = trap.cause.code;

  const BasePriv from = hart.priv.base();
  const bool virt = hart.priv.virt();
  const uint64_t flag = trap.cause.interrupt ? kInterruptFlag : 0;

  switch (rec.target) {
    case TrapTarget::VS: {
      if (trap.cause.interrupt)
        rec.presented_code = trap.cause.code - 1;
      const uint64_t tvec = c.cell(Cell::Vstvec);
      hart.pc = (tvec & ~uint64_t{1}) + vector_offset(tvec, trap.cause, rec.presented_code);
      c.set_cell(Cell::Vscause, flag | rec.presented_code);
      c.set_cell(Cell::Vsepc, rec.epc);
      c.set_cell(Cell::Vstval, trap.tval);
      c.set_cell(Cell::Vsstatus, push_supervisor_status(c.vsstatus(), from));
      hart.priv = PrivilegeLevel::vs();
      break;
    }
    case TrapTarget::HS: {
      const uint64_t tvec = c.cell(Cell::Stvec);
      hart.pc = (tvec & ~uint64_t{1}) + vector_offset(tvec, trap.cause, trap.cause.code);
      c.set_cell(Cell::Scause, flag | trap.cause.code);
      c.set_cell(Cell::Sepc, rec.epc);
      c.set_cell(Cell::Stval, trap.tval);
      c.set_cell(Cell::Htval, trap.tval2);
      c.set_cell(Cell::Htinst, trap.tinst);
      c.set_cell(Cell::Mstatus, push_supervisor_status(c.mstatus(), from));
      uint64_t h = c.hstatus();
      if (virt)
        h = set_bits(h, 8, 1, static_cast<uint64_t>(from) & 1);
      h = set_bits(h, 7, 1, virt);
      h = set_bits(h, 6, 1, trap.gva);
      c.set_cell(Cell::Hstatus, h);
      hart.priv = PrivilegeLevel::hs();
      break;
    }
    case TrapTarget::M: {
      const uint64_t tvec = c.cell(Cell::Mtvec);
      hart.pc = (tvec & ~uint64_t{1}) + vector_offset(tvec, trap.cause, trap.cause.code);
      c.set_cell(Cell::Mepc, rec.epc);
      c.set_cell(Cell::Mcause, flag | trap.cause.code);
      c.set_cell(Cell::Mtval, trap.tval);
      c.set_cell(Cell::Mtval2, trap.tval2);
      c.set_cell(Cell::Mtinst, trap.tinst);
      uint64_t s = c.mstatus();
      s = set_bits(s, 7, 1, get_bits(s, 3, 1));  // MPIE <- MIE
      s = set_bits(s, status::kMppShift, 2, static_cast<uint64_t>(from));
      s &= ~status::kMIE;
      s = set_bits(s, 39, 1, virt);
      s = set_bits(s, 38, 1, trap.gva);
      c.set_cell(Cell::Mstatus, s);
      hart.priv = PrivilegeLevel::machine();
      break;
    }
  }
  hart.reservation.reset();
  hart.halted = false;
  return rec;
}

std::optional<uint64_t> trap_return(Hart& hart, ReturnKind kind)
{
  CsrFile& c = hart.csrs;
  const BasePriv base = hart.priv.base();
  const bool virt = hart.priv.virt();

  if (kind == ReturnKind::Mret) {
    if (base != BasePriv::M)
      return exc::kIllegalInstruction;
    uint64_t s = c.mstatus();
    const BasePriv prev = legalize_priv(get_bits(s, status::kMppShift, 2));
    const bool prev_virt = s & status::kMPV;
    if (prev != BasePriv::M)
      s &= ~status::kMPRV;
    s = set_bits(s, 3, 1, get_bits(s, 7, 1));  // MIE <- MPIE
    s |= status::kMPIE;
    s = set_bits(s, status::kMppShift, 2, static_cast<uint64_t>(BasePriv::U));
    s &= ~status::kMPV;
    c.set_cell(Cell::Mstatus, s);
    hart.pc = c.cell(Cell::Mepc);
    hart.priv = PrivilegeLevel(prev, prev_virt);
    return std::nullopt;
  }

  if (virt) {
    if (base == BasePriv::U || (c.hstatus() & hstatus::kVTSR))
      return exc::kVirtualInstruction;
  } else if (base == BasePriv::U || (base == BasePriv::S && (c.mstatus() & status::kTSR))) {
    return exc::kIllegalInstruction;
  }

  const Cell status_cell = virt ? Cell::Vsstatus : Cell::Mstatus;
  uint64_t s = c.cell(status_cell);
  const BasePriv prev = get_bits(s, 8, 1) ? BasePriv::S : BasePriv::U;
  s = set_bits(s, 1, 1, get_bits(s, 5, 1));  // SIE <- SPIE
  s |= status::kSPIE;
  s &= ~status::kSPP;
  c.set_cell(status_cell, s);
  hart.pc = c.cell(virt ? Cell::Vsepc : Cell::Sepc);

  bool prev_virt = virt;
  if (!virt) {
    prev_virt = c.hstatus() & hstatus::kSPV;
    c.set_cell(Cell::Hstatus, c.hstatus() & ~hstatus::kSPV);
    c.set_cell(Cell::Mstatus, c.mstatus() & ~status::kMPRV);
  }
  hart.priv = PrivilegeLevel(prev, prev_virt);
  return std::nullopt;
}

}  // namespace hvsim
