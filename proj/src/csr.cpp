#include "hvsim/csr.hpp"

#include <algorithm>
#include <cassert>

namespace hvsim {

namespace {

using namespace status;

constexpr uint64_t kMstatusWrite = kSIE | kMIE | kSPIE | kMPIE | kSPP | kMPP | kFS | kMPRV
                                   | kSUM | kMXR | kTVM | kTW | kTSR | kGVA | kMPV;
constexpr uint64_t kMstatusRead = kMstatusWrite | kUXL | kSXL | kSD;
constexpr uint64_t kSstatusWrite = kSIE | kSPIE | kSPP | kFS | kSUM | kMXR;
constexpr uint64_t kSstatusRead = kSstatusWrite | kUXL | kSD;

constexpr uint64_t kHstatusWrite = hstatus::kGVA | hstatus::kSPV | hstatus::kSPVP | hstatus::kHU
                                   | hstatus::kVTVM | hstatus::kVTW | hstatus::kVTSR;
constexpr uint64_t kHstatusRead = kHstatusWrite | hstatus::kVSXL;

// Exception codes that may be delegated out of M mode.
constexpr uint64_t kMedelegMask = field_mask(0, 11) | bit(12) | bit(13) | bit(15) | field_mask(20, 4);
// hedeleg: ecalls from HS/VS and all guest-page / virtual-instruction faults stay out of VS.
constexpr uint64_t kHedelegMask = field_mask(0, 9) | bit(12) | bit(13) | bit(15);

// M-level pending bits are writable here because no interrupt controller
// model exists; tests inject interrupts through mip.
constexpr uint64_t kMipWrite = irq_bit::kSupervisorMask | irq_bit::kVSSI | irq_bit::kMSI
                               | irq_bit::kMTI | irq_bit::kMEI;

constexpr uint64_t kCounterenMask = bit(0) | bit(2);  // CY, IR

constexpr uint64_t kAtpWrite = atp::kMode | atp::kAsid | atp::kPpn;
constexpr uint64_t kHgatpWrite = atp::kMode | atp::kVmid | (atp::kPpn & ~uint64_t{3});

constexpr uint64_t kAll = ~uint64_t{0};
constexpr uint64_t kTvecWrite = ~uint64_t{2};
constexpr uint64_t kEpcWrite = ~uint64_t{3};

constexpr uint64_t kMisaValue = (uint64_t{2} << 62) | bit('A' - 'A') | bit('H' - 'A') | bit('I' - 'A')
                                | bit('M' - 'A') | bit('S' - 'A') | bit('U' - 'A');

// clang-format off
constexpr CsrSpec kSpecs[] = {
  {csr::kMstatus,    "mstatus",    Cell::Mstatus,    kMstatusRead, kMstatusWrite, 0, DelegView::None, {}, 0, Warl::Mpp},
  {csr::kMisa,       "misa",       Cell::Misa,       kAll, 0},
  {csr::kMedeleg,    "medeleg",    Cell::Medeleg,    kMedelegMask, kMedelegMask},
  {csr::kMideleg,    "mideleg",    Cell::Mideleg,    irq_bit::kSupervisorMask, irq_bit::kSupervisorMask, 0, DelegView::None, {}, irq_bit::kMidelegForced},
  {csr::kMie,        "mie",        Cell::Mie,        irq_bit::kAll, irq_bit::kAll},
  {csr::kMtvec,      "mtvec",      Cell::Mtvec,      kAll, kTvecWrite},
  {csr::kMcounteren, "mcounteren", Cell::Mcounteren, kCounterenMask, kCounterenMask},
  {csr::kMscratch,   "mscratch",   Cell::Mscratch,   kAll, kAll},
  {csr::kMepc,       "mepc",       Cell::Mepc,       kAll, kEpcWrite},
  {csr::kMcause,     "mcause",     Cell::Mcause,     kAll, kAll},
  {csr::kMtval,      "mtval",      Cell::Mtval,      kAll, kAll},
  {csr::kMip,        "mip",        Cell::Mip,        irq_bit::kAll, kMipWrite},
  {csr::kMtinst,     "mtinst",     Cell::Mtinst,     kAll, kAll},
  {csr::kMtval2,     "mtval2",     Cell::Mtval2,     kAll, kAll},
  {csr::kMcycle,     "mcycle",     Cell::Mcycle,     kAll, kAll},
  {csr::kMinstret,   "minstret",   Cell::Minstret,   kAll, kAll},
  {csr::kMvendorid,  "mvendorid",  Cell::Mvendorid,  kAll, 0},
  {csr::kMarchid,    "marchid",    Cell::Marchid,    kAll, 0},
  {csr::kMimpid,     "mimpid",     Cell::Mimpid,     kAll, 0},
  {csr::kMhartid,    "mhartid",    Cell::Mhartid,    kAll, 0},

  {csr::kSstatus,    "sstatus",    Cell::Mstatus,    kSstatusRead, kSstatusWrite, 0, DelegView::None, csr::kVsstatus},
  {csr::kSie,        "sie",        Cell::Mie,        irq_bit::kSupervisorMask, irq_bit::kSupervisorMask, 0, DelegView::Mideleg, csr::kVsie},
  {csr::kStvec,      "stvec",      Cell::Stvec,      kAll, kTvecWrite, 0, DelegView::None, csr::kVstvec},
  {csr::kScounteren, "scounteren", Cell::Scounteren, kCounterenMask, kCounterenMask},
  {csr::kSscratch,   "sscratch",   Cell::Sscratch,   kAll, kAll, 0, DelegView::None, csr::kVsscratch},
  {csr::kSepc,       "sepc",       Cell::Sepc,       kAll, kEpcWrite, 0, DelegView::None, csr::kVsepc},
  {csr::kScause,     "scause",     Cell::Scause,     kAll, kAll, 0, DelegView::None, csr::kVscause},
  {csr::kStval,      "stval",      Cell::Stval,      kAll, kAll, 0, DelegView::None, csr::kVstval},
  {csr::kSip,        "sip",        Cell::Mip,        irq_bit::kSupervisorMask, irq_bit::kSSI, 0, DelegView::Mideleg, csr::kVsip},
  {csr::kSatp,       "satp",       Cell::Satp,       kAll, kAtpWrite, 0, DelegView::None, csr::kVsatp, 0, Warl::AtpMode, ExtraCheck::Satp},

  {csr::kHstatus,    "hstatus",    Cell::Hstatus,    kHstatusRead, kHstatusWrite},
  {csr::kHedeleg,    "hedeleg",    Cell::Hedeleg,    kHedelegMask, kHedelegMask},
  {csr::kHideleg,    "hideleg",    Cell::Hideleg,    irq_bit::kVsMask, irq_bit::kVsMask},
  {csr::kHie,        "hie",        Cell::Mie,        irq_bit::kHsMask, irq_bit::kHsMask},
  {csr::kHcounteren, "hcounteren", Cell::Hcounteren, kCounterenMask, kCounterenMask},
  {csr::kHgeie,      "hgeie",      Cell::Hgeie,      kAll, 0},
  {csr::kHtval,      "htval",      Cell::Htval,      kAll, kAll},
  {csr::kHip,        "hip",        Cell::Mip,        irq_bit::kHsMask, irq_bit::kVSSI},
  {csr::kHvip,       "hvip",       Cell::Mip,        irq_bit::kVsMask, irq_bit::kVsMask},
  {csr::kHtinst,     "htinst",     Cell::Htinst,     kAll, kAll},
  {csr::kHgatp,      "hgatp",      Cell::Hgatp,      kAll, kHgatpWrite, 0, DelegView::None, {}, 0, Warl::AtpMode, ExtraCheck::Hgatp},
  {csr::kHgeip,      "hgeip",      Cell::Hgeip,      kAll, 0},

  {csr::kVsstatus,   "vsstatus",   Cell::Vsstatus,   kSstatusRead, kSstatusWrite},
  {csr::kVsie,       "vsie",       Cell::Mie,        irq_bit::kVsMask, irq_bit::kVsMask, 1, DelegView::Hideleg},
  {csr::kVstvec,     "vstvec",     Cell::Vstvec,     kAll, kTvecWrite},
  {csr::kVsscratch,  "vsscratch",  Cell::Vsscratch,  kAll, kAll},
  {csr::kVsepc,      "vsepc",      Cell::Vsepc,      kAll, kEpcWrite},
  {csr::kVscause,    "vscause",    Cell::Vscause,    kAll, kAll},
  {csr::kVstval,     "vstval",     Cell::Vstval,     kAll, kAll},
  {csr::kVsip,       "vsip",       Cell::Mip,        irq_bit::kVsMask, irq_bit::kVSSI, 1, DelegView::Hideleg},
  {csr::kVsatp,      "vsatp",      Cell::Vsatp,      kAll, kAtpWrite, 0, DelegView::None, {}, 0, Warl::AtpMode},

  {csr::kCycle,      "cycle",      Cell::Mcycle,     kAll, 0, 0, DelegView::None, {}, 0, Warl::None, ExtraCheck::Counter},
  {csr::kInstret,    "instret",    Cell::Minstret,   kAll, 0, 0, DelegView::None, {}, 0, Warl::None, ExtraCheck::Counter},
};
// clang-format on

bool supported_atp_mode(uint64_t mode) { return mode == atp::kModeBare || mode == atp::kModeSv39; }

}  // namespace

std::span<const CsrSpec> csr_specs() { return kSpecs; }

const CsrSpec* find_csr(uint16_t address)
{
  auto it = std::find_if(std::begin(kSpecs), std::end(kSpecs),
                         [address](const CsrSpec& s) { return s.address == address; });
  return it == std::end(kSpecs) ? nullptr : &*it;
}

void CsrFile::reset()
{
  cells_.fill(0);
  set_cell(Cell::Misa, kMisaValue);
  set_cell(Cell::Mstatus, set_bits(set_bits(0, 32, 2, 2), 34, 2, 2));
  set_cell(Cell::Vsstatus, set_bits(0, 32, 2, 2));
  set_cell(Cell::Hstatus, set_bits(0, 32, 2, 2));
}

uint64_t CsrFile::deleg_mask(const CsrSpec& spec) const
{
  switch (spec.deleg) {
    case DelegView::Mideleg: return mideleg();
    case DelegView::Hideleg: return hideleg();
    case DelegView::None: break;
  }
  return ~uint64_t{0};
}

uint64_t CsrFile::derived_bits(const CsrSpec& spec) const
{
  if (spec.cell == Cell::Mstatus || spec.cell == Cell::Vsstatus) {
    if ((cell(spec.cell) & status::kFS) == status::kFS)
      return status::kSD;
  }
  return 0;
}

uint64_t CsrFile::view_read(const CsrSpec& spec) const
{
  const uint64_t raw = cell(spec.cell) | derived_bits(spec);
  return ((raw & spec.read_mask & deleg_mask(spec)) >> spec.shift) | spec.read_forced;
}

void CsrFile::view_write(const CsrSpec& spec, uint64_t value)
{
  uint64_t shifted = value << spec.shift;
  const uint64_t old = cell(spec.cell);
  switch (spec.warl) {
    case Warl::Mpp:
      shifted = set_bits(shifted, status::kMppShift, 2,
                         static_cast<uint64_t>(legalize_priv(get_bits(shifted, status::kMppShift, 2))));
      break;
    case Warl::AtpMode:
      if (!supported_atp_mode(atp::mode(shifted)))
        shifted = (shifted & ~atp::kMode) | (old & atp::kMode);
      break;
    case Warl::None: break;
  }
  const uint64_t mask = spec.write_mask & deleg_mask(spec);
  set_cell(spec.cell, (old & ~mask) | (shifted & mask));
}

uint64_t CsrFile::effective_write_mask(uint16_t address) const
{
  const CsrSpec* spec = find_csr(address);
  assert(spec);
  return spec->write_mask & deleg_mask(*spec);
}

CsrStatus CsrFile::extra_check(const CsrSpec& spec, PrivilegeLevel priv) const
{
  switch (spec.check) {
    case ExtraCheck::Satp:
      if (priv.virt())
        return (hstatus() & hstatus::kVTVM) ? CsrStatus::VirtualInstruction : CsrStatus::Ok;
      if ((mstatus() & status::kTVM) && priv.base() == BasePriv::S)
        return CsrStatus::IllegalInstruction;
      return CsrStatus::Ok;
    case ExtraCheck::Hgatp:
      if (!priv.virt() && (mstatus() & status::kTVM) && priv.base() == BasePriv::S)
        return CsrStatus::IllegalInstruction;
      return CsrStatus::Ok;
    case ExtraCheck::Counter: {
      const uint64_t which = bit(spec.address & 31);
      if (priv.base() != BasePriv::M && !(cell(Cell::Mcounteren) & which))
        return CsrStatus::IllegalInstruction;
      if (priv.virt() && !(cell(Cell::Hcounteren) & which))
        return CsrStatus::VirtualInstruction;
      if (priv.base() == BasePriv::U && !(cell(Cell::Scounteren) & which))
        return priv.virt() ? CsrStatus::VirtualInstruction : CsrStatus::IllegalInstruction;
      return CsrStatus::Ok;
    }
    case ExtraCheck::None: break;
  }
  return CsrStatus::Ok;
}

ResolvedCsr CsrFile::resolve(uint16_t address, PrivilegeLevel priv, bool is_write) const
{
  const CsrSpec* spec = find_csr(address);
  if (!spec)
    return {nullptr, CsrStatus::IllegalInstruction};
  if (is_write && spec->read_only())
    return {spec, CsrStatus::IllegalInstruction};
  if (csr_rank(priv) < spec->min_rank()) {
    if (priv.virt() && spec->min_rank() <= 2)
      return {spec, CsrStatus::VirtualInstruction};
    return {spec, CsrStatus::IllegalInstruction};
  }
  if (auto st = extra_check(*spec, priv); st != CsrStatus::Ok)
    return {spec, st};
  if (priv.virt() && spec->redirect_in_vs)
    spec = find_csr(*spec->redirect_in_vs);
  return {spec, CsrStatus::Ok};
}

CsrStatus CsrFile::read(uint16_t address, PrivilegeLevel priv, uint64_t& value) const
{
  const ResolvedCsr r = resolve(address, priv, false);
  if (r.ok())
    value = view_read(*r.spec);
  return r.status;
}

CsrStatus CsrFile::write(uint16_t address, PrivilegeLevel priv, uint64_t value)
{
  const ResolvedCsr r = resolve(address, priv, true);
  if (r.ok())
    view_write(*r.spec, value);
  return r.status;
}

uint64_t CsrFile::peek(uint16_t address) const
{
  const CsrSpec* spec = find_csr(address);
  assert(spec);
  return view_read(*spec);
}

void CsrFile::poke(uint16_t address, uint64_t value)
{
  const CsrSpec* spec = find_csr(address);
  assert(spec);
  view_write(*spec, value);
}

}  // namespace hvsim
