#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>

#include "hvsim/bits.hpp"
#include "hvsim/privilege.hpp"

namespace hvsim {

namespace csr {

// Supervisor
constexpr uint16_t kSstatus = 0x100;
constexpr uint16_t kSie = 0x104;
constexpr uint16_t kStvec = 0x105;
constexpr uint16_t kScounteren = 0x106;
constexpr uint16_t kSscratch = 0x140;
constexpr uint16_t kSepc = 0x141;
constexpr uint16_t kScause = 0x142;
constexpr uint16_t kStval = 0x143;
constexpr uint16_t kSip = 0x144;
constexpr uint16_t kSatp = 0x180;

// Virtual supervisor
constexpr uint16_t kVsstatus = 0x200;
constexpr uint16_t kVsie = 0x204;
constexpr uint16_t kVstvec = 0x205;
constexpr uint16_t kVsscratch = 0x240;
constexpr uint16_t kVsepc = 0x241;
constexpr uint16_t kVscause = 0x242;
constexpr uint16_t kVstval = 0x243;
constexpr uint16_t kVsip = 0x244;
constexpr uint16_t kVsatp = 0x280;

// Hypervisor
constexpr uint16_t kHstatus = 0x600;
constexpr uint16_t kHedeleg = 0x602;
constexpr uint16_t kHideleg = 0x603;
constexpr uint16_t kHie = 0x604;
constexpr uint16_t kHcounteren = 0x606;
constexpr uint16_t kHgeie = 0x607;
constexpr uint16_t kHtval = 0x643;
constexpr uint16_t kHip = 0x644;
constexpr uint16_t kHvip = 0x645;
constexpr uint16_t kHtinst = 0x64A;
constexpr uint16_t kHgatp = 0x680;
constexpr uint16_t kHgeip = 0xE12;

// Machine
constexpr uint16_t kMstatus = 0x300;
constexpr uint16_t kMisa = 0x301;
constexpr uint16_t kMedeleg = 0x302;
constexpr uint16_t kMideleg = 0x303;
constexpr uint16_t kMie = 0x304;
constexpr uint16_t kMtvec = 0x305;
constexpr uint16_t kMcounteren = 0x306;
constexpr uint16_t kMscratch = 0x340;
constexpr uint16_t kMepc = 0x341;
constexpr uint16_t kMcause = 0x342;
constexpr uint16_t kMtval = 0x343;
constexpr uint16_t kMip = 0x344;
constexpr uint16_t kMtinst = 0x34A;
constexpr uint16_t kMtval2 = 0x34B;
constexpr uint16_t kMcycle = 0xB00;
constexpr uint16_t kMinstret = 0xB02;
constexpr uint16_t kCycle = 0xC00;
constexpr uint16_t kInstret = 0xC02;
constexpr uint16_t kMvendorid = 0xF11;
constexpr uint16_t kMarchid = 0xF12;
constexpr uint16_t kMimpid = 0xF13;
constexpr uint16_t kMhartid = 0xF14;

}  // namespace csr

/// mstatus / sstatus / vsstatus fields.
namespace status {
constexpr uint64_t kSIE = bit(1);
constexpr uint64_t kMIE = bit(3);
constexpr uint64_t kSPIE = bit(5);
constexpr uint64_t kUBE = bit(6);
constexpr uint64_t kMPIE = bit(7);
constexpr uint64_t kSPP = bit(8);
constexpr unsigned kMppShift = 11;
constexpr uint64_t kMPP = field_mask(11, 2);
constexpr unsigned kFsShift = 13;
constexpr uint64_t kFS = field_mask(13, 2);
constexpr uint64_t kXS = field_mask(15, 2);
constexpr uint64_t kMPRV = bit(17);
constexpr uint64_t kSUM = bit(18);
constexpr uint64_t kMXR = bit(19);
constexpr uint64_t kTVM = bit(20);
constexpr uint64_t kTW = bit(21);
constexpr uint64_t kTSR = bit(22);
constexpr uint64_t kUXL = field_mask(32, 2);
constexpr uint64_t kSXL = field_mask(34, 2);
constexpr uint64_t kGVA = bit(38);
constexpr uint64_t kMPV = bit(39);
constexpr uint64_t kSD = bit(63);
}  // namespace status

namespace hstatus {
constexpr uint64_t kGVA = bit(6);
constexpr uint64_t kSPV = bit(7);
constexpr uint64_t kSPVP = bit(8);
constexpr uint64_t kHU = bit(9);
constexpr uint64_t kVTVM = bit(20);
constexpr uint64_t kVTW = bit(21);
constexpr uint64_t kVTSR = bit(22);
constexpr uint64_t kVSXL = field_mask(32, 2);
}  // namespace hstatus

/// Interrupt-pending / interrupt-enable bit positions (mip, mie and views).
namespace irq_bit {
constexpr uint64_t kSSI = bit(1);
constexpr uint64_t kVSSI = bit(2);
constexpr uint64_t kMSI = bit(3);
constexpr uint64_t kSTI = bit(5);
constexpr uint64_t kVSTI = bit(6);
constexpr uint64_t kMTI = bit(7);
constexpr uint64_t kSEI = bit(9);
constexpr uint64_t kVSEI = bit(10);
constexpr uint64_t kMEI = bit(11);
constexpr uint64_t kSGEI = bit(12);

constexpr uint64_t kVsMask = kVSSI | kVSTI | kVSEI;
constexpr uint64_t kHsMask = kVsMask | kSGEI;
constexpr uint64_t kSupervisorMask = kSSI | kSTI | kSEI;
constexpr uint64_t kAll = kSupervisorMask | kHsMask | kMSI | kMTI | kMEI;
/// mideleg bits that are hardwired to one.
constexpr uint64_t kMidelegForced = kHsMask;
}  // namespace irq_bit

/// satp / vsatp / hgatp layout.
namespace atp {
constexpr unsigned kModeShift = 60;
constexpr uint64_t kMode = field_mask(60, 4);
constexpr uint64_t kAsid = field_mask(44, 16);
constexpr uint64_t kVmid = field_mask(44, 14);
constexpr uint64_t kPpn = field_mask(0, 44);
constexpr uint64_t kModeBare = 0;
constexpr uint64_t kModeSv39 = 8;  // also Sv39x4 in hgatp

constexpr uint64_t mode(uint64_t value) { return value >> kModeShift; }
constexpr uint64_t asid(uint64_t value) { return get_bits(value, 44, 16); }
constexpr uint64_t vmid(uint64_t value) { return get_bits(value, 44, 14); }
constexpr uint64_t ppn(uint64_t value) { return value & kPpn; }
}  // namespace atp

/// Backing storage cells. Several CSR addresses may view the same cell.
enum class Cell : uint8_t {
  Mstatus, Misa, Medeleg, Mideleg, Mie, Mip, Mtvec, Mcounteren, Mscratch,
  Mepc, Mcause, Mtval, Mtinst, Mtval2, Mcycle, Minstret, Mvendorid,
  Marchid, Mimpid, Mhartid,
  Stvec, Scounteren, Sscratch, Sepc, Scause, Stval, Satp,
  Hstatus, Hedeleg, Hideleg, Hcounteren, Hgeie, Htval, Htinst, Hgatp, Hgeip,
  Vsstatus, Vstvec, Vsscratch, Vsepc, Vscause, Vstval, Vsatp,
  Count
};

constexpr std::size_t kCellCount = static_cast<std::size_t>(Cell::Count);

enum class CsrStatus : uint8_t { Ok, IllegalInstruction, VirtualInstruction };

/// Extra mask applied to an interrupt view at access time.
enum class DelegView : uint8_t { None, Mideleg, Hideleg };

/// Value legalization applied before the write mask.
enum class Warl : uint8_t { None, Mpp, AtpMode };

/// Access checks beyond the address-encoded privilege.
enum class ExtraCheck : uint8_t { None, Satp, Hgatp, Counter };

/// Static description of one CSR address. Masks are in cell coordinates;
/// the architectural view is `(cell & mask) >> shift`.
struct CsrSpec {
  uint16_t address;
  std::string_view name;
  Cell cell;
  uint64_t read_mask;
  uint64_t write_mask;
  unsigned shift = 0;
  DelegView deleg = DelegView::None;
  std::optional<uint16_t> redirect_in_vs = std::nullopt;
  uint64_t read_forced = 0;
  Warl warl = Warl::None;
  ExtraCheck check = ExtraCheck::None;

  /// Privilege rank encoded in address bits 9:8 (0 U, 1 S, 2 H, 3 M).
  constexpr unsigned min_rank() const { return (address >> 8) & 3; }
  constexpr bool read_only() const { return ((address >> 10) & 3) == 3; }
};

/// Every implemented CSR in the fixed order used by state dumps.
std::span<const CsrSpec> csr_specs();

/// Lookup by address; nullptr when unimplemented.
const CsrSpec* find_csr(uint16_t address);

/// Outcome of resolving an access after VS redirection.
struct ResolvedCsr {
  const CsrSpec* spec = nullptr;
  CsrStatus status = CsrStatus::Ok;

  bool ok() const { return status == CsrStatus::Ok; }
};

class CsrFile {
 public:
  CsrFile() { reset(); }

  void reset();

  /// Applies privilege checks and VS redirection for an access at `priv`.
  ResolvedCsr resolve(uint16_t address, PrivilegeLevel priv, bool is_write) const;

  CsrStatus read(uint16_t address, PrivilegeLevel priv, uint64_t& value) const;
  CsrStatus write(uint16_t address, PrivilegeLevel priv, uint64_t value);

  /// Architectural view of `address` with no privilege check and no
  /// redirection. The address must be implemented.
  uint64_t peek(uint16_t address) const;

  /// Masked write through `address` with no privilege check and no
  /// redirection. The address must be implemented.
  void poke(uint16_t address, uint64_t value);

  uint64_t cell(Cell c) const { return cells_[static_cast<std::size_t>(c)]; }
  void set_cell(Cell c, uint64_t value) { cells_[static_cast<std::size_t>(c)] = value; }

  /// Cell bits a write through `address` may change at this moment
  /// (write mask combined with the live delegation mask).
  uint64_t effective_write_mask(uint16_t address) const;

  const std::array<uint64_t, kCellCount>& cells() const { return cells_; }

  // Convenience accessors for the trap engine and MMU.
  uint64_t mstatus() const { return cell(Cell::Mstatus); }
  uint64_t hstatus() const { return cell(Cell::Hstatus); }
  uint64_t vsstatus() const { return cell(Cell::Vsstatus); }
  uint64_t mip() const { return cell(Cell::Mip); }
  uint64_t mie() const { return cell(Cell::Mie); }
  uint64_t mideleg() const { return cell(Cell::Mideleg) | irq_bit::kMidelegForced; }
  uint64_t hideleg() const { return cell(Cell::Hideleg) & mideleg(); }
  uint64_t medeleg() const { return cell(Cell::Medeleg); }
  uint64_t hedeleg() const { return cell(Cell::Hedeleg); }

 private:
  uint64_t view_read(const CsrSpec& spec) const;
  void view_write(const CsrSpec& spec, uint64_t value);
  uint64_t deleg_mask(const CsrSpec& spec) const;
  uint64_t derived_bits(const CsrSpec& spec) const;
  CsrStatus extra_check(const CsrSpec& spec, PrivilegeLevel priv) const;

  std::array<uint64_t, kCellCount> cells_{};
};

}  // namespace hvsim
