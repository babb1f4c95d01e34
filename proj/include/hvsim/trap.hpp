#pragma once

#include <cstdint>
#include <optional>

#include "hvsim/hart.hpp"

namespace hvsim {

/// Synchronous exception codes.
namespace exc {
constexpr uint64_t kInstrMisaligned = 0;
constexpr uint64_t kInstrAccess = 1;
constexpr uint64_t kIllegalInstruction = 2;
constexpr uint64_t kBreakpoint = 3;
constexpr uint64_t kLoadMisaligned = 4;
constexpr uint64_t kLoadAccess = 5;
constexpr uint64_t kStoreMisaligned = 6;
constexpr uint64_t kStoreAccess = 7;
constexpr uint64_t kEcallU = 8;
constexpr uint64_t kEcallHS = 9;
constexpr uint64_t kEcallVS = 10;
constexpr uint64_t kEcallM = 11;
constexpr uint64_t kInstrPageFault = 12;
constexpr uint64_t kLoadPageFault = 13;
constexpr uint64_t kStorePageFault = 15;
constexpr uint64_t kInstrGuestPageFault = 20;
constexpr uint64_t kLoadGuestPageFault = 21;
constexpr uint64_t kVirtualInstruction = 22;
constexpr uint64_t kStoreGuestPageFault = 23;

constexpr bool is_guest_page_fault(uint64_t code)
{
  return code == kInstrGuestPageFault || code == kLoadGuestPageFault || code == kStoreGuestPageFault;
}
}  // namespace exc

/// Interrupt codes.
namespace irq {
constexpr uint64_t kSSI = 1;
constexpr uint64_t kVSSI = 2;
constexpr uint64_t kMSI = 3;
constexpr uint64_t kSTI = 5;
constexpr uint64_t kVSTI = 6;
constexpr uint64_t kMTI = 7;
constexpr uint64_t kSEI = 9;
constexpr uint64_t kVSEI = 10;
constexpr uint64_t kMEI = 11;
constexpr uint64_t kSGEI = 12;

/// Highest priority first.
constexpr uint64_t kPriority[] = {kMEI, kMSI, kMTI, kSEI, kSSI, kSTI, kSGEI, kVSEI, kVSSI, kVSTI};
}  // namespace irq

constexpr uint64_t kInterruptFlag = uint64_t{1} << 63;

struct TrapCause {
  bool interrupt = false;
  uint64_t code = 0;

  uint64_t encoded() const { return (interrupt ? kInterruptFlag : 0) | code; }
  friend bool operator==(const TrapCause&, const TrapCause&) = default;
};

struct Trap {
  TrapCause cause;
  uint64_t tval = 0;
  uint64_t tval2 = 0;
  uint64_t tinst = 0;
  bool gva = false;

  static Trap exception(uint64_t code, uint64_t tval = 0) { return {{false, code}, tval}; }
  static Trap interrupt(uint64_t code) { return {{true, code}}; }
};

/// What happened when a trap was taken.
struct TrapRecord {
  TrapTarget target = TrapTarget::M;
  Trap trap;
  /// Code written to the target's cause register (VS interrupts are shifted down by one).
  uint64_t presented_code = 0;
  uint64_t epc = 0;
  Mode from = Mode::M;
};

/// Highest-priority interrupt that is pending, enabled and permitted at the
/// current privilege level.
std::optional<Trap> check_interrupts(const Hart& hart);

/// Delegation decision for `cause` taken from the hart's current state.
TrapTarget resolve_target(const TrapCause& cause, const Hart& hart);

/// Performs trap entry: writes cause/epc/tval registers of the target level,
/// updates status stacks and the privilege level, and redirects pc.
TrapRecord take_trap(Hart& hart, const Trap& trap);

enum class ReturnKind : uint8_t { Mret, Sret };

/// Executes mret or sret. Returns the exception code when the return is
/// not permitted at the current privilege level (state is then unchanged).
std::optional<uint64_t> trap_return(Hart& hart, ReturnKind kind);

}  // namespace hvsim
