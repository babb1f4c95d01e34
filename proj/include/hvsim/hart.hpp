#pragma once

#include <array>
#include <cstdint>
#include <optional>

#include "hvsim/csr.hpp"
#include "hvsim/privilege.hpp"

namespace hvsim {

/// Integer register file with x0 hardwired to zero.
class RegisterFile {
 public:
  uint64_t operator[](unsigned index) const { return regs_[index & 31]; }
  void write(unsigned index, uint64_t value)
  {
    if ((index & 31) != 0)
      regs_[index & 31] = value;
  }
  void clear() { regs_.fill(0); }

 private:
  std::array<uint64_t, 32> regs_{};
};

/// Which floating-point gate rejected the most recent F/D-space opcode.
enum class FpGate : uint8_t { None, Mstatus, Vsstatus, Unimplemented };

struct Hart {
  uint64_t pc = 0;
  RegisterFile x;
  PrivilegeLevel priv = PrivilegeLevel::machine();
  CsrFile csrs;
  std::optional<uint64_t> reservation;
  bool halted = false;
  FpGate last_fp_gate = FpGate::None;

  void reset(uint64_t entry_pc)
  {
    pc = entry_pc;
    x.clear();
    priv = PrivilegeLevel::machine();
    csrs.reset();
    reservation.reset();
    halted = false;
    last_fp_gate = FpGate::None;
  }

  Mode mode() const { return effective_mode(priv); }
  bool virt() const { return priv.virt(); }
};

}  // namespace hvsim
