#pragma once

#include <cstdint>

#include "hvsim/privilege.hpp"

namespace hvsim::testing {

/// Exception codes M may delegate to HS.
constexpr bool hs_delegable_exception(uint64_t code)
{
  return code <= 10 || code == 12 || code == 13 || code == 15 || (code >= 20 && code <= 23);
}

/// Exception codes HS may further delegate to VS.
constexpr bool vs_delegable_exception(uint64_t code)
{
  return code <= 8 || code == 12 || code == 13 || code == 15;
}

/// Decision procedure for the level that takes a trap, given the delegation
/// bits the software tried to set for this cause.
constexpr TrapTarget expected_target(bool interrupt, uint64_t code, bool m_bit, bool h_bit, Mode from)
{
  if (from == Mode::M)
    return TrapTarget::M;
  const bool virt = from == Mode::VS || from == Mode::VU;
  bool to_hs = false;
  bool to_vs = false;
  if (interrupt) {
    const bool vs_interrupt = code == 2 || code == 6 || code == 10;
    const bool forced = vs_interrupt || code == 12;
    const bool m_writable = code == 1 || code == 5 || code == 9;
    to_hs = forced || (m_writable && m_bit);
    to_vs = to_hs && virt && vs_interrupt && h_bit;
  } else {
    to_hs = m_bit && hs_delegable_exception(code);
    to_vs = to_hs && virt && h_bit && vs_delegable_exception(code);
  }
  if (to_vs)
    return TrapTarget::VS;
  return to_hs ? TrapTarget::HS : TrapTarget::M;
}

}  // namespace hvsim::testing
