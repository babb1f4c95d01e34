#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "hvsim/csr.hpp"

namespace hvsim::testing {

/// One architectural alias: bit `a_bit` of CSR `a` and bit `b_bit` of CSR `b`
/// name the same state.
struct Alias {
  uint16_t a;
  unsigned a_bit;
  uint16_t b;
  unsigned b_bit;
  bool a_writable;
  bool b_writable;
};

std::span<const Alias> csr_aliases();

/// Delegation that makes every supervisor and VS view fully visible.
CsrFile open_csr_file();

/// Sets and clears every alias from both ends; one message per broken direction.
std::vector<std::string> alias_violations();

/// Random M-mode writes over every CSR. Reports any write that changes bits
/// outside the effective write mask, touches another cell, succeeds on a
/// read-only address or clears the forced mideleg bits.
std::vector<std::string> write_fuzz_violations(uint64_t seed, int writes);

}  // namespace hvsim::testing
