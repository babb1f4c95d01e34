#pragma once

#include <cstdint>

#include "hvsim/memory.hpp"
#include "hvsim/mmu.hpp"

namespace hvsim::testing {

/// Inputs of a reference translation.
struct WalkQuery {
  bool virt = false;
  BasePriv priv = BasePriv::S;
  uint64_t atp = 0;
  uint64_t hgatp = 0;
  bool sum = false;
  bool mxr = false;
  bool g_mxr = false;
  bool hlvx = false;

  TranslationContext context() const
  {
    TranslationContext ctx;
    ctx.priv = priv;
    ctx.virt = virt;
    ctx.atp = atp;
    ctx.hgatp = hgatp;
    ctx.sum = sum;
    ctx.mxr = mxr;
    ctx.g_mxr = g_mxr;
    ctx.hlvx = hlvx;
    return ctx;
  }
};

struct WalkOutcome {
  bool ok = false;
  uint64_t pa = 0;
  uint64_t cause = 0;
  uint64_t tval = 0;
  uint64_t tval2 = 0;
  uint64_t tinst = 0;
  bool gva = false;
  unsigned pte_loads = 0;
};

/// TLB-free translation straight from the page tables in `mem`, written
/// independently of the simulator's walker.
WalkOutcome reference_translate(const PhysicalMemory& mem, const WalkQuery& q, uint64_t va, AccessType access);

/// Converts a simulator translation to the oracle's shape (pte_loads left 0).
WalkOutcome outcome_of(const Translation& t);

bool same_result(const WalkOutcome& a, const WalkOutcome& b);

}  // namespace hvsim::testing
