#pragma once

#include <array>
#include <cstdint>
#include <string>

#include "hvsim/privilege.hpp"

namespace hvsim {

struct Stats {
  std::array<uint64_t, 5> instret_by_mode{};       ///< Indexed by Mode.
  std::array<uint64_t, 3> exceptions_by_target{};  ///< Indexed by TrapTarget.
  std::array<uint64_t, 3> interrupts_by_target{};
  uint64_t pte_loads = 0;
  uint64_t guest_page_faults = 0;
  uint64_t tlb_hits = 0;
  uint64_t tlb_misses = 0;

  uint64_t instret_total() const;
  uint64_t exceptions_total() const;
  uint64_t interrupts_total() const;

  uint64_t instret(Mode m) const { return instret_by_mode[index_of(m)]; }
  uint64_t exceptions(TrapTarget t) const { return exceptions_by_target[index_of(t)]; }
  uint64_t interrupts(TrapTarget t) const { return interrupts_by_target[index_of(t)]; }

  friend bool operator==(const Stats&, const Stats&) = default;
};

/// Human-readable table followed by a flat `key=value` section.
std::string format_stats(const Stats& stats);
std::string format_stats_flat(const Stats& stats);

}  // namespace hvsim
