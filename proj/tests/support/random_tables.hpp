#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "hvsim/harness/page_table_builder.hpp"
#include "hvsim/machine.hpp"
#include "walk_oracle.hpp"

namespace hvsim::testing {

/// One randomized two-stage page-table configuration in a fresh machine.
struct RandomTables {
  std::unique_ptr<Machine> machine;
  uint64_t vsatp = 0;
  uint64_t hgatp = 0;
  uint64_t satp = 0;
  /// Interesting guest virtual addresses (mapped, near-mapped and unmapped).
  std::vector<uint64_t> probes;
};

/// Builds VS-stage and G-stage tables with random leaf levels, permissions
/// and occasional malformed entries, plus a single-stage table for V=0.
RandomTables make_random_tables(std::mt19937_64& rng);

/// Random translation query consistent with `t`.
WalkQuery random_query(std::mt19937_64& rng, const RandomTables& t, bool& virt);

AccessType random_access(std::mt19937_64& rng);

}  // namespace hvsim::testing
