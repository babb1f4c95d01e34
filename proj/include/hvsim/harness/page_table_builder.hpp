#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "hvsim/memory.hpp"
#include "hvsim/mmu.hpp"

namespace hvsim::harness {

enum class PagingFormat : uint8_t { Sv39, Sv39x4 };

/// Leaf permission shorthands (A and D preset, since the walker never sets them).
namespace perm {
constexpr uint64_t kR = pte::kR | pte::kA;
constexpr uint64_t kRW = pte::kR | pte::kW | pte::kA | pte::kD;
constexpr uint64_t kRX = pte::kR | pte::kX | pte::kA;
constexpr uint64_t kX = pte::kX | pte::kA;
constexpr uint64_t kRWX = pte::kR | pte::kW | pte::kX | pte::kA | pte::kD;
constexpr uint64_t kU = pte::kU;
}  // namespace perm

/// One mapping created through the builder.
struct Mapping {
  uint64_t va;
  uint64_t pa;
  unsigned level;
  uint64_t flags;
};

/// Builds Sv39 / Sv39x4 tables with a bump allocator. Table addresses live in
/// the builder's own address space; `locate` converts them to host physical
/// addresses for the actual PTE stores (identity for host-side tables).
class PageTableBuilder {
 public:
  using Locator = std::function<uint64_t(uint64_t)>;

  PageTableBuilder(PhysicalMemory& memory, uint64_t pool_base, uint64_t pool_size, PagingFormat format,
                   Locator locate = {});

  PagingFormat format() const { return format_; }

  /// Allocates a zeroed root table (16 KiB for Sv39x4).
  uint64_t new_root();
  /// Allocates a zeroed 4 KiB table.
  uint64_t new_table();

  /// Maps `va` -> `pa` with a leaf at `level`. `flags` are PTE bits 7:0 (V is added).
  void map(uint64_t root, uint64_t va, uint64_t pa, unsigned level, uint64_t flags);
  /// Maps `count` consecutive 4 KiB pages.
  void map_range(uint64_t root, uint64_t va, uint64_t pa, uint64_t count, uint64_t flags);

  /// Writes an arbitrary raw PTE at the slot `va` selects on `level`,
  /// creating intermediate tables as needed. Used to plant malformed entries.
  void set_raw(uint64_t root, uint64_t va, unsigned level, uint64_t raw);
  /// Address (builder space) of the PTE slot for `va` at `level`, if the
  /// path down to that level exists.
  std::optional<uint64_t> slot_address(uint64_t root, uint64_t va, unsigned level) const;

  /// Translation recorded from the mappings made so far (no table walk).
  std::optional<uint64_t> lookup(uint64_t va) const;
  const std::vector<Mapping>& mappings() const { return mappings_; }

  uint64_t host_address(uint64_t table_addr) const { return locate_ ? locate_(table_addr) : table_addr; }
  uint64_t bytes_used() const { return next_ - pool_base_; }

 private:
  uint64_t alloc(uint64_t size, uint64_t align);
  unsigned index(uint64_t va, unsigned level) const;
  uint64_t read_pte(uint64_t addr) const;
  void write_pte(uint64_t addr, uint64_t value);
  uint64_t descend(uint64_t root, uint64_t va, unsigned level);

  PhysicalMemory& memory_;
  uint64_t pool_base_;
  uint64_t pool_end_;
  uint64_t next_;
  PagingFormat format_;
  Locator locate_;
  std::vector<Mapping> mappings_;
};

/// satp/vsatp value for an Sv39 root.
uint64_t make_satp(uint64_t root, uint16_t asid = 0);
/// hgatp value for an Sv39x4 root.
uint64_t make_hgatp(uint64_t root, uint16_t vmid = 0);

}  // namespace hvsim::harness
