#include "hvsim/harness/page_table_builder.hpp"

#include <fmt/format.h>

namespace hvsim::harness {

PageTableBuilder::PageTableBuilder(PhysicalMemory& memory, uint64_t pool_base, uint64_t pool_size,
                                   PagingFormat format, Locator locate)
    : memory_(memory), pool_base_(pool_base), pool_end_(pool_base + pool_size), next_(pool_base),
      format_(format), locate_(std::move(locate))
{
}

uint64_t PageTableBuilder::alloc(uint64_t size, uint64_t align)
{
  const uint64_t addr = (next_ + align - 1) & ~(align - 1);
  if (addr + size > pool_end_)
    throw std::runtime_error(fmt::format("page-table pool at 0x{:x} exhausted", pool_base_));
  next_ = addr + size;
  for (uint64_t off = 0; off < size; off += 8)
    write_pte(addr + off, 0);
  return addr;
}

uint64_t PageTableBuilder::new_root()
{
  const uint64_t size = format_ == PagingFormat::Sv39x4 ? 0x4000 : 0x1000;
  return alloc(size, size);
}

uint64_t PageTableBuilder::new_table() { return alloc(0x1000, 0x1000); }

unsigned PageTableBuilder::index(uint64_t va, unsigned level) const
{
  if (level == 2 && format_ == PagingFormat::Sv39x4)
    return (va >> 30) & 0x7FF;
  return (va >> (12 + 9 * level)) & 0x1FF;
}

uint64_t PageTableBuilder::read_pte(uint64_t addr) const { return memory_.read(host_address(addr), 8); }

void PageTableBuilder::write_pte(uint64_t addr, uint64_t value) { memory_.write(host_address(addr), 8, value); }

uint64_t PageTableBuilder::descend(uint64_t root, uint64_t va, unsigned level)
{
  uint64_t table = root;
  for (unsigned l = 2; l > level; --l) {
    const uint64_t slot = table + index(va, l) * 8;
    uint64_t p = read_pte(slot);
    if (!(p & pte::kV) || pte::is_leaf(p)) {
      const uint64_t next = new_table();
      p = ((next >> 12) << pte::kPpnShift) | pte::kV;
      write_pte(slot, p);
    }
    table = pte::ppn(p) << 12;
  }
  return table + index(va, level) * 8;
}

void PageTableBuilder::map(uint64_t root, uint64_t va, uint64_t pa, unsigned level, uint64_t flags)
{
  const uint64_t slot = descend(root, va, level);
  write_pte(slot, ((pa >> 12) << pte::kPpnShift) | (flags & 0xFF) | pte::kV);
  mappings_.push_back({va & ~level_offset_mask(level), pa & ~level_offset_mask(level), level, flags});
}

void PageTableBuilder::map_range(uint64_t root, uint64_t va, uint64_t pa, uint64_t count, uint64_t flags)
{
  for (uint64_t i = 0; i < count; ++i)
    map(root, va + i * 0x1000, pa + i * 0x1000, 0, flags);
}

void PageTableBuilder::set_raw(uint64_t root, uint64_t va, unsigned level, uint64_t raw)
{
  write_pte(descend(root, va, level), raw);
}

std::optional<uint64_t> PageTableBuilder::slot_address(uint64_t root, uint64_t va, unsigned level) const
{
  uint64_t table = root;
  for (unsigned l = 2; l > level; --l) {
    const uint64_t p = read_pte(table + index(va, l) * 8);
    if (!(p & pte::kV) || pte::is_leaf(p))
      return std::nullopt;
    table = pte::ppn(p) << 12;
  }
  return table + index(va, level) * 8;
}

std::optional<uint64_t> PageTableBuilder::lookup(uint64_t va) const
{
  for (auto it = mappings_.rbegin(); it != mappings_.rend(); ++it) {
    const uint64_t mask = level_offset_mask(it->level);
    if ((va & ~mask) == it->va)
      return it->pa | (va & mask);
  }
  return std::nullopt;
}

uint64_t make_satp(uint64_t root, uint16_t asid)
{
  return (atp::kModeSv39 << atp::kModeShift) | (uint64_t{asid} << 44) | (root >> 12);
}

uint64_t make_hgatp(uint64_t root, uint16_t vmid)
{
  return (atp::kModeSv39 << atp::kModeShift) | (uint64_t{vmid & 0x3FFFu} << 44) | (root >> 12);
}

}  // namespace hvsim::harness
