#include "hvsim/memory.hpp"

#include <fstream>
#include <iterator>
#include <vector>

#include <fmt/format.h>

namespace hvsim {

PhysicalMemory::PhysicalMemory(uint64_t base, uint64_t size) : base_(base), size_(size) {}

bool PhysicalMemory::contains(uint64_t addr, unsigned len) const
{
  return addr >= base_ && len <= size_ && addr - base_ <= size_ - len && addr < (uint64_t{1} << kPhysAddrBits);
}

uint8_t* PhysicalMemory::page_for_write(uint64_t addr)
{
  auto& page = pages_[addr >> 12];
  if (!page)
    page = std::make_unique<Page>();
  return page->data();
}

const uint8_t* PhysicalMemory::page_for_read(uint64_t addr) const
{
  auto it = pages_.find(addr >> 12);
  return it == pages_.end() ? nullptr : it->second->data();
}

uint64_t PhysicalMemory::read(uint64_t addr, unsigned len) const
{
  uint64_t value = 0;
  for (unsigned i = 0; i < len; ++i) {
    const uint8_t* page = page_for_read(addr + i);
    const uint64_t byte = page ? page[(addr + i) & 0xFFF] : 0;
    value |= byte << (8 * i);
  }
  return value;
}

void PhysicalMemory::write(uint64_t addr, unsigned len, uint64_t value)
{
  for (unsigned i = 0; i < len; ++i)
    page_for_write(addr + i)[(addr + i) & 0xFFF] = static_cast<uint8_t>(value >> (8 * i));
}

void PhysicalMemory::write_bytes(uint64_t addr, std::span<const uint8_t> bytes)
{
  for (std::size_t i = 0; i < bytes.size(); ++i)
    page_for_write(addr + i)[(addr + i) & 0xFFF] = bytes[i];
}

void PhysicalMemory::read_bytes(uint64_t addr, std::span<uint8_t> out) const
{
  for (std::size_t i = 0; i < out.size(); ++i) {
    const uint8_t* page = page_for_read(addr + i);
    out[i] = page ? page[(addr + i) & 0xFFF] : 0;
  }
}

void ExitDevice::store(uint64_t addr, uint64_t value)
{
  if (addr != address)
    return;
  last_write = value;
  if (value == 1)
    status = ExitStatus{true, 0};
  else if (value & 1)
    status = ExitStatus{false, (value - 1) / 2};
}

std::optional<uint64_t> Bus::load(uint64_t addr, unsigned len) const
{
  if (exit_.covers(addr, len))
    return 0;
  return load_ram(addr, len);
}

std::optional<uint64_t> Bus::load_ram(uint64_t addr, unsigned len) const
{
  if (exit_.covers(addr, len) || !ram_.contains(addr, len))
    return std::nullopt;
  return ram_.read(addr, len);
}

bool Bus::store(uint64_t addr, unsigned len, uint64_t value)
{
  if (exit_.covers(addr, len)) {
    exit_.store(addr, value);
    return true;
  }
  if (!ram_.contains(addr, len))
    return false;
  ram_.write(addr, len, value);
  return true;
}

void Bus::load_image(std::span<const uint8_t> bytes, uint64_t addr)
{
  if (bytes.empty())
    return;
  if (!ram_.contains(addr, 1) || bytes.size() > ram_.base() + ram_.size() - addr)
    throw ImageError(fmt::format("image of {} bytes does not fit at 0x{:x}", bytes.size(), addr));
  ram_.write_bytes(addr, bytes);
}

void Bus::load_image_file(const std::filesystem::path& path, uint64_t addr)
{
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw ImageError(fmt::format("cannot open {}", path.string()));
  std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  load_image(bytes, addr);
}

}  // namespace hvsim
