#pragma once

#include <cstdint>

namespace hvsim {

constexpr uint64_t bit(unsigned n) { return uint64_t{1} << n; }

/// Mask of `width` ones starting at bit `lo`.
constexpr uint64_t field_mask(unsigned lo, unsigned width)
{
  return width >= 64 ? ~uint64_t{0} << lo : ((uint64_t{1} << width) - 1) << lo;
}

constexpr uint64_t get_bits(uint64_t value, unsigned lo, unsigned width)
{
  return (value & field_mask(lo, width)) >> lo;
}

constexpr uint64_t set_bits(uint64_t value, unsigned lo, unsigned width, uint64_t field)
{
  const uint64_t mask = field_mask(lo, width);
  return (value & ~mask) | ((field << lo) & mask);
}

constexpr int64_t sign_extend(uint64_t value, unsigned width)
{
  const unsigned shift = 64 - width;
  return static_cast<int64_t>(value << shift) >> shift;
}

}  // namespace hvsim
