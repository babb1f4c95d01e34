#include "csr_checks.hpp"

#include <fmt/format.h>

#include <random>

namespace hvsim::testing {

namespace {

constexpr PrivilegeLevel kM = PrivilegeLevel::machine();

// clang-format off
constexpr Alias kAliases[] = {
  {csr::kSstatus, 1, csr::kMstatus, 1, true, true},
  {csr::kSstatus, 5, csr::kMstatus, 5, true, true},
  {csr::kSstatus, 8, csr::kMstatus, 8, true, true},
  {csr::kSstatus, 13, csr::kMstatus, 13, true, true},
  {csr::kSstatus, 18, csr::kMstatus, 18, true, true},
  {csr::kSstatus, 19, csr::kMstatus, 19, true, true},
  {csr::kSie, 1, csr::kMie, 1, true, true},
  {csr::kSie, 5, csr::kMie, 5, true, true},
  {csr::kSie, 9, csr::kMie, 9, true, true},
  {csr::kSip, 1, csr::kMip, 1, true, true},
  {csr::kHie, 2, csr::kMie, 2, true, true},
  {csr::kHie, 6, csr::kMie, 6, true, true},
  {csr::kHie, 10, csr::kMie, 10, true, true},
  {csr::kHie, 12, csr::kMie, 12, true, true},
  {csr::kHip, 2, csr::kMip, 2, true, true},
  {csr::kHvip, 2, csr::kMip, 2, true, true},
  {csr::kHvip, 6, csr::kMip, 6, true, false},
  {csr::kHvip, 10, csr::kMip, 10, true, false},
  {csr::kHvip, 2, csr::kHip, 2, true, true},
  {csr::kHvip, 6, csr::kHip, 6, true, false},
  {csr::kHvip, 10, csr::kHip, 10, true, false},
  {csr::kVsie, 1, csr::kMie, 2, true, true},
  {csr::kVsie, 5, csr::kMie, 6, true, true},
  {csr::kVsie, 9, csr::kMie, 10, true, true},
  {csr::kVsie, 1, csr::kHie, 2, true, true},
  {csr::kVsip, 1, csr::kMip, 2, true, true},
  {csr::kVsip, 1, csr::kHvip, 2, true, true},
  {csr::kVsip, 5, csr::kHvip, 6, false, true},
  {csr::kVsip, 9, csr::kHvip, 10, false, true},
  {csr::kCycle, 0, csr::kMcycle, 0, false, true},
  {csr::kInstret, 3, csr::kMinstret, 3, false, true},
};
// clang-format on


bool has(const CsrFile& f, uint16_t addr, unsigned b) { return (f.peek(addr) >> b) & 1; }
void set1(CsrFile& f, uint16_t addr, unsigned b) { f.poke(addr, f.peek(addr) | bit(b)); }
void clear1(CsrFile& f, uint16_t addr, unsigned b) { f.poke(addr, f.peek(addr) & ~bit(b)); }

void check_direction(std::vector<std::string>& out, uint16_t from, unsigned from_bit, uint16_t to,
                     unsigned to_bit, bool to_writable)
{
  CsrFile f = open_csr_file();
  set1(f, from, from_bit);
  if (!has(f, to, to_bit))
    out.push_back(fmt::format("set 0x{:03x}[{}] not visible in 0x{:03x}[{}]", from, from_bit, to, to_bit));
  if (to_writable) {
    clear1(f, to, to_bit);
    if (has(f, from, from_bit))
      out.push_back(fmt::format("clear 0x{:03x}[{}] not visible in 0x{:03x}[{}]", to, to_bit, from, from_bit));
  }
}

}  // namespace

std::span<const Alias> csr_aliases() { return kAliases; }

CsrFile open_csr_file()
{
  CsrFile f;
  f.poke(csr::kMideleg, irq_bit::kSupervisorMask);
  f.poke(csr::kHideleg, irq_bit::kVsMask);
  return f;
}

std::vector<std::string> alias_violations()
{
  std::vector<std::string> out;
  for (const Alias& al : kAliases) {
    if (al.a_writable)
      check_direction(out, al.a, al.a_bit, al.b, al.b_bit, al.b_writable);
    if (al.b_writable)
      check_direction(out, al.b, al.b_bit, al.a, al.a_bit, al.a_writable);
  }
  return out;
}

std::vector<std::string> write_fuzz_violations(uint64_t seed, int writes)
{
  std::vector<std::string> out;
  std::mt19937_64 rng(seed);
  const auto specs = csr_specs();
  CsrFile f;
  for (int i = 0; i < writes; ++i) {
    const CsrSpec& s = specs[rng() % specs.size()];
    const uint64_t v = (i % 5 == 0) ? ~uint64_t{0} : (i % 7 == 0) ? 0 : rng();
    const auto before = f.cells();
    const uint64_t allowed = f.effective_write_mask(s.address);
    const CsrStatus st = f.write(s.address, kM, v);
    const auto after = f.cells();
    for (std::size_t c = 0; c < kCellCount; ++c) {
      const uint64_t changed = before[c] ^ after[c];
      if (c == static_cast<std::size_t>(s.cell) && (changed & ~allowed))
        out.push_back(fmt::format("{} <- 0x{:x} changed bits 0x{:x} outside mask", s.name, v, changed & ~allowed));
      else if (c != static_cast<std::size_t>(s.cell) && changed)
        out.push_back(fmt::format("{} <- 0x{:x} changed cell {}", s.name, v, c));
    }
    if (s.read_only() && st != CsrStatus::IllegalInstruction)
      out.push_back(fmt::format("{} accepted a write", s.name));
    if ((f.peek(csr::kMideleg) & irq_bit::kMidelegForced) != irq_bit::kMidelegForced)
      out.push_back(fmt::format("{} <- 0x{:x} cleared forced mideleg bits", s.name, v));
  }
  return out;
}

}  // namespace hvsim::testing
