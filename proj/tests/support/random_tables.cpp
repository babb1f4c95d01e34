#include "random_tables.hpp"

namespace hvsim::testing {

using harness::PageTableBuilder;
using harness::PagingFormat;

namespace {

constexpr uint64_t kGTables = 0x8010'0000;
constexpr uint64_t kHostTables = 0x8018'0000;
constexpr uint64_t kTablePool = 0x8'0000;
constexpr uint64_t kGuestPoolGpa = 0x4020'0000;
constexpr uint64_t kGuestPoolHost = 0x8020'0000;
constexpr uint64_t kGuestPoolPages = 64;

uint64_t pick(std::mt19937_64& rng, uint64_t n) { return std::uniform_int_distribution<uint64_t>(0, n - 1)(rng); }
bool chance(std::mt19937_64& rng, unsigned percent) { return pick(rng, 100) < percent; }

uint64_t random_flags(std::mt19937_64& rng, bool g_stage)
{
  static constexpr uint64_t kLeafShapes[] = {pte::kR, pte::kR | pte::kW, pte::kX, pte::kR | pte::kX,
                                             pte::kR | pte::kW | pte::kX, pte::kR | pte::kW | pte::kX};
  uint64_t f = kLeafShapes[pick(rng, 6)];
  if (chance(rng, 95))
    f |= pte::kA;
  if (chance(rng, 85))
    f |= pte::kD;
  if (chance(rng, g_stage ? 92 : 40))
    f |= pte::kU;
  return f;
}

unsigned random_level(std::mt19937_64& rng)
{
  const uint64_t r = pick(rng, 10);
  return r < 6 ? 0 : r < 9 ? 1 : 2;
}

uint64_t align_down(uint64_t v, unsigned level) { return v & ~level_offset_mask(level); }

}  // namespace

RandomTables make_random_tables(std::mt19937_64& rng)
{
  RandomTables t;
  t.machine = std::make_unique<Machine>();
  PhysicalMemory& mem = t.machine->bus().ram();

  PageTableBuilder g(mem, kGTables, kTablePool, PagingFormat::Sv39x4);
  PageTableBuilder vs(mem, kGuestPoolGpa, kGuestPoolPages * 0x1000, PagingFormat::Sv39,
                      [](uint64_t gpa) { return gpa - kGuestPoolGpa + kGuestPoolHost; });
  PageTableBuilder host(mem, kHostTables, kTablePool, PagingFormat::Sv39);
  const uint64_t g_root = g.new_root();
  const uint64_t vs_root = vs.new_root();
  const uint64_t host_root = host.new_root();

  // Guest table pool: usually a plain RW|U mapping, sometimes a megapage or degraded permissions.
  const uint64_t pool_flags = chance(rng, 85) ? (harness::perm::kRW | pte::kU) : random_flags(rng, true);
  if (chance(rng, 30))
    g.map(g_root, kGuestPoolGpa, kGuestPoolHost, 1, pool_flags);
  else
    g.map_range(g_root, kGuestPoolGpa, kGuestPoolHost, kGuestPoolPages, pool_flags);

  const unsigned mappings = 4 + pick(rng, 6);
  for (unsigned i = 0; i < mappings; ++i) {
    // Keep guest data out of the gigabyte holding the table pool.
    uint64_t gpa_giga = pick(rng, 2048);
    if (gpa_giga == 1)
      gpa_giga = 0;
    const unsigned vs_level = random_level(rng);
    const uint64_t va = align_down(static_cast<uint64_t>(sign_extend(rng() & ((uint64_t{1} << 39) - 1), 39)), vs_level);
    uint64_t gpa = align_down((gpa_giga << 30) | (rng() & ((uint64_t{1} << 30) - 1)), vs_level);
    if (chance(rng, 5))
      gpa |= uint64_t{1} << 41;  // beyond the guest physical range
    vs.map(vs_root, va, gpa, vs_level, random_flags(rng, false));

    const unsigned g_level = random_level(rng);
    const uint64_t probe_off = rng() & level_offset_mask(vs_level) & ~uint64_t{7};
    const uint64_t probe_gpa = gpa + probe_off;
    if (!(probe_gpa >> 41) && (probe_gpa >> 30) != 1 && chance(rng, 85)) {
      const uint64_t hpa = align_down(rng() & ((uint64_t{1} << 50) - 1), g_level);
      g.map(g_root, align_down(probe_gpa, g_level), hpa, g_level, random_flags(rng, true));
    }
    // A second probe elsewhere in the same first-stage leaf, usually backed too.
    const uint64_t probe2_off = rng() & level_offset_mask(vs_level);
    const uint64_t probe2_gpa = gpa + probe2_off;
    if (!(probe2_gpa >> 41) && (probe2_gpa >> 30) != 1 &&
        align_down(probe2_gpa, g_level) != align_down(probe_gpa, g_level) && chance(rng, 70)) {
      const uint64_t hpa = align_down(rng() & ((uint64_t{1} << 50) - 1), g_level);
      g.map(g_root, align_down(probe2_gpa, g_level), hpa, g_level, random_flags(rng, true));
    }
    host.map(host_root, va, align_down(rng() & ((uint64_t{1} << 50) - 1), vs_level), vs_level,
             random_flags(rng, false));

    t.probes.push_back(va + probe_off);
    t.probes.push_back(va + probe2_off);
    t.probes.push_back(va + level_offset_mask(vs_level) + 1);
  }

  // Malformed entries: reserved bits, W without R, misaligned superpages.
  for (unsigned i = 0; i < 2; ++i) {
    if (!chance(rng, 50))
      continue;
    const uint64_t va = static_cast<uint64_t>(sign_extend(rng() & ((uint64_t{1} << 39) - 1), 39));
    const unsigned level = random_level(rng);
    uint64_t raw = (rng() & (((uint64_t{1} << 44) - 1) << 10)) | pte::kV | pte::kA | pte::kD | pte::kU;
    switch (pick(rng, 3)) {
      case 0: raw |= pte::kR | (uint64_t{1} << 60); break;
      case 1: raw |= pte::kW; break;
      default: raw |= pte::kR | pte::kX | (level ? uint64_t{1} << 10 : 0); break;
    }
    vs.set_raw(vs_root, va, level, raw);
    t.probes.push_back(va);
  }

  for (unsigned i = 0; i < 4; ++i)
    t.probes.push_back(rng());

  t.vsatp = harness::make_satp(vs_root, static_cast<uint16_t>(pick(rng, 4)));
  t.hgatp = harness::make_hgatp(g_root, static_cast<uint16_t>(pick(rng, 4)));
  t.satp = harness::make_satp(host_root, static_cast<uint16_t>(pick(rng, 4)));
  return t;
}

WalkQuery random_query(std::mt19937_64& rng, const RandomTables& t, bool& virt)
{
  WalkQuery q;
  virt = chance(rng, 80);
  q.virt = virt;
  q.priv = chance(rng, 60) ? BasePriv::S : BasePriv::U;
  q.hgatp = t.hgatp;
  if (virt) {
    q.atp = chance(rng, 85) ? t.vsatp : 0;
    if (chance(rng, 10))
      q.hgatp = 0;
  } else {
    q.atp = t.satp;
  }
  q.sum = chance(rng, 50);
  q.mxr = chance(rng, 20);
  q.g_mxr = q.mxr && chance(rng, 50);
  q.hlvx = virt && chance(rng, 10);
  return q;
}

AccessType random_access(std::mt19937_64& rng)
{
  switch (pick(rng, 3)) {
    case 0: return AccessType::Read;
    case 1: return AccessType::Write;
    default: return AccessType::Execute;
  }
}

}  // namespace hvsim::testing
