#include "hvsim/mmu.hpp"

#include <algorithm>
#include <ostream>

#include <fmt/format.h>

namespace hvsim {

namespace {

constexpr uint64_t page_mask(unsigned level) { return level_offset_mask(level) >> 12; }

bool covers(uint64_t vpn, unsigned level, uint64_t addr)
{
  return ((addr >> 12) & ~page_mask(level)) == (vpn & ~page_mask(level));
}

Trap make_fault(uint64_t code, uint64_t tval, uint64_t tval2, uint64_t tinst, bool gva)
{
  Trap t = Trap::exception(code, tval);
  t.tval2 = tval2;
  t.tinst = tinst;
  t.gva = gva;
  return t;
}

std::string_view stage_name(int stage)
{
  switch (stage) {
    case 0: return "S";
    case 1: return "VS";
    default: return "G";
  }
}

}  // namespace

uint64_t page_fault_code(AccessType access)
{
  switch (access) {
    case AccessType::Execute: return exc::kInstrPageFault;
    case AccessType::Read: return exc::kLoadPageFault;
    case AccessType::Write: return exc::kStorePageFault;
  }
  return exc::kLoadPageFault;
}

uint64_t guest_page_fault_code(AccessType access)
{
  switch (access) {
    case AccessType::Execute: return exc::kInstrGuestPageFault;
    case AccessType::Read: return exc::kLoadGuestPageFault;
    case AccessType::Write: return exc::kStoreGuestPageFault;
  }
  return exc::kLoadGuestPageFault;
}

uint64_t access_fault_code(AccessType access)
{
  switch (access) {
    case AccessType::Execute: return exc::kInstrAccess;
    case AccessType::Read: return exc::kLoadAccess;
    case AccessType::Write: return exc::kStoreAccess;
  }
  return exc::kLoadAccess;
}

TranslationContext TranslationContext::from(const Hart& hart, AccessType access, XlateFlags flags)
{
  const CsrFile& c = hart.csrs;
  const uint64_t mstatus = c.mstatus();
  TranslationContext ctx;
  ctx.priv = hart.priv.base();
  ctx.virt = hart.priv.virt();
  if (access != AccessType::Execute && (mstatus & status::kMPRV) && ctx.priv == BasePriv::M) {
    ctx.priv = legalize_priv(get_bits(mstatus, status::kMppShift, 2));
    ctx.virt = (mstatus & status::kMPV) && ctx.priv != BasePriv::M;
  }
  if (flags.forced_virt) {
    ctx.priv = (c.hstatus() & hstatus::kSPVP) ? BasePriv::S : BasePriv::U;
    ctx.virt = true;
  }
  ctx.atp = c.cell(ctx.virt ? Cell::Vsatp : Cell::Satp);
  ctx.hgatp = c.cell(Cell::Hgatp);
  const uint64_t first_status = ctx.virt ? c.vsstatus() : mstatus;
  ctx.sum = first_status & status::kSUM;
  ctx.mxr = (mstatus & status::kMXR) || (ctx.virt && (c.vsstatus() & status::kMXR));
  ctx.g_mxr = mstatus & status::kMXR;
  ctx.hlvx = flags.hlvx;
  return ctx;
}

bool first_stage_permits(uint8_t perms, AccessType access, const TranslationContext& ctx)
{
  if (!(perms & pte::kA) || (access == AccessType::Write && !(perms & pte::kD)))
    return false;
  const bool user_page = perms & pte::kU;
  if (ctx.priv == BasePriv::U) {
    if (!user_page)
      return false;
  } else if (user_page && (access == AccessType::Execute || !ctx.sum)) {
    return false;
  }
  if (access == AccessType::Execute || ctx.hlvx)
    return perms & pte::kX;
  if (access == AccessType::Read)
    return (perms & pte::kR) || (ctx.mxr && (perms & pte::kX));
  return (perms & pte::kR) && (perms & pte::kW);
}

bool g_stage_permits(uint8_t perms, AccessType access, bool mxr, bool hlvx)
{
  if (!(perms & pte::kA) || (access == AccessType::Write && !(perms & pte::kD)) || !(perms & pte::kU))
    return false;
  if (access == AccessType::Execute || hlvx)
    return perms & pte::kX;
  if (access == AccessType::Read)
    return (perms & pte::kR) || (mxr && (perms & pte::kX));
  return (perms & pte::kR) && (perms & pte::kW);
}

std::size_t Tlb::index_of(uint64_t vpn, unsigned level, uint16_t asid, uint16_t vmid)
{
  uint64_t h = (vpn >> (9 * level)) ^ (uint64_t{level} << 7) ^ (uint64_t{asid} << 3) ^ (uint64_t{vmid} << 5);
  h ^= h >> 6;
  return h % kEntries;
}

const TlbEntry* Tlb::lookup(const Key& key, uint64_t va)
{
  for (unsigned level = 0; level < 3; ++level) {
    const uint64_t vpn = (va >> 12) & ~page_mask(level);
    const TlbEntry& e = entries_[index_of(vpn, level, key.asid, key.vmid)];
    if (e.valid && e.level == level && e.vpn == vpn && e.two_stage == key.two_stage && e.asid == key.asid
        && e.vmid == key.vmid && e.s1_bare == key.s1_bare && e.g_bare == key.g_bare)
      return &e;
  }
  return nullptr;
}

void Tlb::insert(const TlbEntry& entry)
{
  if (!enabled_)
    return;
  entries_[index_of(entry.vpn, entry.level, entry.asid, entry.vmid)] = entry;
}

void Tlb::flush_sfence(std::optional<uint16_t> asid, std::optional<uint64_t> va, uint16_t current_vmid)
{
  for (TlbEntry& e : entries_) {
    if (!e.valid)
      continue;
    if (e.two_stage) {
      if (e.vmid == current_vmid)
        e.valid = false;
      continue;
    }
    if ((!asid || e.asid == *asid) && (!va || covers(e.vpn, e.vs_level, *va)))
      e.valid = false;
  }
}

void Tlb::flush_vvma(uint16_t vmid, std::optional<uint16_t> asid, std::optional<uint64_t> va)
{
  for (TlbEntry& e : entries_) {
    if (e.valid && e.two_stage && e.vmid == vmid && (!asid || e.asid == *asid)
        && (!va || covers(e.vpn, e.vs_level, *va)))
      e.valid = false;
  }
}

void Tlb::flush_gvma(std::optional<uint16_t> vmid, std::optional<uint64_t> gpa)
{
  for (TlbEntry& e : entries_) {
    if (!e.valid || !e.two_stage || (vmid && e.vmid != *vmid))
      continue;
    if (!gpa || covers(e.gpa_of(e.vpn << 12) >> 12, e.g_level, *gpa))
      e.valid = false;
  }
}

void Tlb::flush_all()
{
  for (TlbEntry& e : entries_)
    e.valid = false;
}

void Tlb::set_enabled(bool on)
{
  enabled_ = on;
  flush_all();
}

std::size_t Tlb::valid_count() const
{
  return std::count_if(entries_.begin(), entries_.end(), [](const TlbEntry& e) { return e.valid; });
}

std::optional<uint64_t> Mmu::load_pte(uint64_t pa, Stage stage, unsigned level)
{
  auto value = bus_.load_ram(pa, 8);
  if (!value)
    return std::nullopt;
  ++pte_loads_;
  if (walk_trace_) {
    *walk_trace_ << fmt::format("WALK stage={} level={} addr=0x{:016x} pte=0x{:016x}\n",
                                stage_name(static_cast<int>(stage)), level, pa, *value);
  }
  return value;
}

Mmu::StageResult Mmu::walk_g(const TranslationContext& ctx, uint64_t gpa, AccessType access, bool implicit,
                             uint64_t tval)
{
  const uint64_t tinst = implicit ? kTinstPteRead : 0;
  auto guest_fault = [&] {
    return StageResult{false, {}, make_fault(guest_page_fault_code(access), tval, gpa >> 2, tinst, true)};
  };
  if (gpa >> 41)
    return guest_fault();

  uint64_t table = atp::ppn(ctx.hgatp) << 12;
  for (int level = 2; level >= 0; --level) {
    const uint64_t index = level == 2 ? (gpa >> 30) & 0x7FF : (gpa >> (12 + 9 * level)) & 0x1FF;
    auto raw = load_pte(table + index * 8, Stage::G, level);
    if (!raw)
      return {false, {}, make_fault(access_fault_code(access), tval, 0, 0, true)};
    const uint64_t p = *raw;
    if ((p & pte::kReserved) || !(p & pte::kV) || ((p & pte::kW) && !(p & pte::kR)))
      return guest_fault();
    if (!pte::is_leaf(p)) {
      if (level == 0 || (p & (pte::kA | pte::kD | pte::kU)))
        return guest_fault();
      table = pte::ppn(p) << 12;
      continue;
    }
    const auto perms = static_cast<uint8_t>(p & 0xFF);
    const bool ok = implicit ? g_stage_permits(perms, AccessType::Read, false, false)
                             : g_stage_permits(perms, access, ctx.g_mxr, ctx.hlvx);
    if (!ok || (pte::ppn(p) & page_mask(level)))
      return guest_fault();
    return {true, {pte::ppn(p) | ((gpa >> 12) & page_mask(level)), static_cast<unsigned>(level), perms}, {}};
  }
  return guest_fault();
}

Mmu::StageResult Mmu::walk_first(const TranslationContext& ctx, uint64_t va, AccessType access)
{
  const Stage stage = ctx.virt ? Stage::VS : Stage::S;
  const bool nested = ctx.virt && !ctx.g_stage_bare();
  auto page_fault = [&] {
    return StageResult{false, {}, make_fault(page_fault_code(access), va, 0, 0, ctx.virt)};
  };

  uint64_t table = atp::ppn(ctx.atp) << 12;
  for (int level = 2; level >= 0; --level) {
    const uint64_t pte_addr = table + ((va >> (12 + 9 * level)) & 0x1FF) * 8;
    uint64_t pte_pa = pte_addr;
    if (nested) {
      StageResult g = walk_g(ctx, pte_addr, access, true, va);
      if (!g.ok)
        return g;
      pte_pa = (g.leaf.ppn << 12) | (pte_addr & 0xFFF);
    }
    auto raw = load_pte(pte_pa, stage, level);
    if (!raw)
      return {false, {}, make_fault(access_fault_code(access), va, 0, 0, ctx.virt)};
    const uint64_t p = *raw;
    if ((p & pte::kReserved) || !(p & pte::kV) || ((p & pte::kW) && !(p & pte::kR)))
      return page_fault();
    if (!pte::is_leaf(p)) {
      if (level == 0 || (p & (pte::kA | pte::kD | pte::kU)))
        return page_fault();
      table = pte::ppn(p) << 12;
      continue;
    }
    const auto perms = static_cast<uint8_t>(p & 0xFF);
    if (!first_stage_permits(perms, access, ctx) || (pte::ppn(p) & page_mask(level)))
      return page_fault();
    return {true, {pte::ppn(p) | ((va >> 12) & page_mask(level)), static_cast<unsigned>(level), perms}, {}};
  }
  return page_fault();
}

Translation Mmu::walk_and_fill(const TranslationContext& ctx, uint64_t va, AccessType access,
                               const Tlb::Key& key)
{
  TlbEntry e;
  e.valid = true;
  e.two_stage = key.two_stage;
  e.s1_bare = key.s1_bare;
  e.g_bare = key.g_bare;
  e.asid = key.asid;
  e.vmid = key.vmid;
  e.vs_level = 2;
  e.g_level = 2;

  uint64_t gpa = va;
  if (!ctx.first_stage_bare()) {
    StageResult s1 = walk_first(ctx, va, access);
    if (!s1.ok)
      return Translation::failure(s1.fault);
    gpa = (s1.leaf.ppn << 12) | (va & 0xFFF);
    e.vs_level = s1.leaf.level;
    e.vs_perms = s1.leaf.perms;
  }
  uint64_t pa = gpa;
  if (ctx.virt && !ctx.g_stage_bare()) {
    StageResult g = walk_g(ctx, gpa, access, false, va);
    if (!g.ok)
      return Translation::failure(g.fault);
    pa = (g.leaf.ppn << 12) | (gpa & 0xFFF);
    e.g_level = g.leaf.level;
    e.g_perms = g.leaf.perms;
  }
  e.level = std::min(e.vs_level, e.g_level);
  e.vpn = (va >> 12) & ~page_mask(e.level);
  e.guest_pfn = (gpa >> 12) & ~page_mask(e.vs_level);
  e.host_pfn = (pa >> 12) & ~page_mask(e.level);
  tlb_.insert(e);
  return Translation::success(pa);
}

Translation Mmu::translate(const Hart& hart, uint64_t va, AccessType access, XlateFlags flags)
{
  return translate(TranslationContext::from(hart, access, flags), va, access);
}

Translation Mmu::translate(const TranslationContext& ctx, uint64_t va, AccessType access)
{
  if (ctx.bare())
    return Translation::success(va);

  if (!ctx.first_stage_bare()) {
    if (static_cast<uint64_t>(sign_extend(va, 39)) != va)
      return Translation::failure(make_fault(page_fault_code(access), va, 0, 0, ctx.virt));
  } else if (va >> 41) {
    return Translation::failure(make_fault(guest_page_fault_code(access), va, va >> 2, 0, true));
  }

  Tlb::Key key{ctx.virt, ctx.virt && ctx.first_stage_bare(), ctx.virt && ctx.g_stage_bare(),
               static_cast<uint16_t>(atp::asid(ctx.atp)),
               static_cast<uint16_t>(ctx.virt ? atp::vmid(ctx.hgatp) : 0)};

  if (tlb_.enabled()) {
    if (const TlbEntry* e = tlb_.lookup(key, va)) {
      ++tlb_.hits;
      if (!e->s1_bare && !first_stage_permits(e->vs_perms, access, ctx))
        return Translation::failure(make_fault(page_fault_code(access), va, 0, 0, ctx.virt));
      if (e->two_stage && !e->g_bare && !g_stage_permits(e->g_perms, access, ctx.g_mxr, ctx.hlvx))
        return Translation::failure(
            make_fault(guest_page_fault_code(access), va, e->gpa_of(va) >> 2, 0, true));
      return Translation::success((e->host_pfn << 12) | (va & level_offset_mask(e->level)));
    }
    ++tlb_.misses;
  }
  return walk_and_fill(ctx, va, access, key);
}

}  // namespace hvsim
