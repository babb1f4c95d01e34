#include "walk_oracle.hpp"

#include <array>
#include <optional>

namespace hvsim::testing {

namespace {

struct Pte {
  uint64_t raw;

  bool v() const { return raw & 1; }
  bool r() const { return raw & 2; }
  bool w() const { return raw & 4; }
  bool x() const { return raw & 8; }
  bool u() const { return raw & 16; }
  bool a() const { return raw & 64; }
  bool d() const { return raw & 128; }
  uint64_t ppn() const { return (raw >> 10) & ((uint64_t{1} << 44) - 1); }
  bool reserved() const { return raw >> 54; }
};

uint64_t code3(AccessType access, uint64_t exec, uint64_t read, uint64_t write)
{
  return access == AccessType::Execute ? exec : access == AccessType::Read ? read : write;
}

struct Fault {
  uint64_t cause;
  uint64_t tval2;
  uint64_t tinst;
  bool gva;
};

class Walker {
 public:
  Walker(const PhysicalMemory& mem, const WalkQuery& q, uint64_t va, AccessType access)
      : mem_(mem), q_(q), va_(va), access_(access)
  {
  }

  WalkOutcome run()
  {
    WalkOutcome out;
    auto pa = translate();
    out.pte_loads = loads_;
    if (pa) {
      out.ok = true;
      out.pa = *pa;
      return out;
    }
    out.cause = fault_.cause;
    out.tval = va_;
    out.tval2 = fault_.tval2;
    out.tinst = fault_.tinst;
    out.gva = fault_.gva;
    return out;
  }

 private:
  std::optional<uint64_t> translate()
  {
    const bool s1_on = q_.priv != BasePriv::M && (q_.atp >> 60) == 8;
    const bool g_on = q_.virt && q_.priv != BasePriv::M && (q_.hgatp >> 60) == 8;
    uint64_t gpa = va_;
    if (s1_on) {
      const uint64_t upper = va_ >> 38;
      if (upper != 0 && upper != (uint64_t{1} << 26) - 1)
        return page_fault();
      auto r = first_stage(g_on);
      if (!r)
        return std::nullopt;
      gpa = *r;
    }
    if (!g_on)
      return gpa;
    return g_stage(gpa, false);
  }

  std::nullopt_t page_fault()
  {
    fault_ = {code3(access_, 12, 13, 15), 0, 0, q_.virt};
    return std::nullopt;
  }
  std::nullopt_t guest_fault(uint64_t gpa, bool implicit)
  {
    fault_ = {code3(access_, 20, 21, 23), gpa >> 2, implicit ? uint64_t{0x3000} : 0, true};
    return std::nullopt;
  }
  std::nullopt_t access_fault(bool gva)
  {
    fault_ = {code3(access_, 1, 5, 7), 0, 0, gva};
    return std::nullopt;
  }

  std::optional<uint64_t> read_pte(uint64_t pa)
  {
    if (!mem_.contains(pa, 8))
      return std::nullopt;
    ++loads_;
    return mem_.read(pa, 8);
  }

  bool first_leaf_allows(const Pte& p) const
  {
    if (!p.a() || (access_ == AccessType::Write && !p.d()))
      return false;
    if (q_.priv == BasePriv::U && !p.u())
      return false;
    if (q_.priv == BasePriv::S && p.u() && !(q_.sum && access_ != AccessType::Execute))
      return false;
    if (access_ == AccessType::Execute || q_.hlvx)
      return p.x();
    if (access_ == AccessType::Write)
      return p.w();
    return p.r() || (q_.mxr && p.x());
  }

  bool g_leaf_allows(const Pte& p, bool implicit) const
  {
    if (!p.u() || !p.a())
      return false;
    if (implicit)
      return p.r();
    if (access_ == AccessType::Write)
      return p.w() && p.d();
    if (access_ == AccessType::Execute || q_.hlvx)
      return p.x();
    return p.r() || (q_.g_mxr && p.x());
  }

  static bool malformed(const Pte& p, int level)
  {
    if (p.reserved() || !p.v() || (p.w() && !p.r()))
      return true;
    const bool leaf = p.r() || p.x();
    if (!leaf)
      return level == 0 || p.a() || p.d() || p.u();
    return false;
  }

  std::optional<uint64_t> first_stage(bool nested)
  {
    const std::array<uint64_t, 3> vpn = {(va_ >> 12) & 511, (va_ >> 21) & 511, (va_ >> 30) & 511};
    uint64_t base = (q_.atp & ((uint64_t{1} << 44) - 1)) << 12;
    for (int level = 2; level >= 0; --level) {
      const uint64_t slot = base + vpn[level] * 8;
      uint64_t slot_pa = slot;
      if (nested) {
        auto t = g_stage(slot, true);
        if (!t)
          return std::nullopt;
        slot_pa = *t;
      }
      auto raw = read_pte(slot_pa);
      if (!raw)
        return access_fault(q_.virt);
      const Pte p{*raw};
      if (malformed(p, level))
        return page_fault();
      if (!(p.r() || p.x())) {
        base = p.ppn() << 12;
        continue;
      }
      const uint64_t low = (uint64_t{1} << (9 * level)) - 1;
      if ((p.ppn() & low) || !first_leaf_allows(p))
        return page_fault();
      return (((p.ppn() & ~low) | ((va_ >> 12) & low)) << 12) | (va_ & 0xFFF);
    }
    return page_fault();
  }

  std::optional<uint64_t> g_stage(uint64_t gpa, bool implicit)
  {
    if (gpa >> 41)
      return guest_fault(gpa, implicit);
    const std::array<uint64_t, 3> vpn = {(gpa >> 12) & 511, (gpa >> 21) & 511, (gpa >> 30) & 2047};
    uint64_t base = (q_.hgatp & ((uint64_t{1} << 44) - 1)) << 12;
    for (int level = 2; level >= 0; --level) {
      auto raw = read_pte(base + vpn[level] * 8);
      if (!raw)
        return access_fault(true);
      const Pte p{*raw};
      if (malformed(p, level))
        return guest_fault(gpa, implicit);
      if (!(p.r() || p.x())) {
        base = p.ppn() << 12;
        continue;
      }
      const uint64_t low = (uint64_t{1} << (9 * level)) - 1;
      if ((p.ppn() & low) || !g_leaf_allows(p, implicit))
        return guest_fault(gpa, implicit);
      return (((p.ppn() & ~low) | ((gpa >> 12) & low)) << 12) | (gpa & 0xFFF);
    }
    return guest_fault(gpa, implicit);
  }

  const PhysicalMemory& mem_;
  const WalkQuery& q_;
  uint64_t va_;
  AccessType access_;
  unsigned loads_ = 0;
  Fault fault_{};
};

}  // namespace

WalkOutcome reference_translate(const PhysicalMemory& mem, const WalkQuery& q, uint64_t va, AccessType access)
{
  return Walker(mem, q, va, access).run();
}

WalkOutcome outcome_of(const Translation& t)
{
  WalkOutcome out;
  out.ok = t.ok;
  if (t.ok) {
    out.pa = t.pa;
    return out;
  }
  out.cause = t.fault.cause.code;
  out.tval = t.fault.tval;
  out.tval2 = t.fault.tval2;
  out.tinst = t.fault.tinst;
  out.gva = t.fault.gva;
  return out;
}

bool same_result(const WalkOutcome& a, const WalkOutcome& b)
{
  if (a.ok != b.ok)
    return false;
  if (a.ok)
    return a.pa == b.pa;
  return a.cause == b.cause && a.tval == b.tval && a.tval2 == b.tval2 && a.tinst == b.tinst && a.gva == b.gva;
}

}  // namespace hvsim::testing
