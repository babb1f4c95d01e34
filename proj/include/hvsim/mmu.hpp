#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>

#include "hvsim/hart.hpp"
#include "hvsim/memory.hpp"
#include "hvsim/trap.hpp"

namespace hvsim {

enum class AccessType : uint8_t { Read, Write, Execute };

struct XlateFlags {
  bool forced_virt = false;
  bool hlvx = false;
  bool lr = false;
};

/// PTE bit positions.
namespace pte {
constexpr uint64_t kV = 1 << 0;
constexpr uint64_t kR = 1 << 1;
constexpr uint64_t kW = 1 << 2;
constexpr uint64_t kX = 1 << 3;
constexpr uint64_t kU = 1 << 4;
constexpr uint64_t kG = 1 << 5;
constexpr uint64_t kA = 1 << 6;
constexpr uint64_t kD = 1 << 7;
constexpr uint64_t kReserved = field_mask(54, 10);
constexpr unsigned kPpnShift = 10;
constexpr uint64_t kPpnMask = field_mask(0, 44);

constexpr uint64_t ppn(uint64_t raw) { return (raw >> kPpnShift) & kPpnMask; }
constexpr bool is_leaf(uint64_t raw) { return raw & (kR | kW | kX); }
}  // namespace pte

uint64_t page_fault_code(AccessType access);
uint64_t guest_page_fault_code(AccessType access);
uint64_t access_fault_code(AccessType access);

/// Bytes covered by a leaf at `level` (0: 4 KiB, 1: 2 MiB, 2: 1 GiB), minus one.
constexpr uint64_t level_offset_mask(unsigned level) { return (uint64_t{1} << (12 + 9 * level)) - 1; }

/// tinst pseudoinstruction for an implicit VS-stage PTE read.
constexpr uint64_t kTinstPteRead = 0x3000;

/// Everything a translation depends on, captured from the hart.
struct TranslationContext {
  BasePriv priv = BasePriv::M;  ///< Privilege used for the first-stage check.
  bool virt = false;            ///< Two-stage regime.
  uint64_t atp = 0;             ///< satp, or vsatp when virt.
  uint64_t hgatp = 0;
  bool sum = false;
  bool mxr = false;    ///< First-stage MXR.
  bool g_mxr = false;  ///< G-stage MXR (mstatus.MXR).
  bool hlvx = false;

  static TranslationContext from(const Hart& hart, AccessType access, XlateFlags flags = {});

  bool first_stage_bare() const { return priv == BasePriv::M || atp::mode(atp) == atp::kModeBare; }
  bool g_stage_bare() const { return atp::mode(hgatp) == atp::kModeBare; }
  /// No translation at all: physical == virtual.
  bool bare() const { return priv == BasePriv::M || (first_stage_bare() && (!virt || g_stage_bare())); }
};

struct Translation {
  bool ok = false;
  uint64_t pa = 0;
  Trap fault;

  static Translation success(uint64_t pa) { return {true, pa, {}}; }
  static Translation failure(const Trap& trap) { return {false, 0, trap}; }
};

struct TlbEntry {
  bool valid = false;
  bool two_stage = false;
  bool s1_bare = false;
  bool g_bare = false;
  uint16_t asid = 0;
  uint16_t vmid = 0;
  uint64_t vpn = 0;        ///< va >> 12 with bits below `level` cleared.
  unsigned level = 0;      ///< min(vs_level, g_level)
  uint64_t guest_pfn = 0;  ///< First-stage leaf base (gpa >> 12) at vs_level.
  uint64_t host_pfn = 0;   ///< Host base of the region covered by `level`.
  unsigned vs_level = 0;
  unsigned g_level = 0;
  uint8_t vs_perms = 0;
  uint8_t g_perms = 0;

  /// Guest physical address for `va` within this entry.
  uint64_t gpa_of(uint64_t va) const { return (guest_pfn << 12) | (va & level_offset_mask(vs_level)); }
};

/// Direct-mapped translation cache holding single- and two-stage entries.
class Tlb {
 public:
  static constexpr std::size_t kEntries = 64;

  struct Key {
    bool two_stage;
    bool s1_bare;
    bool g_bare;
    uint16_t asid;
    uint16_t vmid;
  };

  const TlbEntry* lookup(const Key& key, uint64_t va);
  void insert(const TlbEntry& entry);

  /// sfence.vma from a non-virtualized context.
  void flush_sfence(std::optional<uint16_t> asid, std::optional<uint64_t> va, uint16_t current_vmid);
  /// hfence.vvma (and sfence.vma executed with V=1).
  void flush_vvma(uint16_t vmid, std::optional<uint16_t> asid, std::optional<uint64_t> va);
  /// hfence.gvma.
  void flush_gvma(std::optional<uint16_t> vmid, std::optional<uint64_t> gpa);
  void flush_all();

  void set_enabled(bool on);
  bool enabled() const { return enabled_; }
  std::size_t valid_count() const;
  const std::array<TlbEntry, kEntries>& entries() const { return entries_; }

  uint64_t hits = 0;
  uint64_t misses = 0;

 private:
  static std::size_t index_of(uint64_t vpn, unsigned level, uint16_t asid, uint16_t vmid);

  std::array<TlbEntry, kEntries> entries_{};
  bool enabled_ = true;
};

class Mmu {
 public:
  explicit Mmu(Bus& bus) : bus_(bus) {}

  Translation translate(const Hart& hart, uint64_t va, AccessType access, XlateFlags flags = {});
  Translation translate(const TranslationContext& ctx, uint64_t va, AccessType access);

  Tlb& tlb() { return tlb_; }
  const Tlb& tlb() const { return tlb_; }

  uint64_t pte_loads() const { return pte_loads_; }
  uint64_t pte_loads_since(uint64_t marker) const { return pte_loads_ - marker; }
  void reset_counters()
  {
    pte_loads_ = 0;
    tlb_.hits = 0;
    tlb_.misses = 0;
  }

  void set_walk_trace(std::ostream* out) { walk_trace_ = out; }

 private:
  struct Leaf {
    uint64_t ppn = 0;  ///< Leaf PPN with the in-page bits of the address merged in.
    unsigned level = 0;
    uint8_t perms = 0;
  };
  struct StageResult {
    bool ok = false;
    Leaf leaf;
    Trap fault;
  };
  enum class Stage : uint8_t { S, VS, G };

  std::optional<uint64_t> load_pte(uint64_t pa, Stage stage, unsigned level);
  StageResult walk_g(const TranslationContext& ctx, uint64_t gpa, AccessType access, bool implicit,
                     uint64_t tval);
  StageResult walk_first(const TranslationContext& ctx, uint64_t va, AccessType access);
  Translation walk_and_fill(const TranslationContext& ctx, uint64_t va, AccessType access,
                            const Tlb::Key& key);

  Bus& bus_;
  Tlb tlb_;
  uint64_t pte_loads_ = 0;
  std::ostream* walk_trace_ = nullptr;
};

/// First-stage leaf permission check (also used by tests). `perms` holds PTE bits 7:0.
bool first_stage_permits(uint8_t perms, AccessType access, const TranslationContext& ctx);
/// G-stage leaf permission check for an explicit or final access.
bool g_stage_permits(uint8_t perms, AccessType access, bool mxr, bool hlvx);

}  // namespace hvsim
