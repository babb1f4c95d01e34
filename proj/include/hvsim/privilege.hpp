#pragma once

#include <cstdint>
#include <string_view>

namespace hvsim {

/// Base privilege encoding as stored in mstatus.MPP / sstatus.SPP.
enum class BasePriv : uint8_t { U = 0, S = 1, M = 3 };

/// Effective execution mode once the virtualization bit is taken into account.
enum class Mode : uint8_t { M, HS, VS, U, VU };

/// Level a trap is taken to.
enum class TrapTarget : uint8_t { M, HS, VS };

/// Legalizes a 2-bit privilege field; the reserved encoding 2 maps to U.
constexpr BasePriv legalize_priv(uint64_t field)
{
  switch (field & 3) {
    case 1: return BasePriv::S;
    case 3: return BasePriv::M;
    default: return BasePriv::U;
  }
}

/// A (base, V) pair. M mode is never virtualized: constructing (M, true)
/// yields (M, false).
class PrivilegeLevel {
 public:
  constexpr PrivilegeLevel() = default;
  constexpr PrivilegeLevel(BasePriv base, bool virt)
      : base_(base), virt_(virt && base != BasePriv::M) {}

  static constexpr PrivilegeLevel machine() { return {BasePriv::M, false}; }
  static constexpr PrivilegeLevel hs() { return {BasePriv::S, false}; }
  static constexpr PrivilegeLevel vs() { return {BasePriv::S, true}; }
  static constexpr PrivilegeLevel user() { return {BasePriv::U, false}; }
  static constexpr PrivilegeLevel vu() { return {BasePriv::U, true}; }

  constexpr BasePriv base() const { return base_; }
  constexpr bool virt() const { return virt_; }

  friend constexpr bool operator==(PrivilegeLevel, PrivilegeLevel) = default;

 private:
  BasePriv base_ = BasePriv::M;
  bool virt_ = false;
};

constexpr Mode effective_mode(PrivilegeLevel priv)
{
  switch (priv.base()) {
    case BasePriv::M: return Mode::M;
    case BasePriv::S: return priv.virt() ? Mode::VS : Mode::HS;
    case BasePriv::U: return priv.virt() ? Mode::VU : Mode::U;
  }
  return Mode::M;
}

constexpr PrivilegeLevel level_of(Mode mode)
{
  switch (mode) {
    case Mode::M: return PrivilegeLevel::machine();
    case Mode::HS: return PrivilegeLevel::hs();
    case Mode::VS: return PrivilegeLevel::vs();
    case Mode::U: return PrivilegeLevel::user();
    case Mode::VU: return PrivilegeLevel::vu();
  }
  return PrivilegeLevel::machine();
}

/// Numeric rank used for CSR privilege checks: U/VU=0, VS=1, HS=2, M=3.
constexpr unsigned csr_rank(PrivilegeLevel priv)
{
  switch (priv.base()) {
    case BasePriv::M: return 3;
    case BasePriv::S: return priv.virt() ? 1 : 2;
    case BasePriv::U: return 0;
  }
  return 0;
}

constexpr std::string_view to_string(Mode mode)
{
  switch (mode) {
    case Mode::M: return "M";
    case Mode::HS: return "HS";
    case Mode::VS: return "VS";
    case Mode::U: return "U";
    case Mode::VU: return "VU";
  }
  return "?";
}

constexpr std::string_view to_string(TrapTarget target)
{
  switch (target) {
    case TrapTarget::M: return "M";
    case TrapTarget::HS: return "HS";
    case TrapTarget::VS: return "VS";
  }
  return "?";
}

constexpr unsigned index_of(Mode mode) { return static_cast<unsigned>(mode); }
constexpr unsigned index_of(TrapTarget target) { return static_cast<unsigned>(target); }

}  // namespace hvsim
