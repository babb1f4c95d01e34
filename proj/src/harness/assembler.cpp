#include "hvsim/harness/assembler.hpp"

#include <fmt/format.h>

#include "hvsim/bits.hpp"

namespace hvsim::harness {

namespace enc {

uint32_t r_type(uint32_t opcode, unsigned rd, unsigned funct3, unsigned rs1, unsigned rs2, unsigned funct7)
{
  return opcode | ((rd & 31) << 7) | ((funct3 & 7) << 12) | ((rs1 & 31) << 15) | ((rs2 & 31) << 20)
         | ((funct7 & 0x7F) << 25);
}

uint32_t i_type(uint32_t opcode, unsigned rd, unsigned funct3, unsigned rs1, int32_t imm)
{
  return opcode | ((rd & 31) << 7) | ((funct3 & 7) << 12) | ((rs1 & 31) << 15)
         | ((static_cast<uint32_t>(imm) & 0xFFF) << 20);
}

uint32_t s_type(uint32_t opcode, unsigned funct3, unsigned rs1, unsigned rs2, int32_t imm)
{
  const auto u = static_cast<uint32_t>(imm);
  return opcode | ((u & 0x1F) << 7) | ((funct3 & 7) << 12) | ((rs1 & 31) << 15) | ((rs2 & 31) << 20)
         | (((u >> 5) & 0x7F) << 25);
}

uint32_t b_type(unsigned funct3, unsigned rs1, unsigned rs2, int32_t offset)
{
  const auto u = static_cast<uint32_t>(offset);
  return 0x63 | (((u >> 11) & 1) << 7) | (((u >> 1) & 0xF) << 8) | ((funct3 & 7) << 12) | ((rs1 & 31) << 15)
         | ((rs2 & 31) << 20) | (((u >> 5) & 0x3F) << 25) | (((u >> 12) & 1) << 31);
}

uint32_t u_type(uint32_t opcode, unsigned rd, uint32_t imm20) { return opcode | ((rd & 31) << 7) | (imm20 << 12); }

uint32_t j_type(unsigned rd, int32_t offset)
{
  const auto u = static_cast<uint32_t>(offset);
  return 0x6F | ((rd & 31) << 7) | (((u >> 12) & 0xFF) << 12) | (((u >> 11) & 1) << 20)
         | (((u >> 1) & 0x3FF) << 21) | (((u >> 20) & 1) << 31);
}

}  // namespace enc

Assembler::Label Assembler::new_label()
{
  labels_.emplace_back();
  return Label{labels_.size() - 1};
}

void Assembler::bind(Label label)
{
  if (labels_.at(label.id))
    throw AssemblerError(fmt::format("label {} bound twice", label.id));
  labels_[label.id] = here();
}

uint64_t Assembler::address_of(Label label) const
{
  const auto& addr = labels_.at(label.id);
  if (!addr)
    throw AssemblerError(fmt::format("label {} is not bound", label.id));
  return *addr;
}

void Assembler::emit(uint32_t raw)
{
  if (here() + 4 > limit_)
    throw AssemblerError(fmt::format("code overflows limit 0x{:x}", limit_));
  words_.push_back(raw);
}

void Assembler::branch(unsigned funct3, Reg rs1, Reg rs2, Label target)
{
  fixups_.push_back({words_.size(), target, FixupKind::Branch});
  emit(enc::b_type(funct3, rs1, rs2, 0));
}

void Assembler::jal(Reg rd, Label target)
{
  fixups_.push_back({words_.size(), target, FixupKind::Jal});
  emit(enc::j_type(rd, 0));
}

void Assembler::la(Reg rd, Label target)
{
  fixups_.push_back({words_.size(), target, FixupKind::AuipcAddi});
  auipc(rd, 0);
  addi(rd, rd, 0);
}

void Assembler::li(Reg rd, uint64_t value)
{
  const auto v = static_cast<int64_t>(value);
  if (v >= INT32_MIN && v <= INT32_MAX) {
    const int64_t lo = sign_extend(value & 0xFFF, 12);
    const auto hi = static_cast<uint32_t>(((v - lo) >> 12) & 0xFFFFF);
    if (hi != 0) {
      lui(rd, hi);
      if (lo != 0)
        addiw(rd, rd, static_cast<int32_t>(lo));
    } else {
      addi(rd, zero, static_cast<int32_t>(lo));
    }
    return;
  }
  const int64_t lo = sign_extend(value & 0xFFF, 12);
  int64_t hi = (v - lo) >> 12;
  unsigned shift = 12;
  while ((hi & 1) == 0) {
    hi >>= 1;
    ++shift;
  }
  li(rd, static_cast<uint64_t>(hi));
  slli(rd, rd, shift);
  if (lo != 0)
    addi(rd, rd, static_cast<int32_t>(lo));
}

std::vector<uint32_t> Assembler::words() const
{
  std::vector<uint32_t> out = words_;
  for (const Fixup& f : fixups_) {
    const uint64_t at = base_ + 4 * f.index;
    const auto offset = static_cast<int64_t>(address_of(f.label) - at);
    switch (f.kind) {
      case FixupKind::Branch:
        if (offset < -4096 || offset > 4094)
          throw AssemblerError(fmt::format("branch at 0x{:x} out of range", at));
        out[f.index] |= enc::b_type(0, 0, 0, static_cast<int32_t>(offset));
        break;
      case FixupKind::Jal:
        if (offset < -(1 << 20) || offset >= (1 << 20))
          throw AssemblerError(fmt::format("jal at 0x{:x} out of range", at));
        out[f.index] |= enc::j_type(0, static_cast<int32_t>(offset));
        break;
      case FixupKind::AuipcAddi: {
        const int64_t lo = sign_extend(static_cast<uint64_t>(offset) & 0xFFF, 12);
        const auto hi = static_cast<uint32_t>(((offset - lo) >> 12) & 0xFFFFF);
        out[f.index] |= hi << 12;
        out[f.index + 1] |= (static_cast<uint32_t>(lo) & 0xFFF) << 20;
        break;
      }
    }
  }
  return out;
}

std::vector<uint8_t> Assembler::bytes() const
{
  std::vector<uint8_t> out;
  out.reserve(4 * words_.size());
  for (uint32_t w : words()) {
    for (int i = 0; i < 4; ++i)
      out.push_back(static_cast<uint8_t>(w >> (8 * i)));
  }
  return out;
}

}  // namespace hvsim::harness
