#include "hvsim/decode.hpp"

#include "hvsim/bits.hpp"

namespace hvsim {

namespace {

constexpr std::string_view kNames[] = {
#define HVSIM_NAME(id, name, cls) name,
    HVSIM_OPS(HVSIM_NAME)
#undef HVSIM_NAME
};

constexpr InstrClass kClasses[] = {
#define HVSIM_CLASS(id, name, cls) InstrClass::cls,
    HVSIM_OPS(HVSIM_CLASS)
#undef HVSIM_CLASS
};

int64_t imm_i(uint32_t raw) { return sign_extend(raw >> 20, 12); }
int64_t imm_s(uint32_t raw) { return sign_extend(((raw >> 25) << 5) | ((raw >> 7) & 0x1F), 12); }
int64_t imm_b(uint32_t raw)
{
  const uint64_t v = (get_bits(raw, 31, 1) << 12) | (get_bits(raw, 7, 1) << 11) | (get_bits(raw, 25, 6) << 5)
                     | (get_bits(raw, 8, 4) << 1);
  return sign_extend(v, 13);
}
int64_t imm_u(uint32_t raw) { return sign_extend(raw & 0xFFFFF000u, 32); }
int64_t imm_j(uint32_t raw)
{
  const uint64_t v = (get_bits(raw, 31, 1) << 20) | (get_bits(raw, 12, 8) << 12) | (get_bits(raw, 20, 1) << 11)
                     | (get_bits(raw, 21, 10) << 1);
  return sign_extend(v, 21);
}

Op decode_system(uint32_t raw, unsigned funct3, unsigned rd)
{
  const unsigned funct7 = raw >> 25;
  const unsigned rs2 = (raw >> 20) & 0x1F;
  switch (funct3) {
    case 0:
      switch (raw) {
        case 0x00000073: return Op::ECALL;
        case 0x00100073: return Op::EBREAK;
        case 0x30200073: return Op::MRET;
        case 0x10200073: return Op::SRET;
        case 0x10500073: return Op::WFI;
        default: break;
      }
      if (rd != 0)
        return Op::ILLEGAL;
      if (funct7 == 0x09)
        return Op::SFENCE_VMA;
      if (funct7 == 0x11)
        return Op::HFENCE_VVMA;
      if (funct7 == 0x31)
        return Op::HFENCE_GVMA;
      return Op::ILLEGAL;
    case 1: return Op::CSRRW;
    case 2: return Op::CSRRS;
    case 3: return Op::CSRRC;
    case 4:
      switch (funct7) {
        case 0x30: return rs2 == 0 ? Op::HLV_B : rs2 == 1 ? Op::HLV_BU : Op::ILLEGAL;
        case 0x32: return rs2 == 0 ? Op::HLV_H : rs2 == 1 ? Op::HLV_HU : rs2 == 3 ? Op::HLVX_HU : Op::ILLEGAL;
        case 0x34: return rs2 == 0 ? Op::HLV_W : rs2 == 1 ? Op::HLV_WU : rs2 == 3 ? Op::HLVX_WU : Op::ILLEGAL;
        case 0x36: return rs2 == 0 ? Op::HLV_D : Op::ILLEGAL;
        case 0x31: return rd == 0 ? Op::HSV_B : Op::ILLEGAL;
        case 0x33: return rd == 0 ? Op::HSV_H : Op::ILLEGAL;
        case 0x35: return rd == 0 ? Op::HSV_W : Op::ILLEGAL;
        case 0x37: return rd == 0 ? Op::HSV_D : Op::ILLEGAL;
        default: return Op::ILLEGAL;
      }
    case 5: return Op::CSRRWI;
    case 6: return Op::CSRRSI;
    case 7: return Op::CSRRCI;
  }
  return Op::ILLEGAL;
}

Op decode_amo(uint32_t raw, unsigned funct3)
{
  if (funct3 != 2 && funct3 != 3)
    return Op::ILLEGAL;
  const bool dword = funct3 == 3;
  const unsigned funct5 = raw >> 27;
  switch (funct5) {
    case 0x02: return ((raw >> 20) & 0x1F) ? Op::ILLEGAL : dword ? Op::LR_D : Op::LR_W;
    case 0x03: return dword ? Op::SC_D : Op::SC_W;
    case 0x01: return dword ? Op::AMOSWAP_D : Op::AMOSWAP_W;
    case 0x00: return dword ? Op::AMOADD_D : Op::AMOADD_W;
    case 0x04: return dword ? Op::AMOXOR_D : Op::AMOXOR_W;
    case 0x0C: return dword ? Op::AMOAND_D : Op::AMOAND_W;
    case 0x08: return dword ? Op::AMOOR_D : Op::AMOOR_W;
    case 0x10: return dword ? Op::AMOMIN_D : Op::AMOMIN_W;
    case 0x14: return dword ? Op::AMOMAX_D : Op::AMOMAX_W;
    case 0x18: return dword ? Op::AMOMINU_D : Op::AMOMINU_W;
    case 0x1C: return dword ? Op::AMOMAXU_D : Op::AMOMAXU_W;
    default: return Op::ILLEGAL;
  }
}

Op decode_op(unsigned funct3, unsigned funct7)
{
  if (funct7 == 0x01) {
    constexpr Op m[] = {Op::MUL, Op::MULH, Op::MULHSU, Op::MULHU, Op::DIV, Op::DIVU, Op::REM, Op::REMU};
    return m[funct3];
  }
  if (funct7 == 0x20) {
    if (funct3 == 0)
      return Op::SUB;
    if (funct3 == 5)
      return Op::SRA;
    return Op::ILLEGAL;
  }
  if (funct7 != 0)
    return Op::ILLEGAL;
  constexpr Op base[] = {Op::ADD, Op::SLL, Op::SLT, Op::SLTU, Op::XOR, Op::SRL, Op::OR, Op::AND};
  return base[funct3];
}

Op decode_op32(unsigned funct3, unsigned funct7)
{
  if (funct7 == 0x01) {
    switch (funct3) {
      case 0: return Op::MULW;
      case 4: return Op::DIVW;
      case 5: return Op::DIVUW;
      case 6: return Op::REMW;
      case 7: return Op::REMUW;
      default: return Op::ILLEGAL;
    }
  }
  if (funct7 == 0x20) {
    if (funct3 == 0)
      return Op::SUBW;
    if (funct3 == 5)
      return Op::SRAW;
    return Op::ILLEGAL;
  }
  if (funct7 != 0)
    return Op::ILLEGAL;
  switch (funct3) {
    case 0: return Op::ADDW;
    case 1: return Op::SLLW;
    case 5: return Op::SRLW;
    default: return Op::ILLEGAL;
  }
}

}  // namespace

InstrClass Instruction::cls() const { return class_of(op); }

std::string_view mnemonic(Op op) { return kNames[static_cast<std::size_t>(op)]; }
InstrClass class_of(Op op) { return kClasses[static_cast<std::size_t>(op)]; }

std::string_view to_string(InstrClass cls)
{
  switch (cls) {
    case InstrClass::Alu: return "ALU";
    case InstrClass::Load: return "Load";
    case InstrClass::Store: return "Store";
    case InstrClass::Branch: return "Branch";
    case InstrClass::Jump: return "Jump";
    case InstrClass::Csr: return "Csr";
    case InstrClass::System: return "System";
    case InstrClass::Amo: return "Amo";
    case InstrClass::HLoad: return "HLoad";
    case InstrClass::HStore: return "HStore";
    case InstrClass::HFence: return "HFence";
    case InstrClass::Fence: return "Fence";
    case InstrClass::Wfi: return "Wfi";
    case InstrClass::Mret: return "Mret";
    case InstrClass::Sret: return "Sret";
    case InstrClass::Ecall: return "Ecall";
    case InstrClass::Ebreak: return "Ebreak";
    case InstrClass::FpStub: return "FpStub";
    case InstrClass::Illegal: return "Illegal";
  }
  return "?";
}

unsigned access_width(Op op)
{
  switch (op) {
    case Op::LB: case Op::LBU: case Op::SB: case Op::HLV_B: case Op::HLV_BU: case Op::HSV_B:
      return 1;
    case Op::LH: case Op::LHU: case Op::SH: case Op::HLV_H: case Op::HLV_HU: case Op::HLVX_HU: case Op::HSV_H:
      return 2;
    case Op::LW: case Op::LWU: case Op::SW: case Op::HLV_W: case Op::HLV_WU: case Op::HLVX_WU: case Op::HSV_W:
    case Op::LR_W: case Op::SC_W: case Op::AMOSWAP_W: case Op::AMOADD_W: case Op::AMOXOR_W: case Op::AMOAND_W:
    case Op::AMOOR_W: case Op::AMOMIN_W: case Op::AMOMAX_W: case Op::AMOMINU_W: case Op::AMOMAXU_W:
      return 4;
    case Op::LD: case Op::SD: case Op::HLV_D: case Op::HSV_D:
    case Op::LR_D: case Op::SC_D: case Op::AMOSWAP_D: case Op::AMOADD_D: case Op::AMOXOR_D: case Op::AMOAND_D:
    case Op::AMOOR_D: case Op::AMOMIN_D: case Op::AMOMAX_D: case Op::AMOMINU_D: case Op::AMOMAXU_D:
      return 8;
    default:
      return 0;
  }
}

Instruction decode(uint32_t raw)
{
  Instruction in;
  in.raw = raw;
  in.rd = (raw >> 7) & 0x1F;
  in.rs1 = (raw >> 15) & 0x1F;
  in.rs2 = (raw >> 20) & 0x1F;
  const unsigned funct3 = (raw >> 12) & 7;
  const unsigned funct7 = raw >> 25;

  if ((raw & 3) != 3)
    return in;

  switch (raw & 0x7F) {
    case 0x37: in.op = Op::LUI; in.imm = imm_u(raw); break;
    case 0x17: in.op = Op::AUIPC; in.imm = imm_u(raw); break;
    case 0x6F: in.op = Op::JAL; in.imm = imm_j(raw); break;
    case 0x67:
      if (funct3 == 0) {
        in.op = Op::JALR;
        in.imm = imm_i(raw);
      }
      break;
    case 0x63: {
      constexpr Op ops[] = {Op::BEQ, Op::BNE, Op::ILLEGAL, Op::ILLEGAL, Op::BLT, Op::BGE, Op::BLTU, Op::BGEU};
      in.op = ops[funct3];
      in.imm = imm_b(raw);
      break;
    }
    case 0x03: {
      constexpr Op ops[] = {Op::LB, Op::LH, Op::LW, Op::LD, Op::LBU, Op::LHU, Op::LWU, Op::ILLEGAL};
      in.op = ops[funct3];
      in.imm = imm_i(raw);
      break;
    }
    case 0x23: {
      constexpr Op ops[] = {Op::SB, Op::SH, Op::SW, Op::SD};
      if (funct3 < 4)
        in.op = ops[funct3];
      in.imm = imm_s(raw);
      break;
    }
    case 0x13:
      in.imm = imm_i(raw);
      switch (funct3) {
        case 0: in.op = Op::ADDI; break;
        case 2: in.op = Op::SLTI; break;
        case 3: in.op = Op::SLTIU; break;
        case 4: in.op = Op::XORI; break;
        case 6: in.op = Op::ORI; break;
        case 7: in.op = Op::ANDI; break;
        case 1:
          if ((raw >> 26) == 0) {
            in.op = Op::SLLI;
            in.imm = (raw >> 20) & 0x3F;
          }
          break;
        case 5:
          if ((raw >> 26) == 0 || (raw >> 26) == 0x10) {
            in.op = (raw >> 26) ? Op::SRAI : Op::SRLI;
            in.imm = (raw >> 20) & 0x3F;
          }
          break;
      }
      break;
    case 0x1B:
      in.imm = imm_i(raw);
      if (funct3 == 0) {
        in.op = Op::ADDIW;
      } else if (funct3 == 1 && funct7 == 0) {
        in.op = Op::SLLIW;
        in.imm = in.rs2;
      } else if (funct3 == 5 && (funct7 == 0 || funct7 == 0x20)) {
        in.op = funct7 ? Op::SRAIW : Op::SRLIW;
        in.imm = in.rs2;
      }
      break;
    case 0x33: in.op = decode_op(funct3, funct7); break;
    case 0x3B: in.op = decode_op32(funct3, funct7); break;
    case 0x0F:
      if (funct3 == 0)
        in.op = Op::FENCE;
      else if (funct3 == 1)
        in.op = Op::FENCE_I;
      break;
    case 0x73:
      in.op = decode_system(raw, funct3, in.rd);
      in.csr = static_cast<uint16_t>(raw >> 20);
      if (funct3 >= 5)
        in.imm = in.rs1;
      break;
    case 0x2F: in.op = decode_amo(raw, funct3); break;
    case 0x07: case 0x27: case 0x43: case 0x47: case 0x4B: case 0x4F: case 0x53:
      in.op = Op::FP;
      break;
    default: break;
  }
  return in;
}

}  // namespace hvsim
