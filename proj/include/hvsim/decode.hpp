#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace hvsim {

enum class InstrClass : uint8_t {
  Alu, Load, Store, Branch, Jump, Csr, System, Amo, HLoad, HStore, HFence,
  Fence, Wfi, Mret, Sret, Ecall, Ebreak, FpStub, Illegal
};

// clang-format off
#define HVSIM_OPS(X) \
  X(LUI, "lui", Alu) X(AUIPC, "auipc", Alu) X(JAL, "jal", Jump) X(JALR, "jalr", Jump) \
  X(BEQ, "beq", Branch) X(BNE, "bne", Branch) X(BLT, "blt", Branch) X(BGE, "bge", Branch) \
  X(BLTU, "bltu", Branch) X(BGEU, "bgeu", Branch) \
  X(LB, "lb", Load) X(LH, "lh", Load) X(LW, "lw", Load) X(LD, "ld", Load) \
  X(LBU, "lbu", Load) X(LHU, "lhu", Load) X(LWU, "lwu", Load) \
  X(SB, "sb", Store) X(SH, "sh", Store) X(SW, "sw", Store) X(SD, "sd", Store) \
  X(ADDI, "addi", Alu) X(SLTI, "slti", Alu) X(SLTIU, "sltiu", Alu) X(XORI, "xori", Alu) \
  X(ORI, "ori", Alu) X(ANDI, "andi", Alu) X(SLLI, "slli", Alu) X(SRLI, "srli", Alu) X(SRAI, "srai", Alu) \
  X(ADD, "add", Alu) X(SUB, "sub", Alu) X(SLL, "sll", Alu) X(SLT, "slt", Alu) X(SLTU, "sltu", Alu) \
  X(XOR, "xor", Alu) X(SRL, "srl", Alu) X(SRA, "sra", Alu) X(OR, "or", Alu) X(AND, "and", Alu) \
  X(ADDIW, "addiw", Alu) X(SLLIW, "slliw", Alu) X(SRLIW, "srliw", Alu) X(SRAIW, "sraiw", Alu) \
  X(ADDW, "addw", Alu) X(SUBW, "subw", Alu) X(SLLW, "sllw", Alu) X(SRLW, "srlw", Alu) X(SRAW, "sraw", Alu) \
  X(MUL, "mul", Alu) X(MULH, "mulh", Alu) X(MULHSU, "mulhsu", Alu) X(MULHU, "mulhu", Alu) \
  X(DIV, "div", Alu) X(DIVU, "divu", Alu) X(REM, "rem", Alu) X(REMU, "remu", Alu) \
  X(MULW, "mulw", Alu) X(DIVW, "divw", Alu) X(DIVUW, "divuw", Alu) X(REMW, "remw", Alu) X(REMUW, "remuw", Alu) \
  X(FENCE, "fence", Fence) X(FENCE_I, "fence.i", Fence) \
  X(ECALL, "ecall", Ecall) X(EBREAK, "ebreak", Ebreak) X(MRET, "mret", Mret) X(SRET, "sret", Sret) \
  X(WFI, "wfi", Wfi) X(SFENCE_VMA, "sfence.vma", System) \
  X(HFENCE_VVMA, "hfence.vvma", HFence) X(HFENCE_GVMA, "hfence.gvma", HFence) \
  X(CSRRW, "csrrw", Csr) X(CSRRS, "csrrs", Csr) X(CSRRC, "csrrc", Csr) \
  X(CSRRWI, "csrrwi", Csr) X(CSRRSI, "csrrsi", Csr) X(CSRRCI, "csrrci", Csr) \
  X(LR_W, "lr.w", Amo) X(SC_W, "sc.w", Amo) X(AMOSWAP_W, "amoswap.w", Amo) X(AMOADD_W, "amoadd.w", Amo) \
  X(AMOXOR_W, "amoxor.w", Amo) X(AMOAND_W, "amoand.w", Amo) X(AMOOR_W, "amoor.w", Amo) \
  X(AMOMIN_W, "amomin.w", Amo) X(AMOMAX_W, "amomax.w", Amo) X(AMOMINU_W, "amominu.w", Amo) X(AMOMAXU_W, "amomaxu.w", Amo) \
  X(LR_D, "lr.d", Amo) X(SC_D, "sc.d", Amo) X(AMOSWAP_D, "amoswap.d", Amo) X(AMOADD_D, "amoadd.d", Amo) \
  X(AMOXOR_D, "amoxor.d", Amo) X(AMOAND_D, "amoand.d", Amo) X(AMOOR_D, "amoor.d", Amo) \
  X(AMOMIN_D, "amomin.d", Amo) X(AMOMAX_D, "amomax.d", Amo) X(AMOMINU_D, "amominu.d", Amo) X(AMOMAXU_D, "amomaxu.d", Amo) \
  X(HLV_B, "hlv.b", HLoad) X(HLV_BU, "hlv.bu", HLoad) X(HLV_H, "hlv.h", HLoad) X(HLV_HU, "hlv.hu", HLoad) \
  X(HLVX_HU, "hlvx.hu", HLoad) X(HLV_W, "hlv.w", HLoad) X(HLV_WU, "hlv.wu", HLoad) X(HLVX_WU, "hlvx.wu", HLoad) \
  X(HLV_D, "hlv.d", HLoad) \
  X(HSV_B, "hsv.b", HStore) X(HSV_H, "hsv.h", HStore) X(HSV_W, "hsv.w", HStore) X(HSV_D, "hsv.d", HStore) \
  X(FP, "fp", FpStub) X(ILLEGAL, "illegal", Illegal)
// clang-format on

enum class Op : uint8_t {
#define HVSIM_ENUM(id, name, cls) id,
  HVSIM_OPS(HVSIM_ENUM)
#undef HVSIM_ENUM
};

struct Instruction {
  uint32_t raw = 0;
  Op op = Op::ILLEGAL;
  uint8_t rd = 0;
  uint8_t rs1 = 0;
  uint8_t rs2 = 0;
  int64_t imm = 0;
  uint16_t csr = 0;

  InstrClass cls() const;
};

/// Total decoder: unknown encodings yield Op::ILLEGAL.
Instruction decode(uint32_t raw);

std::string_view mnemonic(Op op);
InstrClass class_of(Op op);
std::string_view to_string(InstrClass cls);

/// Width in bytes of a memory access performed by `op`, 0 for non-memory ops.
unsigned access_width(Op op);

/// Textual form, e.g. "addi x1, x0, 5". `pc` resolves branch targets.
std::string disassemble(const Instruction& in, uint64_t pc);

}  // namespace hvsim
