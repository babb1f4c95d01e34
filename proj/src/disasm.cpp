#include <fmt/format.h>

#include "hvsim/csr.hpp"
#include "hvsim/decode.hpp"

namespace hvsim {

namespace {

std::string csr_name(uint16_t address)
{
  if (const CsrSpec* spec = find_csr(address))
    return std::string(spec->name);
  return fmt::format("0x{:03x}", address);
}

}  // namespace

std::string disassemble(const Instruction& in, uint64_t pc)
{
  const std::string_view m = mnemonic(in.op);
  const unsigned rd = in.rd, rs1 = in.rs1, rs2 = in.rs2;
  switch (in.cls()) {
    case InstrClass::Alu:
      switch (in.op) {
        case Op::LUI:
        case Op::AUIPC:
          return fmt::format("{} x{}, 0x{:x}", m, rd, (static_cast<uint64_t>(in.imm) >> 12) & 0xFFFFF);
        default: break;
      }
      if ((in.raw & 0x7F) == 0x13 || (in.raw & 0x7F) == 0x1B)
        return fmt::format("{} x{}, x{}, {}", m, rd, rs1, in.imm);
      return fmt::format("{} x{}, x{}, x{}", m, rd, rs1, rs2);
    case InstrClass::Jump:
      if (in.op == Op::JAL)
        return fmt::format("{} x{}, 0x{:x}", m, rd, pc + in.imm);
      return fmt::format("{} x{}, {}(x{})", m, rd, in.imm, rs1);
    case InstrClass::Branch:
      return fmt::format("{} x{}, x{}, 0x{:x}", m, rs1, rs2, pc + in.imm);
    case InstrClass::Load:
      return fmt::format("{} x{}, {}(x{})", m, rd, in.imm, rs1);
    case InstrClass::Store:
      return fmt::format("{} x{}, {}(x{})", m, rs2, in.imm, rs1);
    case InstrClass::Csr:
      if (in.op == Op::CSRRWI || in.op == Op::CSRRSI || in.op == Op::CSRRCI)
        return fmt::format("{} x{}, {}, {}", m, rd, csr_name(in.csr), rs1);
      return fmt::format("{} x{}, {}, x{}", m, rd, csr_name(in.csr), rs1);
    case InstrClass::Amo:
      if (in.op == Op::LR_W || in.op == Op::LR_D)
        return fmt::format("{} x{}, (x{})", m, rd, rs1);
      return fmt::format("{} x{}, x{}, (x{})", m, rd, rs2, rs1);
    case InstrClass::HLoad:
      return fmt::format("{} x{}, (x{})", m, rd, rs1);
    case InstrClass::HStore:
      return fmt::format("{} x{}, (x{})", m, rs2, rs1);
    case InstrClass::HFence:
    case InstrClass::System:
      return fmt::format("{} x{}, x{}", m, rs1, rs2);
    case InstrClass::FpStub:
      return fmt::format("fp 0x{:08x}", in.raw);
    case InstrClass::Illegal:
      return fmt::format("illegal 0x{:08x}", in.raw);
    default:
      return std::string(m);
  }
}

}  // namespace hvsim
