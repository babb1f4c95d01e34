#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace hvsim::harness {

enum Reg : uint8_t {
  zero, ra, sp, gp, tp, t0, t1, t2, s0, s1, a0, a1, a2, a3, a4, a5, a6, a7,
  s2, s3, s4, s5, s6, s7, s8, s9, s10, s11, t3, t4, t5, t6
};

class AssemblerError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raw instruction encoders.
namespace enc {
uint32_t r_type(uint32_t opcode, unsigned rd, unsigned funct3, unsigned rs1, unsigned rs2, unsigned funct7);
uint32_t i_type(uint32_t opcode, unsigned rd, unsigned funct3, unsigned rs1, int32_t imm);
uint32_t s_type(uint32_t opcode, unsigned funct3, unsigned rs1, unsigned rs2, int32_t imm);
uint32_t b_type(unsigned funct3, unsigned rs1, unsigned rs2, int32_t offset);
uint32_t u_type(uint32_t opcode, unsigned rd, uint32_t imm20);
uint32_t j_type(unsigned rd, int32_t offset);

inline uint32_t addi(unsigned rd, unsigned rs1, int32_t imm) { return i_type(0x13, rd, 0, rs1, imm); }
inline uint32_t lw(unsigned rd, unsigned rs1, int32_t imm) { return i_type(0x03, rd, 2, rs1, imm); }
inline uint32_t ld(unsigned rd, unsigned rs1, int32_t imm) { return i_type(0x03, rd, 3, rs1, imm); }
inline uint32_t sw(unsigned rs2, unsigned rs1, int32_t imm) { return s_type(0x23, 2, rs1, rs2, imm); }
inline uint32_t sd(unsigned rs2, unsigned rs1, int32_t imm) { return s_type(0x23, 3, rs1, rs2, imm); }
inline uint32_t csr(unsigned funct3, unsigned rd, uint16_t address, unsigned rs1)
{
  return i_type(0x73, rd, funct3, rs1, static_cast<int32_t>(address << 20) >> 20);
}
/// Hypervisor load/store: funct7 selects width/kind, `rs2_field` selects the variant.
inline uint32_t hyp(unsigned funct7, unsigned rd, unsigned rs1, unsigned rs2_field)
{
  return r_type(0x73, rd, 4, rs1, rs2_field, funct7);
}
inline uint32_t hlv_w(unsigned rd, unsigned rs1) { return hyp(0x34, rd, rs1, 0); }
inline uint32_t hsv_w(unsigned rs2, unsigned rs1) { return hyp(0x35, 0, rs1, rs2); }

constexpr uint32_t kEcall = 0x00000073;
constexpr uint32_t kEbreak = 0x00100073;
constexpr uint32_t kMret = 0x30200073;
constexpr uint32_t kSret = 0x10200073;
constexpr uint32_t kWfi = 0x10500073;
constexpr uint32_t kNop = 0x00000013;
}  // namespace enc

/// Two-pass assembler over a flat code buffer at a fixed base address.
class Assembler {
 public:
  struct Label {
    std::size_t id;
  };

  explicit Assembler(uint64_t base, uint64_t limit = ~uint64_t{0}) : base_(base), limit_(limit) {}

  uint64_t base() const { return base_; }
  uint64_t here() const { return base_ + 4 * words_.size(); }
  std::size_t size_bytes() const { return 4 * words_.size(); }

  Label new_label();
  void bind(Label label);
  uint64_t address_of(Label label) const;

  void emit(uint32_t raw);

  // RV64I
  void lui(Reg rd, uint32_t imm20) { emit(enc::u_type(0x37, rd, imm20)); }
  void auipc(Reg rd, uint32_t imm20) { emit(enc::u_type(0x17, rd, imm20)); }
  void jal(Reg rd, Label target);
  void jalr(Reg rd, Reg rs1, int32_t imm = 0) { emit(enc::i_type(0x67, rd, 0, rs1, imm)); }
  void j(Label target) { jal(zero, target); }
  void jr(Reg rs1) { jalr(zero, rs1); }
  void beq(Reg rs1, Reg rs2, Label target) { branch(0, rs1, rs2, target); }
  void bne(Reg rs1, Reg rs2, Label target) { branch(1, rs1, rs2, target); }
  void blt(Reg rs1, Reg rs2, Label target) { branch(4, rs1, rs2, target); }
  void bge(Reg rs1, Reg rs2, Label target) { branch(5, rs1, rs2, target); }
  void bltu(Reg rs1, Reg rs2, Label target) { branch(6, rs1, rs2, target); }
  void bgeu(Reg rs1, Reg rs2, Label target) { branch(7, rs1, rs2, target); }

  void lb(Reg rd, Reg rs1, int32_t imm = 0) { emit(enc::i_type(0x03, rd, 0, rs1, imm)); }
  void lh(Reg rd, Reg rs1, int32_t imm = 0) { emit(enc::i_type(0x03, rd, 1, rs1, imm)); }
  void lw(Reg rd, Reg rs1, int32_t imm = 0) { emit(enc::lw(rd, rs1, imm)); }
  void ld(Reg rd, Reg rs1, int32_t imm = 0) { emit(enc::ld(rd, rs1, imm)); }
  void lbu(Reg rd, Reg rs1, int32_t imm = 0) { emit(enc::i_type(0x03, rd, 4, rs1, imm)); }
  void lhu(Reg rd, Reg rs1, int32_t imm = 0) { emit(enc::i_type(0x03, rd, 5, rs1, imm)); }
  void lwu(Reg rd, Reg rs1, int32_t imm = 0) { emit(enc::i_type(0x03, rd, 6, rs1, imm)); }
  void sb(Reg rs2, Reg rs1, int32_t imm = 0) { emit(enc::s_type(0x23, 0, rs1, rs2, imm)); }
  void sh(Reg rs2, Reg rs1, int32_t imm = 0) { emit(enc::s_type(0x23, 1, rs1, rs2, imm)); }
  void sw(Reg rs2, Reg rs1, int32_t imm = 0) { emit(enc::sw(rs2, rs1, imm)); }
  void sd(Reg rs2, Reg rs1, int32_t imm = 0) { emit(enc::sd(rs2, rs1, imm)); }

  void addi(Reg rd, Reg rs1, int32_t imm) { emit(enc::addi(rd, rs1, imm)); }
  void slti(Reg rd, Reg rs1, int32_t imm) { emit(enc::i_type(0x13, rd, 2, rs1, imm)); }
  void sltiu(Reg rd, Reg rs1, int32_t imm) { emit(enc::i_type(0x13, rd, 3, rs1, imm)); }
  void xori(Reg rd, Reg rs1, int32_t imm) { emit(enc::i_type(0x13, rd, 4, rs1, imm)); }
  void ori(Reg rd, Reg rs1, int32_t imm) { emit(enc::i_type(0x13, rd, 6, rs1, imm)); }
  void andi(Reg rd, Reg rs1, int32_t imm) { emit(enc::i_type(0x13, rd, 7, rs1, imm)); }
  void slli(Reg rd, Reg rs1, unsigned shamt) { emit(enc::i_type(0x13, rd, 1, rs1, shamt & 63)); }
  void srli(Reg rd, Reg rs1, unsigned shamt) { emit(enc::i_type(0x13, rd, 5, rs1, shamt & 63)); }
  void srai(Reg rd, Reg rs1, unsigned shamt) { emit(enc::i_type(0x13, rd, 5, rs1, 0x400 | (shamt & 63))); }
  void addiw(Reg rd, Reg rs1, int32_t imm) { emit(enc::i_type(0x1B, rd, 0, rs1, imm)); }

  void add(Reg rd, Reg rs1, Reg rs2) { emit(enc::r_type(0x33, rd, 0, rs1, rs2, 0)); }
  void sub(Reg rd, Reg rs1, Reg rs2) { emit(enc::r_type(0x33, rd, 0, rs1, rs2, 0x20)); }
  void and_(Reg rd, Reg rs1, Reg rs2) { emit(enc::r_type(0x33, rd, 7, rs1, rs2, 0)); }
  void or_(Reg rd, Reg rs1, Reg rs2) { emit(enc::r_type(0x33, rd, 6, rs1, rs2, 0)); }
  void xor_(Reg rd, Reg rs1, Reg rs2) { emit(enc::r_type(0x33, rd, 4, rs1, rs2, 0)); }
  void mul(Reg rd, Reg rs1, Reg rs2) { emit(enc::r_type(0x33, rd, 0, rs1, rs2, 1)); }
  void div(Reg rd, Reg rs1, Reg rs2) { emit(enc::r_type(0x33, rd, 4, rs1, rs2, 1)); }
  void rem(Reg rd, Reg rs1, Reg rs2) { emit(enc::r_type(0x33, rd, 6, rs1, rs2, 1)); }

  void fence() { emit(0x0FF0000F); }

  // Zicsr
  void csrrw(Reg rd, uint16_t csr, Reg rs1) { emit(enc::csr(1, rd, csr, rs1)); }
  void csrrs(Reg rd, uint16_t csr, Reg rs1) { emit(enc::csr(2, rd, csr, rs1)); }
  void csrrc(Reg rd, uint16_t csr, Reg rs1) { emit(enc::csr(3, rd, csr, rs1)); }
  void csrrwi(Reg rd, uint16_t csr, unsigned uimm) { emit(enc::csr(5, rd, csr, uimm & 31)); }
  void csrrsi(Reg rd, uint16_t csr, unsigned uimm) { emit(enc::csr(6, rd, csr, uimm & 31)); }
  void csrrci(Reg rd, uint16_t csr, unsigned uimm) { emit(enc::csr(7, rd, csr, uimm & 31)); }
  void csrr(Reg rd, uint16_t csr) { csrrs(rd, csr, zero); }
  void csrw(uint16_t csr, Reg rs1) { csrrw(zero, csr, rs1); }
  void csrs(uint16_t csr, Reg rs1) { csrrs(zero, csr, rs1); }
  void csrc(uint16_t csr, Reg rs1) { csrrc(zero, csr, rs1); }

  // Privileged
  void ecall() { emit(enc::kEcall); }
  void ebreak() { emit(enc::kEbreak); }
  void mret() { emit(enc::kMret); }
  void sret() { emit(enc::kSret); }
  void wfi() { emit(enc::kWfi); }
  void sfence_vma(Reg rs1 = zero, Reg rs2 = zero) { emit(enc::r_type(0x73, 0, 0, rs1, rs2, 0x09)); }
  void hfence_vvma(Reg rs1 = zero, Reg rs2 = zero) { emit(enc::r_type(0x73, 0, 0, rs1, rs2, 0x11)); }
  void hfence_gvma(Reg rs1 = zero, Reg rs2 = zero) { emit(enc::r_type(0x73, 0, 0, rs1, rs2, 0x31)); }

  // Hypervisor loads and stores
  void hlv_b(Reg rd, Reg rs1) { emit(enc::hyp(0x30, rd, rs1, 0)); }
  void hlv_bu(Reg rd, Reg rs1) { emit(enc::hyp(0x30, rd, rs1, 1)); }
  void hlv_h(Reg rd, Reg rs1) { emit(enc::hyp(0x32, rd, rs1, 0)); }
  void hlv_hu(Reg rd, Reg rs1) { emit(enc::hyp(0x32, rd, rs1, 1)); }
  void hlvx_hu(Reg rd, Reg rs1) { emit(enc::hyp(0x32, rd, rs1, 3)); }
  void hlv_w(Reg rd, Reg rs1) { emit(enc::hlv_w(rd, rs1)); }
  void hlv_wu(Reg rd, Reg rs1) { emit(enc::hyp(0x34, rd, rs1, 1)); }
  void hlvx_wu(Reg rd, Reg rs1) { emit(enc::hyp(0x34, rd, rs1, 3)); }
  void hlv_d(Reg rd, Reg rs1) { emit(enc::hyp(0x36, rd, rs1, 0)); }
  void hsv_b(Reg rs2, Reg rs1) { emit(enc::hyp(0x31, 0, rs1, rs2)); }
  void hsv_h(Reg rs2, Reg rs1) { emit(enc::hyp(0x33, 0, rs1, rs2)); }
  void hsv_w(Reg rs2, Reg rs1) { emit(enc::hsv_w(rs2, rs1)); }
  void hsv_d(Reg rs2, Reg rs1) { emit(enc::hyp(0x37, 0, rs1, rs2)); }

  // A extension
  void lr_w(Reg rd, Reg rs1) { emit(enc::r_type(0x2F, rd, 2, rs1, 0, 0x02 << 2)); }
  void sc_w(Reg rd, Reg rs2, Reg rs1) { emit(enc::r_type(0x2F, rd, 2, rs1, rs2, 0x03 << 2)); }
  void lr_d(Reg rd, Reg rs1) { emit(enc::r_type(0x2F, rd, 3, rs1, 0, 0x02 << 2)); }
  void sc_d(Reg rd, Reg rs2, Reg rs1) { emit(enc::r_type(0x2F, rd, 3, rs1, rs2, 0x03 << 2)); }
  void amoadd_d(Reg rd, Reg rs2, Reg rs1) { emit(enc::r_type(0x2F, rd, 3, rs1, rs2, 0)); }
  void amoswap_w(Reg rd, Reg rs2, Reg rs1) { emit(enc::r_type(0x2F, rd, 2, rs1, rs2, 0x01 << 2)); }

  // Pseudoinstructions
  void nop() { emit(enc::kNop); }
  void li(Reg rd, uint64_t value);
  void la(Reg rd, Label target);
  void mv(Reg rd, Reg rs) { addi(rd, rs, 0); }

  /// Resolved little-endian image. Throws on unbound labels or out-of-range offsets.
  std::vector<uint8_t> bytes() const;
  std::vector<uint32_t> words() const;

 private:
  enum class FixupKind : uint8_t { Branch, Jal, AuipcAddi };
  struct Fixup {
    std::size_t index;
    Label label;
    FixupKind kind;
  };

  void branch(unsigned funct3, Reg rs1, Reg rs2, Label target);

  uint64_t base_;
  uint64_t limit_;
  std::vector<uint32_t> words_;
  std::vector<std::optional<uint64_t>> labels_;
  std::vector<Fixup> fixups_;
};

}  // namespace hvsim::harness
