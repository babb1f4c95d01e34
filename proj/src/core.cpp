#include <ostream>

#include <fmt/format.h>

#include "hvsim/machine.hpp"

namespace hvsim {

namespace {

Trap illegal(const Instruction& in) { return Trap::exception(exc::kIllegalInstruction, in.raw); }
Trap virtual_instruction(const Instruction& in) { return Trap::exception(exc::kVirtualInstruction, in.raw); }

Trap fault_for(CsrStatus st, const Instruction& in)
{
  return st == CsrStatus::VirtualInstruction ? virtual_instruction(in) : illegal(in);
}

/// Instruction encoding reported in tinst for an explicit access that
/// guest-page-faults: the address-offset and rs1 fields are cleared.
uint64_t transformed_instruction(const Instruction& in)
{
  uint32_t raw = in.raw & ~(0x1Fu << 15);
  switch (in.cls()) {
    case InstrClass::Load: raw &= ~(0xFFFu << 20); break;
    case InstrClass::Store: raw &= ~((0x7Fu << 25) | (0x1Fu << 7)); break;
    default: break;
  }
  return raw;
}

uint64_t ecall_code(Mode mode)
{
  switch (mode) {
    case Mode::U:
    case Mode::VU: return exc::kEcallU;
    case Mode::HS: return exc::kEcallHS;
    case Mode::VS: return exc::kEcallVS;
    case Mode::M: return exc::kEcallM;
  }
  return exc::kEcallM;
}

uint64_t sext32(uint64_t v) { return static_cast<uint64_t>(sign_extend(v, 32)); }

uint64_t alu(Op op, uint64_t a, uint64_t b)
{
  const auto sa = static_cast<int64_t>(a);
  const auto sb = static_cast<int64_t>(b);
  const auto a32 = static_cast<int32_t>(a);
  const auto b32 = static_cast<int32_t>(b);
  const auto ua32 = static_cast<uint32_t>(a);
  const auto ub32 = static_cast<uint32_t>(b);
  switch (op) {
    case Op::ADD: case Op::ADDI: return a + b;
    case Op::SUB: return a - b;
    case Op::SLL: case Op::SLLI: return a << (b & 63);
    case Op::SLT: case Op::SLTI: return sa < sb;
    case Op::SLTU: case Op::SLTIU: return a < b;
    case Op::XOR: case Op::XORI: return a ^ b;
    case Op::SRL: case Op::SRLI: return a >> (b & 63);
    case Op::SRA: case Op::SRAI: return static_cast<uint64_t>(sa >> (b & 63));
    case Op::OR: case Op::ORI: return a | b;
    case Op::AND: case Op::ANDI: return a & b;
    case Op::ADDW: case Op::ADDIW: return sext32(a + b);
    case Op::SUBW: return sext32(a - b);
    case Op::SLLW: case Op::SLLIW: return sext32(ua32 << (b & 31));
    case Op::SRLW: case Op::SRLIW: return sext32(ua32 >> (b & 31));
    case Op::SRAW: case Op::SRAIW: return static_cast<uint64_t>(static_cast<int64_t>(a32 >> (b & 31)));
    case Op::MUL: return a * b;
    case Op::MULH: return static_cast<uint64_t>((static_cast<__int128>(sa) * sb) >> 64);
    case Op::MULHSU:
      return static_cast<uint64_t>((static_cast<__int128>(sa) * static_cast<__int128>(static_cast<unsigned __int128>(b))) >> 64);
    case Op::MULHU: return static_cast<uint64_t>((static_cast<unsigned __int128>(a) * b) >> 64);
    case Op::DIV:
      if (b == 0) return ~uint64_t{0};
      if (sa == INT64_MIN && sb == -1) return a;
      return static_cast<uint64_t>(sa / sb);
    case Op::DIVU: return b == 0 ? ~uint64_t{0} : a / b;
    case Op::REM:
      if (b == 0) return a;
      if (sa == INT64_MIN && sb == -1) return 0;
      return static_cast<uint64_t>(sa % sb);
    case Op::REMU: return b == 0 ? a : a % b;
    case Op::MULW: return sext32(static_cast<uint64_t>(a32) * static_cast<uint64_t>(b32));
    case Op::DIVW:
      if (b32 == 0) return ~uint64_t{0};
      if (a32 == INT32_MIN && b32 == -1) return sext32(ua32);
      return sext32(static_cast<uint64_t>(static_cast<int64_t>(a32 / b32)));
    case Op::DIVUW: return ub32 == 0 ? ~uint64_t{0} : sext32(ua32 / ub32);
    case Op::REMW:
      if (b32 == 0) return sext32(ua32);
      if (a32 == INT32_MIN && b32 == -1) return 0;
      return sext32(static_cast<uint64_t>(static_cast<int64_t>(a32 % b32)));
    case Op::REMUW: return ub32 == 0 ? sext32(ua32) : sext32(ua32 % ub32);
    default: return 0;
  }
}

uint64_t amo_result(Op op, uint64_t old, uint64_t src, unsigned width)
{
  const bool word = width == 4;
  const auto so = word ? sign_extend(old, 32) : static_cast<int64_t>(old);
  const auto ss = word ? sign_extend(src, 32) : static_cast<int64_t>(src);
  const uint64_t uo = word ? (old & 0xFFFFFFFF) : old;
  const uint64_t us = word ? (src & 0xFFFFFFFF) : src;
  switch (op) {
    case Op::AMOSWAP_W: case Op::AMOSWAP_D: return src;
    case Op::AMOADD_W: case Op::AMOADD_D: return old + src;
    case Op::AMOXOR_W: case Op::AMOXOR_D: return old ^ src;
    case Op::AMOAND_W: case Op::AMOAND_D: return old & src;
    case Op::AMOOR_W: case Op::AMOOR_D: return old | src;
    case Op::AMOMIN_W: case Op::AMOMIN_D: return so < ss ? old : src;
    case Op::AMOMAX_W: case Op::AMOMAX_D: return so > ss ? old : src;
    case Op::AMOMINU_W: case Op::AMOMINU_D: return uo < us ? old : src;
    case Op::AMOMAXU_W: case Op::AMOMAXU_D: return uo > us ? old : src;
    default: return src;
  }
}

std::string_view fp_gate_name(FpGate gate)
{
  switch (gate) {
    case FpGate::Mstatus: return "mstatus";
    case FpGate::Vsstatus: return "vsstatus";
    case FpGate::Unimplemented: return "unimplemented";
    case FpGate::None: break;
  }
  return "none";
}

}  // namespace

std::optional<Trap> Machine::fetch(uint32_t& raw)
{
  const uint64_t pc = hart_.pc;
  const auto ctx = TranslationContext::from(hart_, AccessType::Execute);
  if (pc & 3) {
    Trap t = Trap::exception(exc::kInstrMisaligned, pc);
    t.gva = ctx.virt && !ctx.bare();
    return t;
  }
  const Translation tr = mmu_.translate(ctx, pc, AccessType::Execute);
  if (!tr.ok)
    return tr.fault;
  auto word = bus_.load_ram(tr.pa, 4);
  if (!word) {
    Trap t = Trap::exception(exc::kInstrAccess, pc);
    t.gva = ctx.virt;
    return t;
  }
  raw = static_cast<uint32_t>(*word);
  return std::nullopt;
}

std::optional<Trap> Machine::load(const Instruction& in, uint64_t va, unsigned len, uint64_t& value,
                                  XlateFlags flags)
{
  const auto ctx = TranslationContext::from(hart_, AccessType::Read, flags);
  if (va & (len - 1)) {
    Trap t = Trap::exception(exc::kLoadMisaligned, va);
    t.gva = ctx.virt;
    return t;
  }
  Translation tr = mmu_.translate(ctx, va, AccessType::Read);
  if (!tr.ok) {
    if (exc::is_guest_page_fault(tr.fault.cause.code) && tr.fault.tinst == 0)
      tr.fault.tinst = transformed_instruction(in);
    return tr.fault;
  }
  auto v = bus_.load(tr.pa, len);
  if (!v) {
    Trap t = Trap::exception(exc::kLoadAccess, va);
    t.gva = ctx.virt;
    return t;
  }
  value = *v;
  if (flags.lr)
    hart_.reservation = tr.pa;
  return std::nullopt;
}

std::optional<Trap> Machine::store(const Instruction& in, uint64_t va, unsigned len, uint64_t value,
                                   XlateFlags flags)
{
  const auto ctx = TranslationContext::from(hart_, AccessType::Write, flags);
  if (va & (len - 1)) {
    Trap t = Trap::exception(exc::kStoreMisaligned, va);
    t.gva = ctx.virt;
    return t;
  }
  Translation tr = mmu_.translate(ctx, va, AccessType::Write);
  if (!tr.ok) {
    if (exc::is_guest_page_fault(tr.fault.cause.code) && tr.fault.tinst == 0)
      tr.fault.tinst = transformed_instruction(in);
    return tr.fault;
  }
  if (!bus_.store(tr.pa, len, value)) {
    Trap t = Trap::exception(exc::kStoreAccess, va);
    t.gva = ctx.virt;
    return t;
  }
  return std::nullopt;
}

std::optional<Trap> Machine::amo(const Instruction& in, uint64_t va)
{
  const unsigned len = access_width(in.op);
  const bool lr = in.op == Op::LR_W || in.op == Op::LR_D;
  const bool sc = in.op == Op::SC_W || in.op == Op::SC_D;
  auto finish = [&](uint64_t v) { return len == 4 ? sext32(v) : v; };

  if (lr) {
    uint64_t v = 0;
    if (auto t = load(in, va, len, v, {.lr = true}))
      return t;
    hart_.x.write(in.rd, finish(v));
    return std::nullopt;
  }

  const auto ctx = TranslationContext::from(hart_, AccessType::Write);
  if (va & (len - 1)) {
    Trap t = Trap::exception(exc::kStoreMisaligned, va);
    t.gva = ctx.virt;
    return t;
  }
  Translation tr = mmu_.translate(ctx, va, AccessType::Write);
  if (!tr.ok) {
    if (exc::is_guest_page_fault(tr.fault.cause.code) && tr.fault.tinst == 0)
      tr.fault.tinst = transformed_instruction(in);
    return tr.fault;
  }
  auto access_fault = [&] {
    Trap t = Trap::exception(exc::kStoreAccess, va);
    t.gva = ctx.virt;
    return t;
  };

  if (sc) {
    const bool matched = hart_.reservation && *hart_.reservation == tr.pa;
    hart_.reservation.reset();
    if (matched && !bus_.store(tr.pa, len, hart_.x[in.rs2]))
      return access_fault();
    hart_.x.write(in.rd, matched ? 0 : 1);
    return std::nullopt;
  }

  auto old = bus_.load(tr.pa, len);
  if (!old)
    return access_fault();
  const uint64_t old_value = finish(*old);
  if (!bus_.store(tr.pa, len, amo_result(in.op, old_value, hart_.x[in.rs2], len)))
    return access_fault();
  hart_.x.write(in.rd, old_value);
  return std::nullopt;
}

std::optional<Trap> Machine::exec_csr(const Instruction& in)
{
  const bool imm_form = in.op == Op::CSRRWI || in.op == Op::CSRRSI || in.op == Op::CSRRCI;
  const uint64_t src = imm_form ? in.rs1 : hart_.x[in.rs1];
  const bool is_swap = in.op == Op::CSRRW || in.op == Op::CSRRWI;
  const bool writes = is_swap || in.rs1 != 0;

  const ResolvedCsr r = hart_.csrs.resolve(in.csr, hart_.priv, writes);
  if (!r.ok())
    return fault_for(r.status, in);
  const uint64_t old = hart_.csrs.peek(r.spec->address);
  if (writes) {
    uint64_t next = src;
    if (in.op == Op::CSRRS || in.op == Op::CSRRSI)
      next = old | src;
    else if (in.op == Op::CSRRC || in.op == Op::CSRRCI)
      next = old & ~src;
    hart_.csrs.poke(r.spec->address, next);
  }
  hart_.x.write(in.rd, old);
  return std::nullopt;
}

std::optional<Trap> Machine::exec_hypervisor_memory(const Instruction& in)
{
  if (hart_.virt())
    return virtual_instruction(in);
  if (hart_.priv.base() == BasePriv::U && !(hart_.csrs.hstatus() & hstatus::kHU))
    return illegal(in);

  const uint64_t va = hart_.x[in.rs1];
  const unsigned len = access_width(in.op);
  if (in.cls() == InstrClass::HStore)
    return store(in, va, len, hart_.x[in.rs2], {.forced_virt = true});

  const bool hlvx = in.op == Op::HLVX_HU || in.op == Op::HLVX_WU;
  uint64_t v = 0;
  if (auto t = load(in, va, len, v, {.forced_virt = true, .hlvx = hlvx}))
    return t;
  switch (in.op) {
    case Op::HLV_B: v = static_cast<uint64_t>(sign_extend(v, 8)); break;
    case Op::HLV_H: v = static_cast<uint64_t>(sign_extend(v, 16)); break;
    case Op::HLV_W: v = sext32(v); break;
    default: break;
  }
  hart_.x.write(in.rd, v);
  return std::nullopt;
}

std::optional<Trap> Machine::exec_system(const Instruction& in, uint64_t& next_pc, bool& wait)
{
  const BasePriv base = hart_.priv.base();
  const bool virt = hart_.virt();
  const uint64_t mstatus = hart_.csrs.mstatus();
  const uint64_t hstatus = hart_.csrs.hstatus();

  switch (in.op) {
    case Op::ECALL: return Trap::exception(ecall_code(hart_.mode()));
    case Op::EBREAK: return Trap::exception(exc::kBreakpoint, hart_.pc);
    case Op::MRET:
    case Op::SRET:
      if (auto code = trap_return(hart_, in.op == Op::MRET ? ReturnKind::Mret : ReturnKind::Sret))
        return Trap::exception(*code, in.raw);
      next_pc = hart_.pc;
      return std::nullopt;
    case Op::WFI:
      if (base == BasePriv::M) {
        wait = true;
      } else if (mstatus & status::kTW) {
        return illegal(in);
      } else if (virt) {
        if (base == BasePriv::U || (hstatus & hstatus::kVTW))
          return virtual_instruction(in);
        wait = true;
      } else if (base == BasePriv::U) {
        return illegal(in);
      } else {
        wait = true;
      }
      return std::nullopt;
    case Op::SFENCE_VMA: {
      const uint16_t vmid = static_cast<uint16_t>(atp::vmid(hart_.csrs.cell(Cell::Hgatp)));
      std::optional<uint64_t> va;
      std::optional<uint16_t> asid;
      if (in.rs1)
        va = hart_.x[in.rs1];
      if (in.rs2)
        asid = static_cast<uint16_t>(hart_.x[in.rs2]);
      if (virt) {
        if (base == BasePriv::U || (hstatus & hstatus::kVTVM))
          return virtual_instruction(in);
        mmu_.tlb().flush_vvma(vmid, asid, va);
      } else {
        if (base == BasePriv::U || (base == BasePriv::S && (mstatus & status::kTVM)))
          return illegal(in);
        mmu_.tlb().flush_sfence(asid, va, vmid);
      }
      return std::nullopt;
    }
    case Op::HFENCE_VVMA:
    case Op::HFENCE_GVMA: {
      if (virt)
        return virtual_instruction(in);
      if (base == BasePriv::U)
        return illegal(in);
      if (in.op == Op::HFENCE_GVMA) {
        if (base == BasePriv::S && (mstatus & status::kTVM))
          return illegal(in);
        std::optional<uint16_t> vmid;
        std::optional<uint64_t> gpa;
        if (in.rs1)
          gpa = hart_.x[in.rs1] << 2;
        if (in.rs2)
          vmid = static_cast<uint16_t>(hart_.x[in.rs2] & 0x3FFF);
        mmu_.tlb().flush_gvma(vmid, gpa);
      } else {
        std::optional<uint64_t> va;
        std::optional<uint16_t> asid;
        if (in.rs1)
          va = hart_.x[in.rs1];
        if (in.rs2)
          asid = static_cast<uint16_t>(hart_.x[in.rs2]);
        mmu_.tlb().flush_vvma(static_cast<uint16_t>(atp::vmid(hart_.csrs.cell(Cell::Hgatp))), asid, va);
      }
      return std::nullopt;
    }
    default: return illegal(in);
  }
}

std::optional<Trap> Machine::execute(const Instruction& in, uint64_t& next_pc, bool& wait)
{
  RegisterFile& x = hart_.x;
  const uint64_t pc = hart_.pc;
  const uint64_t a = x[in.rs1];
  const uint64_t b = x[in.rs2];
  const auto imm = static_cast<uint64_t>(in.imm);

  auto jump_to = [&](uint64_t target) -> std::optional<Trap> {
    if (target & 3)
      return Trap::exception(exc::kInstrMisaligned, target);
    next_pc = target;
    return std::nullopt;
  };

  switch (in.cls()) {
    case InstrClass::Alu:
      switch (in.op) {
        case Op::LUI: x.write(in.rd, imm); break;
        case Op::AUIPC: x.write(in.rd, pc + imm); break;
        default: {
          const bool uses_imm = (in.raw & 0x7F) == 0x13 || (in.raw & 0x7F) == 0x1B;
          x.write(in.rd, alu(in.op, a, uses_imm ? imm : b));
        }
      }
      return std::nullopt;
    case InstrClass::Jump: {
      const uint64_t target = in.op == Op::JAL ? pc + imm : (a + imm) & ~uint64_t{1};
      if (auto t = jump_to(target))
        return t;
      x.write(in.rd, pc + 4);
      return std::nullopt;
    }
    case InstrClass::Branch: {
      bool taken = false;
      switch (in.op) {
        case Op::BEQ: taken = a == b; break;
        case Op::BNE: taken = a != b; break;
        case Op::BLT: taken = static_cast<int64_t>(a) < static_cast<int64_t>(b); break;
        case Op::BGE: taken = static_cast<int64_t>(a) >= static_cast<int64_t>(b); break;
        case Op::BLTU: taken = a < b; break;
        case Op::BGEU: taken = a >= b; break;
        default: break;
      }
      return taken ? jump_to(pc + imm) : std::nullopt;
    }
    case InstrClass::Load: {
      const unsigned len = access_width(in.op);
      uint64_t v = 0;
      if (auto t = load(in, a + imm, len, v, {}))
        return t;
      switch (in.op) {
        case Op::LB: v = static_cast<uint64_t>(sign_extend(v, 8)); break;
        case Op::LH: v = static_cast<uint64_t>(sign_extend(v, 16)); break;
        case Op::LW: v = sext32(v); break;
        default: break;
      }
      x.write(in.rd, v);
      return std::nullopt;
    }
    case InstrClass::Store: return store(in, a + imm, access_width(in.op), b, {});
    case InstrClass::Amo: return amo(in, a);
    case InstrClass::Csr: return exec_csr(in);
    case InstrClass::HLoad:
    case InstrClass::HStore: return exec_hypervisor_memory(in);
    case InstrClass::Fence: return std::nullopt;
    case InstrClass::System:
    case InstrClass::HFence:
    case InstrClass::Wfi:
    case InstrClass::Mret:
    case InstrClass::Sret:
    case InstrClass::Ecall:
    case InstrClass::Ebreak: return exec_system(in, next_pc, wait);
    case InstrClass::FpStub: {
      FpGate gate = FpGate::Unimplemented;
      if ((hart_.csrs.mstatus() & status::kFS) == 0)
        gate = FpGate::Mstatus;
      else if (hart_.virt() && (hart_.csrs.vsstatus() & status::kFS) == 0)
        gate = FpGate::Vsstatus;
      hart_.last_fp_gate = gate;
      if (trace_)
        *trace_ << fmt::format("FPGATE gate={} pc=0x{:016x}\n", fp_gate_name(gate), pc);
      return illegal(in);
    }
    case InstrClass::Illegal: return illegal(in);
  }
  return illegal(in);
}

StepOutcome Machine::trap(const Trap& t)
{
  const TrapRecord rec = take_trap(hart_, t);
  if (t.cause.interrupt) {
    ++stats_.interrupts_by_target[index_of(rec.target)];
  } else {
    ++stats_.exceptions_by_target[index_of(rec.target)];
    if (exc::is_guest_page_fault(t.cause.code))
      ++stats_.guest_page_faults;
  }
  trap_log_.push_back(rec);
  if (trace_) {
    *trace_ << fmt::format("TRAP mode={} int={} code={} tval=0x{:016x} tval2=0x{:016x} tinst=0x{:016x} "
                           "epc=0x{:016x}\n",
                           to_string(rec.target), t.cause.interrupt ? 1 : 0, rec.presented_code, t.tval, t.tval2,
                           t.tinst, rec.epc);
  }
  return {StepKind::Trapped, rec};
}

StepOutcome Machine::step()
{
  if (auto irq = check_interrupts(hart_))
    return trap(*irq);
  if (hart_.halted) {
    if ((hart_.csrs.mip() & hart_.csrs.mie()) == 0)
      return {StepKind::Waiting, std::nullopt};
    hart_.halted = false;
  }

  uint32_t raw = 0;
  if (auto t = fetch(raw))
    return trap(*t);

  const Instruction in = decode(raw);
  const Mode mode = hart_.mode();
  const uint64_t pc = hart_.pc;
  uint64_t next_pc = pc + 4;
  bool wait = false;
  if (auto t = execute(in, next_pc, wait))
    return trap(*t);

  hart_.pc = next_pc;
  ++stats_.instret_by_mode[index_of(mode)];
  CsrFile& c = hart_.csrs;
  c.set_cell(Cell::Mcycle, c.cell(Cell::Mcycle) + 1);
  c.set_cell(Cell::Minstret, c.cell(Cell::Minstret) + 1);
  if (trace_)
    *trace_ << fmt::format("EXEC pc=0x{:016x} raw=0x{:08x} mode={}\n", pc, raw, to_string(mode));
  if (wait && (c.mip() & c.mie()) == 0) {
    hart_.halted = true;
    return {StepKind::Waiting, std::nullopt};
  }
  return {StepKind::Retired, std::nullopt};
}

}  // namespace hvsim
