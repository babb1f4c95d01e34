#include "hvsim/machine.hpp"

#include <cctype>

#include <fmt/format.h>

namespace hvsim {

std::string_view to_string(RunStatus status)
{
  switch (status) {
    case RunStatus::Pass: return "pass";
    case RunStatus::Fail: return "fail";
    case RunStatus::StepLimit: return "step-limit";
    case RunStatus::WaitingForever: return "waiting-forever";
  }
  return "?";
}

Machine::Machine(const MachineConfig& config)
    : config_(config), bus_(config.mem_base, config.mem_size, config.exit_addr), mmu_(bus_)
{
  reset(config.mem_base);
}

void Machine::reset(uint64_t entry_pc)
{
  hart_.reset(entry_pc);
  bus_.exit_device().reset();
  mmu_.tlb().flush_all();
  mmu_.reset_counters();
  stats_ = {};
  trap_log_.clear();
}

Stats Machine::stats() const
{
  Stats s = stats_;
  s.pte_loads = mmu_.pte_loads();
  s.tlb_hits = mmu_.tlb().hits;
  s.tlb_misses = mmu_.tlb().misses;
  return s;
}

RunResult Machine::run(uint64_t max_steps)
{
  RunResult result;
  auto finished = [&] {
    if (const auto& st = bus_.exit_device().status) {
      result.status = st->pass ? RunStatus::Pass : RunStatus::Fail;
      result.fail_code = st->code;
      return true;
    }
    return false;
  };
  while (result.steps < max_steps) {
    if (finished())
      return result;
    // A halted hart with nothing pending has no way to make progress.
    if (hart_.halted && (hart_.csrs.mip() & hart_.csrs.mie()) == 0) {
      result.status = RunStatus::WaitingForever;
      return result;
    }
    step();
    ++result.steps;
  }
  if (!finished())
    result.status = RunStatus::StepLimit;
  return result;
}

std::string Machine::dump_state() const
{
  std::string out = fmt::format("PC=0x{:016x}\n", hart_.pc);
  for (unsigned i = 1; i < 32; ++i)
    out += fmt::format("X{}=0x{:016x}\n", i, hart_.x[i]);
  for (const CsrSpec& spec : csr_specs()) {
    std::string name(spec.name);
    for (char& ch : name)
      ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
    out += fmt::format("{}=0x{:016x}\n", name, hart_.csrs.peek(spec.address));
  }
  return out;
}

}  // namespace hvsim
