#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hvsim/decode.hpp"
#include "hvsim/hart.hpp"
#include "hvsim/memory.hpp"
#include "hvsim/mmu.hpp"
#include "hvsim/stats.hpp"
#include "hvsim/trap.hpp"

namespace hvsim {

constexpr uint64_t kDefaultMaxSteps = 10'000'000;

struct MachineConfig {
  uint64_t mem_base = kDefaultMemBase;
  uint64_t mem_size = kDefaultMemSize;
  uint64_t exit_addr = kDefaultExitAddr;
};

enum class StepKind : uint8_t { Retired, Trapped, Waiting };

struct StepOutcome {
  StepKind kind = StepKind::Retired;
  std::optional<TrapRecord> trap;
};

enum class RunStatus : uint8_t { Pass, Fail, StepLimit, WaitingForever };

struct RunResult {
  RunStatus status = RunStatus::StepLimit;
  uint64_t fail_code = 0;
  uint64_t steps = 0;

  friend bool operator==(const RunResult&, const RunResult&) = default;
};

std::string_view to_string(RunStatus status);

class Machine {
 public:
  explicit Machine(const MachineConfig& config = {});
  Machine(const Machine&) = delete;
  Machine& operator=(const Machine&) = delete;

  /// Resets the hart to M mode at `entry_pc`; memory contents are kept.
  void reset(uint64_t entry_pc);

  void load_image(std::span<const uint8_t> bytes, uint64_t addr) { bus_.load_image(bytes, addr); }
  void load_image_file(const std::filesystem::path& path, uint64_t addr) { bus_.load_image_file(path, addr); }

  /// One tick: interrupt check, then fetch/execute of at most one instruction.
  StepOutcome step();
  RunResult run(uint64_t max_steps = kDefaultMaxSteps);

  Hart& hart() { return hart_; }
  const Hart& hart() const { return hart_; }
  Bus& bus() { return bus_; }
  const Bus& bus() const { return bus_; }
  Mmu& mmu() { return mmu_; }
  const Mmu& mmu() const { return mmu_; }

  Stats stats() const;
  const std::vector<TrapRecord>& trap_log() const { return trap_log_; }
  const MachineConfig& config() const { return config_; }

  void set_trace(std::ostream* out) { trace_ = out; }
  void set_walk_trace(std::ostream* out) { mmu_.set_walk_trace(out); }

  /// `PC=`, `X1..X31=`, then one line per CSR in table order.
  std::string dump_state() const;

 private:
  std::optional<Trap> execute(const Instruction& in, uint64_t& next_pc, bool& wait);
  std::optional<Trap> fetch(uint32_t& raw);
  std::optional<Trap> load(const Instruction& in, uint64_t va, unsigned len, uint64_t& value, XlateFlags flags);
  std::optional<Trap> store(const Instruction& in, uint64_t va, unsigned len, uint64_t value, XlateFlags flags);
  std::optional<Trap> amo(const Instruction& in, uint64_t va);
  std::optional<Trap> exec_csr(const Instruction& in);
  std::optional<Trap> exec_system(const Instruction& in, uint64_t& next_pc, bool& wait);
  std::optional<Trap> exec_hypervisor_memory(const Instruction& in);
  StepOutcome trap(const Trap& t);

  MachineConfig config_;
  Bus bus_;
  Hart hart_;
  Mmu mmu_;
  Stats stats_;
  std::vector<TrapRecord> trap_log_;
  std::ostream* trace_ = nullptr;
};

}  // namespace hvsim
