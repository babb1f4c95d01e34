#pragma once

#include <cstdint>
#include <memory>
#include <optional>

#include "hvsim/harness/assembler.hpp"
#include "hvsim/harness/page_table_builder.hpp"
#include "hvsim/machine.hpp"

namespace hvsim::harness {

/// Physical layout shared by all built-in test programs.
namespace layout {
constexpr uint64_t kExit = kDefaultExitAddr;
constexpr uint64_t kCode = 0x8000'2000;
constexpr uint64_t kCodeLimit = 0x8001'0000;
constexpr uint64_t kData = 0x8004'0000;              ///< Host scratch pages.
constexpr uint64_t kHostTables = 0x8010'0000;        ///< Host-side page-table pool.
constexpr uint64_t kHostTablesSize = 0x10'0000;
constexpr uint64_t kGuestTablesGpa = 0x4020'0000;    ///< VS-stage table pool (guest physical).
constexpr uint64_t kGuestTablesHost = 0x8020'0000;   ///< Its host backing.
constexpr uint64_t kGuestTablesPages = 64;
constexpr uint64_t kGuestData = 0x4000'0000;         ///< Guest data pages (guest physical).
constexpr uint64_t kGuestDataHost = 0x8030'0000;     ///< Host backing for guest data.
constexpr uint64_t kIdentityGiga = 0x8000'0000;      ///< Identity-mapped gigapage.
}  // namespace layout

/// Status / trap-record registers written by the standard handlers.
namespace record {
constexpr Reg kLevel = s1;  ///< 3 = M handler, 2 = HS handler, 1 = VS handler
constexpr Reg kCause = s2;
constexpr Reg kTval = s3;
constexpr Reg kTval2 = s4;  ///< mtval2 / htval (0 in VS)
constexpr Reg kTinst = s5;  ///< mtinst / htinst (0 in VS)
constexpr Reg kStatus = s6; ///< mstatus / hstatus / vsstatus
constexpr Reg kEpc = s7;
constexpr Reg kCount = s8;  ///< Number of traps recorded.
}  // namespace record

constexpr uint64_t kLevelM = 3;
constexpr uint64_t kLevelHS = 2;
constexpr uint64_t kLevelVS = 1;

/// One test program: code assembler, page-table builders and the machine it runs on.
///
/// Standard handlers record the trap into the `record` registers, then jump
/// to the continuation held in the level's scratch register (clearing it), or
/// write PASS to the exit device when no continuation is armed.
class Scenario {
 public:
  Scenario();

  Assembler as;

  Machine& machine() { return *machine_; }
  PhysicalMemory& memory() { return machine_->bus().ram(); }

  /// Sv39x4 G-stage tables with the identity gigapage and guest table pool mapped.
  PageTableBuilder& g();
  uint64_t g_root();
  /// Sv39 VS-stage tables in guest physical space with the identity gigapage mapped.
  PageTableBuilder& vs();
  uint64_t vs_root();
  /// Sv39 single-stage tables for HS/U with the identity gigapage mapped.
  PageTableBuilder& host();
  uint64_t host_root();

  Assembler::Label m_handler;
  Assembler::Label hs_handler;
  Assembler::Label vs_handler;

  /// Installs trap vectors. Call first.
  void prologue();
  /// From M: mret into `mode` at `target`. Clobbers t0.
  void enter(Mode mode, Assembler::Label target);
  /// Arms the continuation for the next trap handled at `level`'s handler. Clobbers t0.
  void arm(TrapTarget level, Assembler::Label continuation);
  /// Writes PASS (or a failure code) to the exit device. Clobbers t5, t6.
  void exit_pass();
  void exit_fail(uint64_t code);
  /// Emits the standard handlers. Call once, after the test body.
  void handlers();

  RunResult run(uint64_t max_steps = 200'000);
  uint64_t reg(Reg r) const { return machine_->hart().x[r]; }
  uint64_t csr(uint16_t address) const { return machine_->hart().csrs.peek(address); }

 private:
  void emit_handler(uint64_t level, uint16_t cause, uint16_t tval, std::optional<uint16_t> tval2,
                    std::optional<uint16_t> tinst, uint16_t status, uint16_t epc, uint16_t scratch);

  std::unique_ptr<Machine> machine_;
  std::unique_ptr<PageTableBuilder> g_;
  std::unique_ptr<PageTableBuilder> vs_;
  std::unique_ptr<PageTableBuilder> host_;
  uint64_t g_root_ = 0;
  uint64_t vs_root_ = 0;
  uint64_t host_root_ = 0;
};

}  // namespace hvsim::harness
