#include <functional>

#include "suite_util.hpp"

namespace hvsim::harness {

namespace {

/// Runs `setup` in M, then executes `raw` in `mode`. Virtual-instruction
/// faults go to HS, illegal instructions to M.
CaseResult trap_on(std::string name, Mode mode, uint32_t raw, uint64_t level, uint64_t cause,
                   const std::function<void(Scenario&)>& setup = {})
{
  CaseResult c(std::move(name));
  Scenario sc;
  auto start = sc.as.new_label();
  sc.prologue();
  set_csr(sc, csr::kMedeleg, bit(exc::kVirtualInstruction));
  if (setup)
    setup(sc);
  sc.enter(mode, start);
  sc.as.bind(start);
  sc.as.emit(raw);
  sc.exit_fail(1);
  sc.handlers();
  c.expect_pass(sc.run());
  expect_trap(c, sc, {.level = level, .cause = cause, .tval = raw}, Provenance::Specification);
  c.expect("epc", sc.as.address_of(start), sc.reg(record::kEpc), Provenance::Specification);
  return c;
}

uint32_t csrr(uint16_t address) { return enc::csr(2, a0, address, 0); }

constexpr uint64_t kVirtual = exc::kVirtualInstruction;
constexpr uint64_t kIllegal = exc::kIllegalInstruction;

}  // namespace

std::vector<CaseResult> virtual_instruction_cases()
{
  const auto vtsr = [](Scenario& sc) { or_csr(sc, csr::kHstatus, hstatus::kVTSR); };
  const auto vtvm = [](Scenario& sc) { or_csr(sc, csr::kHstatus, hstatus::kVTVM); };
  const auto counters = [](Scenario& sc) {
    set_csr(sc, csr::kMcounteren, 0x5);
    set_csr(sc, csr::kHcounteren, 0);
  };
  return {
      trap_on("vs_reads_hstatus", Mode::VS, csrr(csr::kHstatus), kLevelHS, kVirtual),
      trap_on("vs_writes_hgatp", Mode::VS, enc::csr(1, 0, csr::kHgatp, a0), kLevelHS, kVirtual),
      trap_on("vu_reads_sstatus", Mode::VU, csrr(csr::kSstatus), kLevelHS, kVirtual),
      trap_on("vs_hlv", Mode::VS, enc::hlv_w(a0, a1), kLevelHS, kVirtual),
      trap_on("vu_hsv", Mode::VU, enc::hsv_w(a0, a1), kLevelHS, kVirtual),
      trap_on("vs_sret_vtsr", Mode::VS, enc::kSret, kLevelHS, kVirtual, vtsr),
      trap_on("vu_sret", Mode::VU, enc::kSret, kLevelHS, kVirtual),
      trap_on("vs_sfence_vtvm", Mode::VS, enc::r_type(0x73, 0, 0, 0, 0, 0x09), kLevelHS, kVirtual, vtvm),
      trap_on("vs_satp_vtvm", Mode::VS, csrr(csr::kSatp), kLevelHS, kVirtual, vtvm),
      trap_on("vs_cycle_hcounteren", Mode::VS, csrr(csr::kCycle), kLevelHS, kVirtual, counters),
      trap_on("vs_hfence_gvma", Mode::VS, enc::r_type(0x73, 0, 0, 0, 0, 0x31), kLevelHS, kVirtual),
      trap_on("vs_reads_mstatus_illegal", Mode::VS, csrr(csr::kMstatus), kLevelM, kIllegal),
      trap_on("u_reads_sstatus_illegal", Mode::U, csrr(csr::kSstatus), kLevelM, kIllegal),
      trap_on("vs_cycle_mcounteren_illegal", Mode::VS, csrr(csr::kCycle), kLevelM, kIllegal,
              [](Scenario& sc) { set_csr(sc, csr::kMcounteren, 0); }),
  };
}

}  // namespace hvsim::harness
