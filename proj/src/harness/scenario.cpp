#include "hvsim/harness/scenario.hpp"

namespace hvsim::harness {

Scenario::Scenario()
    : as(layout::kCode, layout::kCodeLimit), m_handler(as.new_label()), hs_handler(as.new_label()),
      vs_handler(as.new_label()), machine_(std::make_unique<Machine>())
{
}

PageTableBuilder& Scenario::g()
{
  if (!g_) {
    g_ = std::make_unique<PageTableBuilder>(memory(), layout::kHostTables, layout::kHostTablesSize / 2,
                                            PagingFormat::Sv39x4);
    g_root_ = g_->new_root();
    g_->map(g_root_, layout::kIdentityGiga, layout::kIdentityGiga, 2, perm::kRWX | perm::kU);
    g_->map_range(g_root_, layout::kGuestTablesGpa, layout::kGuestTablesHost, layout::kGuestTablesPages,
                  perm::kRW | perm::kU);
  }
  return *g_;
}

uint64_t Scenario::g_root()
{
  g();
  return g_root_;
}

PageTableBuilder& Scenario::vs()
{
  if (!vs_) {
    vs_ = std::make_unique<PageTableBuilder>(
        memory(), layout::kGuestTablesGpa, layout::kGuestTablesPages * 0x1000, PagingFormat::Sv39,
        [](uint64_t gpa) { return gpa - layout::kGuestTablesGpa + layout::kGuestTablesHost; });
    vs_root_ = vs_->new_root();
    vs_->map(vs_root_, layout::kIdentityGiga, layout::kIdentityGiga, 2, perm::kRWX);
  }
  return *vs_;
}

uint64_t Scenario::vs_root()
{
  vs();
  return vs_root_;
}

PageTableBuilder& Scenario::host()
{
  if (!host_) {
    host_ = std::make_unique<PageTableBuilder>(memory(), layout::kHostTables + layout::kHostTablesSize / 2,
                                               layout::kHostTablesSize / 2, PagingFormat::Sv39);
    host_root_ = host_->new_root();
    host_->map(host_root_, layout::kIdentityGiga, layout::kIdentityGiga, 2, perm::kRWX);
  }
  return *host_;
}

uint64_t Scenario::host_root()
{
  host();
  return host_root_;
}

void Scenario::prologue()
{
  as.la(t0, m_handler);
  as.csrw(csr::kMtvec, t0);
  as.la(t0, hs_handler);
  as.csrw(csr::kStvec, t0);
  as.la(t0, vs_handler);
  as.csrw(csr::kVstvec, t0);
}

void Scenario::enter(Mode mode, Assembler::Label target)
{
  const PrivilegeLevel level = level_of(mode);
  as.li(t0, status::kMPP | status::kMPV);
  as.csrc(csr::kMstatus, t0);
  const uint64_t bits = (static_cast<uint64_t>(level.base()) << status::kMppShift)
                        | (level.virt() ? status::kMPV : 0);
  if (bits) {
    as.li(t0, bits);
    as.csrs(csr::kMstatus, t0);
  }
  as.la(t0, target);
  as.csrw(csr::kMepc, t0);
  as.mret();
}

void Scenario::arm(TrapTarget level, Assembler::Label continuation)
{
  as.la(t0, continuation);
  switch (level) {
    case TrapTarget::M: as.csrw(csr::kMscratch, t0); break;
    case TrapTarget::HS: as.csrw(csr::kSscratch, t0); break;
    case TrapTarget::VS: as.csrw(csr::kVsscratch, t0); break;
  }
}

void Scenario::exit_pass()
{
  as.li(t6, layout::kExit);
  as.li(t5, 1);
  as.sd(t5, t6);
  auto spin = as.new_label();
  as.bind(spin);
  as.j(spin);
}

void Scenario::exit_fail(uint64_t code)
{
  as.li(t6, layout::kExit);
  as.li(t5, code * 2 + 1);
  as.sd(t5, t6);
  auto spin = as.new_label();
  as.bind(spin);
  as.j(spin);
}

void Scenario::emit_handler(uint64_t level, uint16_t cause, uint16_t tval, std::optional<uint16_t> tval2,
                            std::optional<uint16_t> tinst, uint16_t status_csr, uint16_t epc, uint16_t scratch)
{
  as.li(record::kLevel, level);
  as.csrr(record::kCause, cause);
  as.csrr(record::kTval, tval);
  if (tval2)
    as.csrr(record::kTval2, *tval2);
  else
    as.li(record::kTval2, 0);
  if (tinst)
    as.csrr(record::kTinst, *tinst);
  else
    as.li(record::kTinst, 0);
  as.csrr(record::kStatus, status_csr);
  as.csrr(record::kEpc, epc);
  as.addi(record::kCount, record::kCount, 1);
  auto done = as.new_label();
  as.csrr(t6, scratch);
  as.beq(t6, zero, done);
  as.csrw(scratch, zero);
  as.jr(t6);
  as.bind(done);
  exit_pass();
}

void Scenario::handlers()
{
  as.bind(m_handler);
  emit_handler(kLevelM, csr::kMcause, csr::kMtval, csr::kMtval2, csr::kMtinst, csr::kMstatus, csr::kMepc,
               csr::kMscratch);
  as.bind(hs_handler);
  emit_handler(kLevelHS, csr::kScause, csr::kStval, csr::kHtval, csr::kHtinst, csr::kHstatus, csr::kSepc,
               csr::kSscratch);
  as.bind(vs_handler);
  // Running with V=1, the supervisor addresses are redirected to the vs* registers.
  emit_handler(kLevelVS, csr::kScause, csr::kStval, std::nullopt, std::nullopt, csr::kSstatus, csr::kSepc,
               csr::kSscratch);
}

RunResult Scenario::run(uint64_t max_steps)
{
  const auto image = as.bytes();
  machine_->load_image(image, as.base());
  machine_->reset(as.base());
  return machine_->run(max_steps);
}

}  // namespace hvsim::harness
