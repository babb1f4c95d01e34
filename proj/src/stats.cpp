#include "hvsim/stats.hpp"

#include <numeric>

#include <fmt/format.h>

namespace hvsim {

namespace {

constexpr Mode kModes[] = {Mode::M, Mode::HS, Mode::VS, Mode::U, Mode::VU};
constexpr TrapTarget kTargets[] = {TrapTarget::M, TrapTarget::HS, TrapTarget::VS};

}  // namespace

uint64_t Stats::instret_total() const
{
  return std::accumulate(instret_by_mode.begin(), instret_by_mode.end(), uint64_t{0});
}

uint64_t Stats::exceptions_total() const
{
  return std::accumulate(exceptions_by_target.begin(), exceptions_by_target.end(), uint64_t{0});
}

uint64_t Stats::interrupts_total() const
{
  return std::accumulate(interrupts_by_target.begin(), interrupts_by_target.end(), uint64_t{0});
}

std::string format_stats_flat(const Stats& s)
{
  std::string out;
  for (Mode m : kModes)
    out += fmt::format("instret.{}={}\n", to_string(m), s.instret(m));
  out += fmt::format("instret.total={}\n", s.instret_total());
  for (TrapTarget t : kTargets)
    out += fmt::format("exceptions.{}={}\n", to_string(t), s.exceptions(t));
  for (TrapTarget t : kTargets)
    out += fmt::format("interrupts.{}={}\n", to_string(t), s.interrupts(t));
  out += fmt::format("pte_loads={}\n", s.pte_loads);
  out += fmt::format("guest_page_faults={}\n", s.guest_page_faults);
  out += fmt::format("tlb_hits={}\n", s.tlb_hits);
  out += fmt::format("tlb_misses={}\n", s.tlb_misses);
  return out;
}

std::string format_stats(const Stats& s)
{
  std::string out = "== statistics ==\n";
  out += fmt::format("{:<12}{:>8}{:>8}{:>8}{:>8}{:>8}{:>10}\n", "", "M", "HS", "VS", "U", "VU", "total");
  out += fmt::format("{:<12}", "instret");
  for (Mode m : kModes)
    out += fmt::format("{:>8}", s.instret(m));
  out += fmt::format("{:>10}\n", s.instret_total());
  out += fmt::format("{:<12}{:>8}{:>8}{:>8}{:>8}{:>8}{:>10}\n", "exceptions", s.exceptions(TrapTarget::M),
                     s.exceptions(TrapTarget::HS), s.exceptions(TrapTarget::VS), "-", "-", s.exceptions_total());
  out += fmt::format("{:<12}{:>8}{:>8}{:>8}{:>8}{:>8}{:>10}\n", "interrupts", s.interrupts(TrapTarget::M),
                     s.interrupts(TrapTarget::HS), s.interrupts(TrapTarget::VS), "-", "-", s.interrupts_total());
  out += fmt::format("pte loads: {}  guest page faults: {}  tlb hits: {}  tlb misses: {}\n", s.pte_loads,
                     s.guest_page_faults, s.tlb_hits, s.tlb_misses);
  out += "== stats (key=value) ==\n";
  out += format_stats_flat(s);
  return out;
}

}  // namespace hvsim
