#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>

#include "hvsim/harness/scenario.hpp"
#include "hvsim/harness/suite.hpp"
#include "walk_oracle.hpp"

using namespace hvsim;
using namespace hvsim::harness;

TEST(Assembler, LiLoadsEveryValue)
{
  std::mt19937_64 rng(3);
  std::vector<uint64_t> values = {0, 1, 0x7FF, 0x800, 0xFFF, 0x7FFF'F800, 0x8000'0000, ~uint64_t{0},
                                  uint64_t{1} << 63, 0x8000'0000'0000'0800, 0x1234'5678'9ABC'DEF0};
  for (int i = 0; i < 500; ++i) {
    const uint64_t v = rng();
    values.push_back(v);
    values.push_back(v >> (rng() % 64));
    values.push_back(static_cast<uint64_t>(static_cast<int64_t>(v) >> (rng() % 64)));
  }
  for (std::size_t start = 0; start < values.size(); start += 20) {
    Machine m;
    Assembler as(kDefaultMemBase);
    const std::size_t end = std::min(values.size(), start + 20);
    for (std::size_t i = start; i < end; ++i)
      as.li(static_cast<Reg>(a0 + (i - start)), values[i]);
    as.li(t5, kDefaultExitAddr);
    as.li(t6, 1);
    as.sd(t6, t5);
    m.load_image(as.bytes(), as.base());
    m.reset(as.base());
    ASSERT_EQ(m.run(100'000).status, RunStatus::Pass);
    for (std::size_t i = start; i < end; ++i)
      EXPECT_EQ(m.hart().x[a0 + (i - start)], values[i]) << std::hex << values[i];
  }
}

TEST(Assembler, LabelsResolveForwardAndBackward)
{
  Assembler as(0x8000'0000);
  const Assembler::Label fwd = as.new_label();
  const Assembler::Label back = as.new_label();
  as.bind(back);
  as.beq(a0, a1, fwd);
  as.nop();
  as.j(back);
  as.la(a2, fwd);
  as.bind(fwd);
  EXPECT_EQ(as.address_of(fwd), 0x8000'0014u);
  const std::vector<uint32_t> w = as.words();
  EXPECT_EQ(decode(w[0]).imm, 0x14);
  EXPECT_EQ(decode(w[2]).imm, -8);
  EXPECT_EQ(decode(w[3]).op, Op::AUIPC);
  EXPECT_EQ(decode(w[4]).op, Op::ADDI);
  EXPECT_EQ(0x8000'000C + decode(w[3]).imm + decode(w[4]).imm, 0x8000'0014);
}

TEST(Assembler, UnboundLabelThrows)
{
  Assembler as(0x8000'0000);
  as.j(as.new_label());
  EXPECT_THROW(as.bytes(), AssemblerError);
}

TEST(PageTableBuilder, RecordedMappingsMatchReferenceWalk)
{
  std::mt19937_64 rng(5);
  Machine m;
  PageTableBuilder b(m.bus().ram(), 0x8010'0000, 0x10'0000, PagingFormat::Sv39);
  const uint64_t root = b.new_root();
  std::set<uint64_t> used_gigas;
  for (int i = 0; i < 64; ++i) {
    const unsigned level = rng() % 3;
    uint64_t giga = rng() % 256;
    while (!used_gigas.insert(giga).second)
      giga = rng() % 256;
    const uint64_t va = ((giga << 30) | (rng() & ((1u << 30) - 1))) & ~level_offset_mask(level);
    const uint64_t pa = (rng() & ((uint64_t{1} << 50) - 1)) & ~level_offset_mask(level);
    b.map(root, va, pa, level, perm::kRWX);
  }
  hvsim::testing::WalkQuery q;
  q.atp = make_satp(root);
  for (const Mapping& mp : b.mappings()) {
    for (uint64_t off : {uint64_t{0}, level_offset_mask(mp.level)}) {
      const uint64_t va = mp.va + off;
      const hvsim::testing::WalkOutcome w = hvsim::testing::reference_translate(m.bus().ram(), q, va, AccessType::Read);
      ASSERT_TRUE(w.ok) << std::hex << va;
      EXPECT_EQ(b.lookup(va), w.pa);
      EXPECT_EQ(w.pte_loads, 3 - mp.level);
    }
  }
}

TEST(Suites, EveryCatalogueSuitePassesWithEnoughCases)
{
  const std::vector<SuiteResult> results = run_suites();
  ASSERT_EQ(results.size(), all_suites().size());
  ASSERT_GE(results.size(), 9u);
  std::size_t cases = 0;
  for (const SuiteResult& s : results) {
    EXPECT_GE(s.cases.size(), 3u) << s.name;
    EXPECT_TRUE(s.passed()) << format_report({s});
    cases += s.cases.size();
  }
  const std::string machine = format_machine(results);
  EXPECT_EQ(static_cast<std::size_t>(std::count(machine.begin(), machine.end(), '\n')), cases);
  EXPECT_EQ(machine.find("=fail"), std::string::npos);
}

TEST(Suites, FilterSelectsOneSuite)
{
  const auto results = run_suites("tinst_tests", false);
  ASSERT_EQ(results.size(), 1u);
  EXPECT_EQ(results[0].name, "tinst_tests");
  EXPECT_EQ(find_suite("no_such_suite"), nullptr);
}

TEST(Suites, SerialAndParallelAgree)
{
  EXPECT_EQ(format_machine(run_suites(std::nullopt, false)), format_machine(run_suites(std::nullopt, true)));
}

TEST(Report, FailingCheckIsShownWithValues)
{
  SuiteResult s{"demo", {}};
  CaseResult c("broken");
  c.expect("mcause", 0x15, 0x17, Provenance::Specification);
  s.cases.push_back(c);
  EXPECT_FALSE(s.passed());
  const std::string report = format_report({s});
  EXPECT_NE(report.find("[FAIL] demo"), std::string::npos);
  EXPECT_NE(report.find("mcause: expected 0x15 observed 0x17"), std::string::npos);
  EXPECT_EQ(format_machine({s}), "demo.broken=fail\n");
}
