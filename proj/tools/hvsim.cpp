#include <cstdio>
#include <fstream>
#include <iostream>
#include <iterator>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "hvsim/decode.hpp"
#include "hvsim/harness/suite.hpp"
#include "hvsim/machine.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;

struct RunOptions {
  std::string image;
  uint64_t load_addr = hvsim::kDefaultMemBase;
  std::optional<uint64_t> entry_pc;
  uint64_t mem_size = hvsim::kDefaultMemSize;
  uint64_t max_steps = hvsim::kDefaultMaxSteps;
  uint64_t exit_addr = hvsim::kDefaultExitAddr;
  bool trace = false;
  bool walk_trace = false;
  bool stats = false;
  bool dump_state = false;
};

struct TestOptions {
  std::string suite;
  bool list = false;
  bool machine = false;
};

int do_run(const RunOptions& opt)
{
  hvsim::MachineConfig config;
  config.mem_size = opt.mem_size;
  config.exit_addr = opt.exit_addr;
  hvsim::Machine machine(config);
  try {
    machine.load_image_file(opt.image, opt.load_addr);
  } catch (const std::exception& e) {
    fmt::print(stderr, "hvsim: {}\n", e.what());
    return kExitUsage;
  }
  machine.reset(opt.entry_pc.value_or(opt.load_addr));
  if (opt.trace)
    machine.set_trace(&std::cout);
  if (opt.walk_trace)
    machine.set_walk_trace(&std::cout);

  const hvsim::RunResult result = machine.run(opt.max_steps);
  std::cout << std::flush;
  fmt::print("result={}", hvsim::to_string(result.status));
  if (result.status == hvsim::RunStatus::Fail)
    fmt::print(" code={}", result.fail_code);
  fmt::print(" steps={}\n", result.steps);
  if (opt.stats)
    fmt::print("{}", hvsim::format_stats(machine.stats()));
  if (opt.dump_state)
    fmt::print("{}", machine.dump_state());
  return result.status == hvsim::RunStatus::Pass ? kExitOk : kExitFail;
}

int do_test(const TestOptions& opt)
{
  namespace h = hvsim::harness;
  if (opt.list) {
    for (const auto& s : h::all_suites())
      fmt::print("{:<34} {}\n", s.name, s.description);
    return kExitOk;
  }
  std::optional<std::string_view> filter;
  if (!opt.suite.empty()) {
    if (!h::find_suite(opt.suite)) {
      fmt::print(stderr, "hvsim: unknown suite '{}' (see `hvsim test --list`)\n", opt.suite);
      return kExitUsage;
    }
    filter = opt.suite;
  }
  const auto results = h::run_suites(filter);
  fmt::print("{}", opt.machine ? h::format_machine(results) : h::format_report(results));
  for (const auto& r : results)
    if (!r.passed())
      return kExitFail;
  return kExitOk;
}

int do_dump(const std::string& path, uint64_t base)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    fmt::print(stderr, "hvsim: cannot open {}\n", path);
    return kExitUsage;
  }
  const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  for (std::size_t off = 0; off + 4 <= bytes.size(); off += 4) {
    uint32_t raw = 0;
    for (int i = 3; i >= 0; --i)
      raw = (raw << 8) | static_cast<uint8_t>(bytes[off + i]);
    const uint64_t pc = base + off;
    fmt::print("{:016x}: {:08x}  {}\n", pc, raw, hvsim::disassemble(hvsim::decode(raw), pc));
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv)
{
  CLI::App app{"RV64 hypervisor-extension instruction-set simulator"};
  app.require_subcommand(1);

  RunOptions run;
  auto* run_cmd = app.add_subcommand("run", "Run a raw binary image");
  run_cmd->add_option("image", run.image, "Raw binary image")->required()->check(CLI::ExistingFile);
  run_cmd->add_option("--load-addr", run.load_addr, "Physical load address (default 0x80000000)");
  run_cmd->add_option("--entry-pc", run.entry_pc, "Initial pc (default: load address)");
  run_cmd->add_option("--mem-size", run.mem_size, "RAM size in bytes");
  run_cmd->add_option("--max-steps", run.max_steps, "Step budget")->check(CLI::PositiveNumber);
  run_cmd->add_option("--exit-addr", run.exit_addr, "Exit device address");
  run_cmd->add_flag("--trace", run.trace, "Print EXEC/TRAP/FPGATE trace lines");
  run_cmd->add_flag("--walk-trace", run.walk_trace, "Print WALK lines for every PTE load");
  run_cmd->add_flag("--stats", run.stats, "Print statistics after the run");
  run_cmd->add_flag("--dump-state", run.dump_state, "Print the architectural state after the run");

  TestOptions test;
  auto* test_cmd = app.add_subcommand("test", "Run the built-in validation suites");
  test_cmd->add_option("--suite", test.suite, "Run a single suite");
  test_cmd->add_flag("--list", test.list, "List suite names");
  test_cmd->add_flag("--json,--machine", test.machine, "Flat suite.case=pass|fail output");

  std::string dump_image;
  uint64_t dump_base = hvsim::kDefaultMemBase;
  auto* dump_cmd = app.add_subcommand("dump", "Disassemble a raw binary image");
  dump_cmd->add_option("image", dump_image, "Raw binary image")->required();
  dump_cmd->add_option("--load-addr", dump_base, "Address of the first word");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  if (*run_cmd)
    return do_run(run);
  if (*test_cmd)
    return do_test(test);
  return do_dump(dump_image, dump_base);
}
