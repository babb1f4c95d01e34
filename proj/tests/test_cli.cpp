#include <gtest/gtest.h>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "hvsim/harness/assembler.hpp"
#include "hvsim/machine.hpp"

using namespace hvsim;
using namespace hvsim::harness;

namespace {

struct Output {
  int code = -1;
  std::string text;
};

Output cli(const std::string& args)
{
  const std::string cmd = std::string(HVSIM_CLI_PATH) + " " + args + " 2>&1";
  Output out;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe)
    return out;
  std::array<char, 4096> buf{};
  while (std::size_t n = fread(buf.data(), 1, buf.size(), pipe))
    out.text.append(buf.data(), n);
  const int status = pclose(pipe);
  out.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return out;
}

std::string write_image(const std::string& name, uint64_t base, uint64_t exit_value)
{
  Assembler as(base);
  as.li(t5, kDefaultExitAddr);
  as.li(t6, exit_value);
  as.sd(t6, t5);
  const auto bytes = as.bytes();
  const auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream(path, std::ios::binary).write(reinterpret_cast<const char*>(bytes.data()),
                                              static_cast<std::streamsize>(bytes.size()));
  return path.string();
}

}  // namespace

TEST(Cli, RunPassWithStats)
{
  const Output o = cli("run " + write_image("hvsim_cli_pass.bin", kDefaultMemBase, 1) + " --stats");
  EXPECT_EQ(o.code, 0) << o.text;
  EXPECT_NE(o.text.find("result=pass"), std::string::npos) << o.text;
  EXPECT_NE(o.text.find("pte_loads="), std::string::npos) << o.text;
}

TEST(Cli, RunFailExitsOne)
{
  const Output o = cli("run " + write_image("hvsim_cli_fail.bin", kDefaultMemBase, 7));
  EXPECT_EQ(o.code, 1) << o.text;
  EXPECT_NE(o.text.find("result=fail code=3"), std::string::npos) << o.text;
}

TEST(Cli, HexAddressOptions)
{
  const std::string image = write_image("hvsim_cli_hex.bin", 0x8000'4000, 1);
  const Output o = cli("run " + image + " --load-addr 0x80004000 --max-steps 100");
  EXPECT_EQ(o.code, 0) << o.text;
}

TEST(Cli, StepLimitIsFailure)
{
  const std::string image = write_image("hvsim_cli_limit.bin", kDefaultMemBase, 1);
  const Output o = cli("run " + image + " --max-steps 2");
  EXPECT_EQ(o.code, 1) << o.text;
  EXPECT_NE(o.text.find("steps=2"), std::string::npos) << o.text;
}

TEST(Cli, SuiteSelection)
{
  EXPECT_EQ(cli("test --suite two_stage_translation").code, 0);
  EXPECT_EQ(cli("test --suite no_such_suite").code, 2);
  const Output list = cli("test --list");
  EXPECT_EQ(list.code, 0);
  EXPECT_NE(list.text.find("tinst_tests"), std::string::npos);
  const Output machine = cli("test --suite wfi_exception_tests --machine");
  EXPECT_NE(machine.text.find("wfi_exception_tests.vs_vtw_virtual=pass"), std::string::npos) << machine.text;
}

TEST(Cli, UsageErrors)
{
  EXPECT_EQ(cli("run --no-such-flag").code, 2);
  EXPECT_EQ(cli("run /nonexistent/image.bin").code, 2);
  EXPECT_EQ(cli("frobnicate").code, 2);
}

TEST(Cli, DumpDisassembles)
{
  const Output o = cli("dump " + write_image("hvsim_cli_dump.bin", kDefaultMemBase, 1));
  EXPECT_EQ(o.code, 0) << o.text;
  EXPECT_NE(o.text.find("0000000080000000: "), std::string::npos) << o.text;
  EXPECT_NE(o.text.find("sd x31, 0(x30)"), std::string::npos) << o.text;
}
