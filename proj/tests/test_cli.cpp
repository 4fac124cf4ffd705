#include <gtest/gtest.h>

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "rvpipe/cli.hpp"
#include "rvpipe/diagram.hpp"

using namespace rvpipe;
namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

struct Outcome {
  int code;
  std::string out, err;
};

Outcome cli(std::vector<std::string> args, const std::string& stdin_text = "") {
  std::istringstream in(stdin_text);
  std::ostringstream out, err;
  const int code = run_cli(args, in, out, err);
  return {code, out.str(), err.str()};
}

class TempDir {
 public:
  TempDir() : path_(fs::temp_directory_path() / ("rvpipe_cli_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) + "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name())) {
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  std::string write(const std::string& name, const std::string& text) const {
    std::ofstream(path_ / name) << text;
    return (path_ / name).string();
  }
  std::string at(const std::string& name) const { return (path_ / name).string(); }

 private:
  fs::path path_;
};

const char* kExit7 = ".text\nli a0, 7\nli a7, 17\necall\n";

}  // namespace

TEST(Cli, AsmPrintsAListing) {
  const Outcome r = cli({"asm", "@raw_hazard"});
  EXPECT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NE(r.out.find("0x00400000"), std::string::npos);
  EXPECT_NE(r.out.find("add"), std::string::npos);
}

TEST(Cli, AsmReportsEveryDiagnostic) {
  TempDir dir;
  const std::string f = dir.write("bad.s", ".text\nfrob x1\naddi x1, x0, 99999\n");
  const Outcome r = cli({"asm", f});
  EXPECT_EQ(r.code, kExitDiagnostics);
  EXPECT_NE(r.err.find(":2:"), std::string::npos) << r.err;
  EXPECT_NE(r.err.find(":3:"), std::string::npos) << r.err;
  EXPECT_TRUE(r.out.empty());
}

TEST(Cli, MissingFilesAndExamples) {
  EXPECT_EQ(cli({"asm", "/nonexistent/x.s"}).code, kExitDiagnostics);
  const Outcome r = cli({"run", "@nope"});
  EXPECT_EQ(r.code, kExitDiagnostics);
  EXPECT_NE(r.err.find("nope"), std::string::npos);
}

TEST(Cli, RunExitCodes) {
  TempDir dir;
  EXPECT_EQ(cli({"run", "@raw_hazard"}).code, kExitOk);
  EXPECT_EQ(cli({"run", dir.write("exit.s", kExit7)}).code, kExitOk);
  EXPECT_EQ(cli({"run", dir.write("fault.s", ".text\nld x1, 3(x0)\n")}).code, kExitFault);
  EXPECT_EQ(cli({"run", dir.write("loop.s", ".text\nl: j l\n")}).code, kExitCycleLimit);
  EXPECT_EQ(cli({"run", dir.write("empty.s", ".data\n.word 3\n")}).code, kExitDiagnostics);
}

TEST(Cli, RunReportsStatusOnStderr) {
  TempDir dir;
  const Outcome r = cli({"run", dir.write("exit.s", kExit7)});
  EXPECT_NE(r.err.find("exit code 7"), std::string::npos) << r.err;
  const Outcome lim = cli({"run", "--max-cycles", "10", dir.write("loop.s", ".text\nl: j l\n")});
  EXPECT_EQ(lim.code, kExitCycleLimit);
  EXPECT_NE(lim.err.find("cycle limit of 10"), std::string::npos);
}

TEST(Cli, StatsForBothModes) {
  const Outcome fwd = cli({"run", "--stats", "@raw_hazard"});
  const Outcome nofwd = cli({"run", "--stats", "--no-forwarding", "@raw_hazard"});
  EXPECT_NE(fwd.out.find("raw stalls       0"), std::string::npos) << fwd.out;
  EXPECT_NE(nofwd.out.find("raw stalls       2"), std::string::npos) << nofwd.out;
  EXPECT_NE(fwd.out.find("CPI"), std::string::npos);
}

TEST(Cli, JsonSummary) {
  const Outcome r = cli({"run", "--json", "--no-forwarding", "@load_use"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const json j = json::parse(r.out);
  EXPECT_EQ(j["forwarding"], false);
  EXPECT_EQ(j["status"]["state"], "halted");
  EXPECT_EQ(j["stats"]["load_use_stalls"], 2);
  EXPECT_EQ(j["registers"].size(), 32u);
}

TEST(Cli, InputFromFile) {
  TempDir dir;
  const std::string tape = dir.write("in.txt", "Ada\n21\n");
  const Outcome r = cli({"run", "--input", tape, "@string_io"});
  EXPECT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NE(r.out.find("Hello, Ada! Twice your number is 42\n"), std::string::npos) << r.out;
  EXPECT_EQ(cli({"run", "--input", dir.at("none.txt"), "@string_io"}).code, kExitDiagnostics);
}

TEST(Cli, InputFromStdin) {
  const Outcome r = cli({"run", "@string_io"}, "Bo\nseven\n4\n");
  EXPECT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NE(r.out.find("Hello, Bo! Twice your number is 8"), std::string::npos) << r.out;
}

TEST(Cli, InputExhaustedIsAFault) {
  const Outcome r = cli({"run", "@string_io"}, "Bo\n");
  EXPECT_EQ(r.code, kExitFault);
  EXPECT_NE(r.err.find("console input required"), std::string::npos);
}

TEST(Cli, SourceFromStdin) {
  const Outcome r = cli({"run", "-"}, kExit7);
  EXPECT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NE(r.err.find("exit code 7"), std::string::npos);
}

TEST(Cli, DiagramAndCsv) {
  TempDir dir;
  const std::string csv = dir.at("d.csv");
  const Outcome r = cli({"run", "--diagram", "full", "--csv", csv, "@raw_hazard"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NE(r.out.find("WB"), std::string::npos);
  std::ifstream f(csv);
  std::stringstream ss;
  ss << f.rdbuf();
  const PipelineDiagram d = parse_csv(ss.str());
  EXPECT_EQ(d.columns, 7u);
  EXPECT_TRUE(check_invariants(d).empty());

  const Outcome sq = cli({"run", "--diagram", "squashed", "@loop"});
  EXPECT_EQ(sq.code, kExitOk);
  EXPECT_NE(sq.out.find("×"), std::string::npos) << sq.out;
  EXPECT_EQ(cli({"run", "--diagram", "sideways", "@loop"}).code, kExitDiagnostics);
  EXPECT_EQ(cli({"run", "--csv", dir.at("missing/d.csv"), "@loop"}).code, kExitDiagnostics);
}

TEST(Cli, Trace) {
  const Outcome r = cli({"run", "--trace", "@raw_hazard"});
  EXPECT_NE(r.out.find("    7:"), std::string::npos) << r.out;
}

TEST(Cli, CompareModes) {
  const Outcome r = cli({"compare", "--json", "@raw_hazard"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const json j = json::parse(r.out);
  EXPECT_EQ(j["columns"][0]["title"], "fwd");
  EXPECT_EQ(j["delta"]["cycles"], 2);
  EXPECT_EQ(j["delta"]["raw_stalls"], 2);

  const Outcome text = cli({"compare", "@raw_hazard"});
  EXPECT_NE(text.out.find("+2"), std::string::npos) << text.out;
  EXPECT_NE(text.out.find("delta"), std::string::npos);
}

TEST(Cli, CompareTwoFiles) {
  const Outcome r = cli({"compare", "--json", "--modes", "nofwd", "@raw_hazard", "@load_use"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const json j = json::parse(r.out);
  EXPECT_EQ(j["columns"][1]["title"], "@load_use");
  EXPECT_EQ(cli({"compare", "--modes", "fwd,nofwd", "@raw_hazard", "@load_use"}).code, kExitDiagnostics);
  EXPECT_EQ(cli({"compare", "--modes", "fast,slow", "@raw_hazard"}).code, kExitDiagnostics);
}

TEST(Cli, Examples) {
  const Outcome list = cli({"examples"});
  EXPECT_EQ(list.code, kExitOk);
  std::istringstream lines(list.out);
  int n = 0;
  for (std::string l; std::getline(lines, l);) ++n;
  EXPECT_GE(n, 5);
  const Outcome show = cli({"examples", "--show", "load_use"});
  EXPECT_NE(show.out.find("ld   t0, 0(a0)"), std::string::npos);
  EXPECT_EQ(cli({"examples", "--show", "nope"}).code, kExitDiagnostics);
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(cli({}).code, kExitDiagnostics);
  EXPECT_EQ(cli({"frobnicate"}).code, kExitDiagnostics);
  EXPECT_EQ(cli({"run"}).code, kExitDiagnostics);
  EXPECT_EQ(cli({"run", "--max-cycles", "0", "@loop"}).code, kExitDiagnostics);
  EXPECT_EQ(cli({"serve", "--listen", "nohost"}).code, kExitDiagnostics);
  EXPECT_EQ(cli({"serve", "--listen", "127.0.0.1:99999"}).code, kExitDiagnostics);
  const Outcome help = cli({"--help"});
  EXPECT_EQ(help.code, kExitOk);
  EXPECT_NE(help.out.find("compare"), std::string::npos);
}
