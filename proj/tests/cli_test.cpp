#include <gtest/gtest.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "support.hpp"

using namespace demo2pddl;
namespace fs = std::filesystem;

namespace {

struct CliRun {
  int code = -1;
  std::string out;  // stdout and stderr
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Runs the CLI from `dir` with `args` appended.
CliRun cli(const fs::path& dir, const std::string& args, const std::string& env = "") {
  const fs::path log = dir / "cli_output.txt";
  const std::string cmd = "cd '" + dir.string() + "' && " + env + " '" + DEMO2PDDL_CLI + "' " +
                          args + " > '" + log.string() + "' 2>&1";
  const int status = std::system(cmd.c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(log)};
}

std::string data(const std::string& name) { return "'" + oracle::data_path(name).string() + "'"; }

const std::string kAllTraces = "tr/P*.json";

// Corpus plus a combined library, built once.
fs::path corpus_dir() {
  static const fs::path dir = [] {
    fs::path d = oracle::scratch_dir("cli_corpus_" + std::to_string(getpid()));
    EXPECT_EQ(cli(d, "generate-traces --out-dir tr").code, 0);
    EXPECT_EQ(cli(d, "learn " + kAllTraces + " --library lib.json").code, 0);
    return d;
  }();
  return dir;
}

}  // namespace

TEST(Cli, LearnPutFixture) {
  const auto dir = oracle::scratch_dir("cli_learn");
  CliRun r = cli(dir, "learn " + data("put_fixture.json") + " --library lib.json --report rep.json");
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("added: put (count 1)"), std::string::npos) << r.out;
  EXPECT_EQ(load_library(dir / "lib.json").size(), 3u);
  EXPECT_TRUE(fs::exists(dir / "rep.json"));

  r = cli(dir, "learn " + data("put_fixture.json") + " --library lib.json");
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("incremented: put (count 2)"), std::string::npos) << r.out;
  for (const auto& [_, c] : load_library(dir / "lib.json").counts()) EXPECT_EQ(c, 2u);
}

TEST(Cli, PlanOutcomes) {
  const auto dir = oracle::scratch_dir("cli_plan");
  ASSERT_EQ(cli(dir, "learn " + data("put_fixture.json") + " --library lib.json").code, 0);
  const std::string base = "plan --library lib.json --init " + data("put_fixture.json");

  CliRun r = cli(dir, base + " --goal 'handMove(Right_hand)' --out a");
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_EQ(json::parse(slurp(dir / "a/plan.json")).size(), 1u);
  EXPECT_EQ(json::parse(slurp(dir / "a/result.json"))["total_cost"], 1);

  r = cli(dir, base + " --goal 'inHand(Right_hand, Cube_green1)' --out b");
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_TRUE(json::parse(slurp(dir / "b/plan.json")).empty());

  r = cli(dir, base + " --goal 'onTop(Table_1, Cube_green1)' --out c");
  EXPECT_EQ(r.code, 2) << r.out;
  EXPECT_EQ(slurp(dir / "c/plan.txt"), "unsolvable\n");
  EXPECT_FALSE(fs::exists(dir / "c/plan.json"));
  EXPECT_EQ(json::parse(slurp(dir / "c/result.json"))["status"], "unsolvable");
}

TEST(Cli, InvalidInputExitsThree) {
  const auto dir = oracle::scratch_dir("cli_invalid");
  EXPECT_EQ(cli(dir, "learn " + data("bad_arity.json") + " --library lib.json").code, 3);
  EXPECT_FALSE(fs::exists(dir / "lib.json"));
  EXPECT_EQ(cli(dir, "learn --frobnicate").code, 3);
  EXPECT_EQ(cli(dir, "").code, 3);

  ASSERT_EQ(cli(dir, "learn " + data("put_fixture.json") + " --library lib.json").code, 0);
  const std::string base = "plan --library lib.json --init " + data("put_fixture.json");
  CliRun r = cli(dir, base + " --goal 'handMove(Right_hand'");
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.out.find("offset"), std::string::npos) << r.out;
  EXPECT_EQ(cli(dir, base + " --goal 'handMove(Cube_green1)'").code, 3);
  EXPECT_EQ(cli(dir, base + " --goal 'handMove(Right_hand)' --costs weird").code, 3);

  r = cli(dir, "plan --domain " + data("unsupported_domain.pddl") + " --problem " +
                   data("sussman_problem.pddl"));
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.out.find("2:"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("durative"), std::string::npos) << r.out;
}

TEST(Cli, BlocksworldFromPddl) {
  const auto dir = oracle::scratch_dir("cli_blocks");
  CliRun r = cli(dir, "plan --hmax --domain " + data("blocksworld_domain.pddl") + " --problem " +
                       data("sussman_problem.pddl"));
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_EQ(json::parse(slurp(dir / "result.json"))["total_cost"], 6);
}

TEST(Cli, NodeLimitExitsFour) {
  const auto dir = corpus_dir();
  const std::string base = "plan --library lib.json --init tr/scene.json "
                           "--goal 'onTop(Cube_green1,Cube_red1), onTop(Cube_blue1,Cube_green1)'";
  EXPECT_EQ(cli(dir, base + " --node-limit 3 --out nl").code, 4);

  std::ofstream(dir / "tight.json") << R"({"node_limit": 3})";
  EXPECT_EQ(cli(dir, "--config tight.json " + base + " --out cfg").code, 4);
  // A flag overrides the config file.
  EXPECT_EQ(cli(dir, "--config tight.json " + base + " --node-limit 1000000 --out cfg2").code, 0);
}

TEST(Cli, OutputDirectoryFromEnvironment) {
  const auto dir = corpus_dir();
  fs::remove_all(dir / "env_out");
  CliRun r = cli(dir, "plan --library lib.json --init tr/scene.json --goal 'onTop(Cube_green1,Cube_red1)'",
              "DEMO2PDDL_OUT=env_out");
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_EQ(json::parse(slurp(dir / "env_out/result.json"))["total_cost"], 16);
  r = cli(dir, "plan --library lib.json --init tr/scene.json --goal 'onTop(Cube_green1,Cube_red1)' "
               "--out flag_out", "DEMO2PDDL_OUT=env_out2");
  EXPECT_TRUE(fs::exists(dir / "flag_out/result.json"));
  EXPECT_FALSE(fs::exists(dir / "env_out2/result.json"));
}

TEST(Cli, EmitThenPlanMatchesLibraryPlan) {
  const auto dir = corpus_dir();
  const std::string goal = " --goal 'onTop(Cube_red1,Cube_blue1), onTop(Cube_green1,Cube_red1)'";
  ASSERT_EQ(cli(dir, "emit --library lib.json --init tr/scene.json --out pddl" + goal).code, 0);
  ASSERT_TRUE(fs::exists(dir / "pddl/domain.pddl"));
  CliRun via = cli(dir, "plan --domain pddl/domain.pddl --problem pddl/problem.pddl --out via");
  CliRun direct = cli(dir, "plan --library lib.json --init tr/scene.json --out direct" + goal);
  ASSERT_EQ(via.code, 0) << via.out;
  ASSERT_EQ(direct.code, 0) << direct.out;
  EXPECT_EQ(json::parse(slurp(dir / "via/result.json"))["total_cost"],
            json::parse(slurp(dir / "direct/result.json"))["total_cost"]);
}

TEST(Cli, ExecuteExitCodes) {
  const auto dir = corpus_dir();
  const std::string base = "execute --library lib.json --init tr/scene.json "
                           "--goal 'onTop(Cube_green1,Cube_red1)'";
  CliRun r = cli(dir, base + " --faults " + data("faults_drop_grasp.json") + " --out ex_ok");
  ASSERT_EQ(r.code, 0) << r.out;
  const json log = json::parse(slurp(dir / "ex_ok/log.json"));
  EXPECT_EQ(log["outcome"], "success");
  EXPECT_EQ(log["replans"].size(), 1u);
  EXPECT_TRUE(fs::exists(dir / "ex_ok/log.txt"));

  r = cli(dir, base + " --faults " + data("faults_drop_grasp.json") +
                   " --max-replans 0 --out ex_budget");
  EXPECT_EQ(r.code, 5) << r.out;
  r = cli(dir, base + " --faults " + data("faults_knock_off_table.json") + " --out ex_unsolv");
  EXPECT_EQ(r.code, 5) << r.out;
  EXPECT_EQ(json::parse(slurp(dir / "ex_unsolv/log.json"))["outcome"], "failure(unsolvable)");
}

TEST(Cli, NoisyTracesLearnTheSameLibrary) {
  const auto dir = corpus_dir();
  ASSERT_EQ(cli(dir, "generate-traces --out-dir noisy --noise-seed 4").code, 0);
  ASSERT_EQ(cli(dir, "learn noisy/P*.json --library noisy_lib.json").code, 0);
  EXPECT_EQ(load_library(dir / "noisy_lib.json"), load_library(dir / "lib.json"));
  // Without debouncing the flicker leaks into the operators.
  ASSERT_EQ(cli(dir, "learn noisy/P*.json --library raw_lib.json --debounce 1").code, 0);
  EXPECT_NE(load_library(dir / "raw_lib.json"), load_library(dir / "lib.json"));
}

TEST(Cli, Pipeline) {
  const auto dir = corpus_dir();
  CliRun r = cli(dir, "pipeline " + kAllTraces + " --goal 'onTop(Cube_green1,Cube_red1)' "
                   "--init tr/scene.json --out pipe");
  ASSERT_EQ(r.code, 0) << r.out;
  for (const char* f : {"library.json", "report.json", "domain.pddl", "problem.pddl", "plan.json",
                        "plan.txt", "result.json", "log.json", "log.txt"})
    EXPECT_TRUE(fs::exists(dir / "pipe" / f)) << f;
  EXPECT_EQ(load_library(dir / "pipe/library.json"), load_library(dir / "lib.json"));
}

TEST(Cli, RepeatedRunsAreByteIdentical) {
  const auto dir = corpus_dir();
  const std::string args = "pipeline " + kAllTraces + " --goal 'onTop(Cube_blue1,Cube_green1)' "
                           "--init tr/scene.json --faults " + data("faults_drop_grasp.json");
  ASSERT_EQ(cli(dir, args + " --out rep1").code, 0);
  ASSERT_EQ(cli(dir, args + " --out rep2").code, 0);
  std::size_t compared = 0;
  for (const auto& entry : fs::directory_iterator(dir / "rep1")) {
    const fs::path other = dir / "rep2" / entry.path().filename();
    ASSERT_TRUE(fs::exists(other)) << other;
    EXPECT_EQ(slurp(entry.path()), slurp(other)) << entry.path().filename();
    ++compared;
  }
  EXPECT_EQ(compared, 9u);
}
