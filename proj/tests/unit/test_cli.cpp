#include <gtest/gtest.h>
#include <sys/wait.h>
#include <unistd.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "recsynth/cli.hpp"

using namespace recsynth;
namespace fs = std::filesystem;

namespace {

const std::string kCorpus = RECSYNTH_CORPUS_DIR;

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct CliRun {
  int status;
  std::string out;
};

// Runs the CLI binary with stderr discarded.
CliRun run_cli(const std::string& args) {
  std::string cmd = std::string(RECSYNTH_CLI) + " " + args + " 2>/dev/null";
  FILE* f = popen(cmd.c_str(), "r");
  std::string out;
  std::array<char, 4096> buf;
  while (size_t n = fread(buf.data(), 1, buf.size(), f)) out.append(buf.data(), n);
  int st = pclose(f);
  return {WIFEXITED(st) ? WEXITSTATUS(st) : -1, out};
}

// Scratch directory removed at the end of the test.
struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("recsynth_cli_" + std::to_string(::getpid()) + "_" +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string write(const std::string& name, const std::string& text) const {
    std::ofstream(path / name) << text;
    return (path / name).string();
  }
};

TEST(Cli, ExitCodes) {
  RunReport r;
  for (auto [o, c] : std::vector<std::pair<std::string, int>>{{"accepted", 0},
                                                              {"synthesized", 0},
                                                              {"evaluated", 0},
                                                              {"rejected", 2},
                                                              {"no-solution", 2},
                                                              {"timeout", 3},
                                                              {"fuel-exhausted", 3},
                                                              {"error", 4}}) {
    r.outcome = o;
    EXPECT_EQ(exit_code(r), c) << o;
  }
  r.message = "solver: z3 died";
  EXPECT_EQ(exit_code(r), 5);
}

TEST(Cli, ParseDRange) {
  PatternRange r = parse_d_range("2:4,1:3");
  EXPECT_EQ(r.div_min, 2);
  EXPECT_EQ(r.div_max, 4);
  EXPECT_EQ(r.sub_min, 1);
  EXPECT_EQ(r.sub_max, 3);
  EXPECT_THROW(parse_d_range("1:3"), std::invalid_argument);
  EXPECT_THROW(parse_d_range("3:2"), std::invalid_argument);
  EXPECT_THROW(parse_d_range("x"), std::invalid_argument);
}

TEST(Cli, JsonOmitsTimingOnRequest) {
  RunReport r;
  r.mode = "synth";
  r.problem = "p";
  r.outcome = "timeout";
  r.stats = SearchStats{};
  r.stats->elapsed_ms = 12.34;
  EXPECT_NE(to_json_line(r, true).find("elapsed_ms"), std::string::npos);
  EXPECT_EQ(to_json_line(r, false).find("elapsed_ms"), std::string::npos);
  EXPECT_EQ(to_json_line(r, false).rfind("{\"mode\":\"synth\",\"problem\":\"p\",\"outcome\":\"timeout\"", 0), 0u);
}

TEST(Cli, CheckAcceptsLogarithmicProd) {
  RunReport r = cmd_check(kCorpus + "/prod.problem", kCorpus + "/prod_log.impl", {});
  EXPECT_EQ(r.outcome, "accepted");
  EXPECT_EQ(r.pattern, "Master-log");
  EXPECT_EQ(exit_code(r), 0);
}

TEST(Cli, CheckRejectsLinearProdAtSizeStage) {
  RunReport r = cmd_check(kCorpus + "/prod.problem", kCorpus + "/prod_linear.impl", {});
  EXPECT_EQ(r.outcome, "rejected");
  ASSERT_TRUE(r.message);
  EXPECT_EQ(r.message->rfind("recursive-call size check failed", 0), 0u) << *r.message;
  EXPECT_NE(r.message->find("prod (dec x) y"), std::string::npos);
  EXPECT_EQ(exit_code(r), 2);
}

TEST(Cli, MalformedInputExitsFour) {
  TempDir d;
  std::string bad = d.write("bad.problem", "garbage ::\n");
  RunReport r = cmd_synth(bad, {});
  EXPECT_EQ(r.outcome, "error");
  EXPECT_EQ(r.message->rfind("input:", 0), 0u);
  EXPECT_EQ(run_cli("synth " + bad).status, 4);
  EXPECT_EQ(run_cli("check " + kCorpus + "/prod.problem " + bad).status, 4);
  EXPECT_EQ(run_cli("synth " + (d.path / "missing.problem").string()).status, 4);
  EXPECT_EQ(run_cli("synth").status, 4);
  EXPECT_EQ(run_cli("bench --format xml " + kCorpus).status, 4);
}

TEST(Cli, MissingSolverExitsFive) {
  CliRun r = run_cli("synth " + kCorpus + "/is_member.problem --solver-cmd /nonexistent/solver");
  EXPECT_EQ(r.status, 5) << r.out;
}

TEST(Cli, SynthProdFromBinary) {
  CliRun r = run_cli("synth " + kCorpus + "/prod.problem --no-timing");
  EXPECT_EQ(r.status, 0);
  EXPECT_NE(r.out.find("\"outcome\":\"synthesized\""), std::string::npos);
  EXPECT_NE(r.out.find("\"pattern\":\"Master-log\""), std::string::npos);
  EXPECT_EQ(r.out.find("elapsed_ms"), std::string::npos);
}

TEST(Cli, TinyTimeoutExitsThree) {
  CliRun r = run_cli("synth " + kCorpus + "/prod.problem --timeout 1");
  EXPECT_EQ(r.status, 3);
  EXPECT_NE(r.out.find("\"outcome\":\"timeout\""), std::string::npos);
}

TEST(Cli, NoPruneEnumeratesAtLeastAsMany) {
  CliOptions on, off;
  off.search.pruning = false;
  RunReport a = cmd_synth(kCorpus + "/append.problem", on);
  RunReport b = cmd_synth(kCorpus + "/append.problem", off);
  ASSERT_EQ(a.outcome, "synthesized");
  ASSERT_EQ(b.outcome, "synthesized");
  EXPECT_GE(b.stats->eterms_enumerated, a.stats->eterms_enumerated);
}

TEST(Cli, EvalDouble) {
  RunReport r = cmd_eval(kCorpus + "/double.impl", {"5"}, std::nullopt, {});
  EXPECT_EQ(r.outcome, "evaluated");
  EXPECT_EQ(r.value, "10");
  EXPECT_EQ(r.cost, 5);
  r = cmd_eval(kCorpus + "/double.impl", {"0"}, std::nullopt, {});
  EXPECT_EQ(r.value, "0");
  EXPECT_EQ(r.cost, 0);
  CliRun b = run_cli("eval " + kCorpus + "/double.impl 5");
  EXPECT_EQ(b.status, 0);
  EXPECT_EQ(b.out, "{\"mode\":\"eval\",\"problem\":\"double\",\"outcome\":\"evaluated\",\"value\":\"10\",\"cost\":5}\n");
}

TEST(Cli, EvalDivergenceIsFuelExhausted) {
  TempDir d;
  std::string loop = d.write("loop.impl", "loop = fix loop. \\x. loop x\n");
  CliOptions o;
  o.fuel = 1000;
  RunReport r = cmd_eval(loop, {"3"}, std::nullopt, o);
  EXPECT_EQ(r.outcome, "fuel-exhausted");
  EXPECT_EQ(exit_code(r), 3);
  // Negative input never reaches the base case; deep recursion is caught, not a crash.
  EXPECT_EQ(run_cli("eval " + kCorpus + "/double.impl -- -1").status, 3);
}

TEST(Cli, EvalWithProblemAuxiliaries) {
  RunReport r = cmd_eval(kCorpus + "/prod_log.impl", {"6", "7"}, kCorpus + "/prod.problem", {});
  EXPECT_EQ(r.outcome, "evaluated");
  EXPECT_EQ(r.value, "42");
}

TEST(Cli, BenchEmptyCorpusHasNoReports) {
  TempDir d;
  EXPECT_TRUE(cmd_bench({d.path.string()}, {}).empty());
  CliRun r = run_cli("bench " + d.path.string());
  EXPECT_EQ(r.status, 0);
  EXPECT_EQ(r.out, "");
  EXPECT_EQ(run_cli("bench " + (d.path / "nope").string()).status, 4);
}

TEST(Cli, BenchUnattainableBoundIsNoSolution) {
  TempDir d;
  std::string text = slurp(kCorpus + "/is_member.problem");
  text.replace(text.rfind("O(u)"), 4, "O(1)");
  d.write("is_member_const.problem", text);
  d.write("is_empty.problem", slurp(kCorpus + "/is_empty.problem"));
  auto reports = cmd_bench({d.path.string()}, {});
  ASSERT_EQ(reports.size(), 2u);
  EXPECT_EQ(reports[0].problem, "is_empty");
  EXPECT_EQ(reports[0].outcome, "synthesized");
  EXPECT_EQ(reports[1].problem, "is_member_const");
  EXPECT_EQ(reports[1].outcome, "no-solution");
  EXPECT_FALSE(reports[1].program);
  EXPECT_EQ(run_cli("bench " + d.path.string() + " --no-timing").status, 2);
  std::string table = bench_table(reports);
  EXPECT_NE(table.find("is_member_const"), std::string::npos);
  EXPECT_NE(table.find("no-solution"), std::string::npos);
}

TEST(Cli, BenchMiniCorpusGolden) {
  std::vector<std::string> files;
  for (const char* n : {"append", "binary_search", "prod", "replicate"}) files.push_back(kCorpus + "/" + n + ".problem");
  auto reports = cmd_bench(files, {});
  ASSERT_EQ(reports.size(), 4u);
  std::vector<std::string> letters;
  std::string jsonl;
  for (const auto& r : reports) {
    EXPECT_EQ(r.outcome, "synthesized") << r.problem;
    ASSERT_TRUE(r.fit) << r.problem;
    EXPECT_TRUE(r.fit->pass) << r.problem;
    jsonl += to_json_line(r, false) + "\n";
  }
  EXPECT_EQ(reports[0].pattern, "CFinite-linear");
  EXPECT_EQ(reports[1].pattern, "Master-log");
  EXPECT_EQ(reports[2].pattern, "Master-log");
  EXPECT_EQ(reports[3].pattern, "CFinite-linear");
  const std::string path = RECSYNTH_GOLDEN_DIR "/bench_mini.jsonl";
  if (std::getenv("RECSYNTH_UPDATE_GOLDEN")) std::ofstream(path) << jsonl;
  EXPECT_EQ(jsonl, slurp(path));
}

}  // namespace
