// Spawns the installed-layout binary and checks exit codes and outputs.
#include <gtest/gtest.h>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "schema_check.hpp"

namespace {

struct Result {
  int code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Result run_cli(const std::string& args) {
  const auto tmp = std::filesystem::temp_directory_path() /
                   ("mixsmooth_cli_" + std::to_string(::getpid()) + "_" +
                    ::testing::UnitTest::GetInstance()->current_test_info()->name());
  const std::string errfile = tmp.string() + ".err";
  const std::string cmd = std::string(MIXSMOOTH_CLI_PATH) + " " + args + " 2>" + errfile;
  Result r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  std::array<char, 4096> buf{};
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.err = slurp(errfile);
  std::filesystem::remove(errfile);
  return r;
}

nlohmann::ordered_json json_of(const Result& r) {
  auto doc = nlohmann::ordered_json::parse(r.out);
  const auto errs = mixsmooth::cli::validate(mixsmooth::cli::report_schema(), doc);
  EXPECT_TRUE(errs.empty()) << (errs.empty() ? "" : errs[0]);
  return doc;
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

}  // namespace

TEST(VerifyGnl, ProductOnUnitSquare) {
  const auto r = run_cli("verify-gnl --fn 'x1*x2' --n 2 --boxes unit --tol 1e-8 --format json");
  ASSERT_EQ(r.code, 0) << r.err;
  const auto doc = json_of(r);
  EXPECT_EQ(doc["overall"], "PASS");
  ASSERT_EQ(doc["entries"].size(), 1u);
  EXPECT_LE(doc["entries"][0]["values"]["residual"].get<double>(), 1e-14);
}

TEST(VerifyGnl, RandomBoxesSeedSeven) {
  const auto r = run_cli("verify-gnl --fn 'sin(x1)*exp(x2)*x3' --n 3 --boxes random:10 --seed 7 --format json");
  ASSERT_EQ(r.code, 0) << r.err;
  const auto doc = json_of(r);
  EXPECT_EQ(doc["entries"].size(), 10u);
  EXPECT_EQ(doc["overall"], "PASS");
}

TEST(VerifyGnl, SingularEndpointIsInconclusive) {
  const auto r = run_cli("verify-gnl --fn 'log(x1)' --n 1 --boxes unit --format json");
  EXPECT_EQ(r.code, 2);
  EXPECT_EQ(json_of(r)["overall"], "INCONCLUSIVE");
}

TEST(VerifyGnl, ParseErrorIsUsage) {
  const auto r = run_cli("verify-gnl --fn 'sin(x1' --n 1");
  EXPECT_EQ(r.code, 64);
  EXPECT_NE(r.err.find("column 7"), std::string::npos) << r.err;
}

TEST(VerifyGnl, FunctionFile) {
  const auto path = std::filesystem::temp_directory_path() / "mixsmooth_fn_file.txt";
  std::ofstream(path) << "arity: 2\nexp(x1)*x2\n";
  const auto r = run_cli("verify-gnl --fn-file " + path.string() + " --boxes unit --format json");
  EXPECT_EQ(r.code, 0) << r.err;
  std::filesystem::remove(path);
  EXPECT_EQ(run_cli("verify-gnl --fn-file /nonexistent/mixsmooth.txt").code, 74);
}

TEST(CheckEmbedding, BumpOverSeveralP) {
  const auto r = run_cli("check-embedding --fn bump2d --p 1,2,4 --format json");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(json_of(r)["overall"], "PASS");
}

TEST(CheckEmbedding, RejectsSmallP) {
  const auto r = run_cli("check-embedding --fn bump2d --p 0.5");
  EXPECT_EQ(r.code, 64);
  EXPECT_NE(r.err.find("p must be"), std::string::npos) << r.err;
}

TEST(CheckEmbedding, ZeroFunctionNotesZeroMargins) {
  const auto r = run_cli("check-embedding --fn 0 --n 2 --p 2 --format json");
  ASSERT_EQ(r.code, 0) << r.err;
  const auto doc = json_of(r);
  bool noted = false;
  for (const auto& e : doc["entries"])
    if (e.contains("note") && e["note"].get<std::string>().find("margins are 0") != std::string::npos)
      noted = true;
  EXPECT_TRUE(noted);
}

TEST(CheckTrace, UnitSquareConstantTwo) {
  const auto r = run_cli("check-trace --fn gauss2d --box 0,1,0,1 --p 2 --format json");
  ASSERT_EQ(r.code, 0) << r.err;
  const auto doc = json_of(r);
  ASSERT_EQ(doc["entries"].size(), 2u);
  for (const auto& e : doc["entries"]) {
    EXPECT_EQ(e["values"]["constant"], 2.0);
    EXPECT_EQ(e["verdict"], "PASS");
  }
}

TEST(CheckTrace, ElongatedBox) {
  const auto r = run_cli("check-trace --fn 'exp(x1)*cos(x2)' --n 2 --box 0,1,0,10 --p 2 --format json");
  ASSERT_EQ(r.code, 0) << r.err;
  const auto doc = json_of(r);
  bool found = false;
  for (const auto& e : doc["entries"])
    if (e["inputs"]["face"] == "{1}") {
      EXPECT_EQ(e["inputs"]["j"], 2);
      EXPECT_NEAR(e["values"]["constant"].get<double>(), 1.1, 1e-15);
      found = true;
    }
  EXPECT_TRUE(found);
}

TEST(CheckTrace, OneDimensionIsUsageError) {
  const auto r = run_cli("check-trace --fn 'x1' --n 1");
  EXPECT_EQ(r.code, 64);
  EXPECT_NE(r.err.find("n >= 2"), std::string::npos) << r.err;
}

TEST(Gallery, DefaultRunHasIncreasingSup) {
  const auto r = run_cli("gallery");
  ASSERT_TRUE(r.code == 0 || r.code == 1) << r.err;
  const auto rows = csv_rows(r.out);
  ASSERT_GE(rows.size(), 9u);  // header + at least 8
  EXPECT_EQ(rows[0][1], "sup");
  for (std::size_t i = 2; i < rows.size(); ++i) EXPECT_GT(std::stod(rows[i][1]), std::stod(rows[i - 1][1]));
}

TEST(Gallery, ExplicitRadii) {
  const auto r = run_cli("gallery --radii 0.25,0.125");
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(csv_rows(r.out).size(), 3u);
}

TEST(Gallery, MalformedRadii) {
  EXPECT_EQ(run_cli("gallery --radii 0.25,abc").code, 64);
  EXPECT_EQ(run_cli("gallery --radii 0.125,0.25").code, 64);
}

TEST(Norms, ProductS1p) {
  const auto r = run_cli("norms --fn 'x1*x2' --box 0,1,0,1 --p 2 --kinds s1p --format json");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NEAR(json_of(r)["entries"][0]["values"]["value"].get<double>(), 4.0 / 3.0, 1e-10);
}

TEST(Norms, InfinityIsFlagged) {
  const auto r = run_cli("norms --fn 'x1*x2' --box 0,1,0,1 --p inf --kinds lp --format json");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(json_of(r)["entries"][0]["note"], "sampled lower bound");
  const auto h = run_cli("norms --fn 'x1*x2' --box 0,1,0,1 --p inf --kinds lp --format human");
  EXPECT_NE(h.out.find("sampled lower bound"), std::string::npos) << h.out;
}

TEST(Output, ByteIdenticalJsonAcrossRuns) {
  for (const char* args : {"verify-gnl --fn poly3d --boxes random:4 --seed 3 --format json",
                           "check-embedding --fn gauss2d --p 2 --pairs 500 --format json",
                           "norms --fn loglog2d --kinds lp,s1p,holder --format json"}) {
    const auto a = run_cli(args), b = run_cli(args);
    ASSERT_EQ(a.code, b.code) << args;
    EXPECT_EQ(a.out, b.out) << args;
  }
}

TEST(Output, ThreadCountDoesNotChangeJson) {
  const char* args = "verify-gnl --fn loglog3d --boxes random:3 --seed 9 --format json";
  const auto a = run_cli(std::string(args));
  setenv("MIXED_SMOOTH_THREADS", "1", 1);
  const auto b = run_cli(std::string(args));
  unsetenv("MIXED_SMOOTH_THREADS");
  EXPECT_EQ(a.out, b.out);
}

TEST(Output, UnwritableOutputIsIoError) {
  EXPECT_EQ(run_cli("norms --fn 'x1' --n 1 --output /nonexistent/dir/report.json").code, 74);
}

TEST(Output, FileOutputMatchesStdout) {
  const auto path = std::filesystem::temp_directory_path() / "mixsmooth_out.json";
  const auto a = run_cli("norms --fn 'x1*x2' --box 0,1,0,1 --format json --output " + path.string());
  ASSERT_EQ(a.code, 0) << a.err;
  const auto b = run_cli("norms --fn 'x1*x2' --box 0,1,0,1 --format json");
  EXPECT_EQ(slurp(path), b.out);
  std::filesystem::remove(path);
}

TEST(List, GalleryIds) {
  const auto r = run_cli("gallery --list");
  EXPECT_EQ(r.code, 0);
  for (const char* id : {"bump", "gauss", "poly", "sinexp", "loglog"}) EXPECT_NE(r.out.find(id), std::string::npos);
}
