#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>

#include <json.hpp>

#include "multimatch/cli.hpp"
#include "multimatch/io.hpp"
#include "support.hpp"

namespace mm = multimatch;
namespace fs = std::filesystem;

namespace {

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("multimatch_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
    ::setenv("MULTIMATCH_LOG", "error", 1);
  }
  void TearDown() override { fs::remove_all(dir_); }

  int run(std::vector<std::string> args) {
    args.insert(args.begin(), "multimatch");
    std::vector<char*> argv;
    for (auto& a : args) argv.push_back(a.data());
    out_.str("");
    err_.str("");
    return mm::run_cli(static_cast<int>(argv.size()), argv.data(), out_, err_);
  }

  static std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  }

  fs::path tripartite_edges() {
    const fs::path p = dir_ / "tripartite.csv";
    std::ofstream out(p);
    mm::write_edges_csv(out, mm::testing::tripartite_graph());
    return p;
  }

  static double matching_file_weight(const fs::path& p) {
    std::ifstream in(p);
    std::string line;
    double total = 0;
    while (std::getline(in, line)) total += nlohmann::json::parse(line)["weight"].get<double>();
    return total;
  }

  fs::path dir_;
  std::ostringstream out_, err_;
};

std::size_t count_lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

}  // namespace

TEST_F(Cli, GenerateWritesThreeFilesWithExpectedEdgeCount) {
  ASSERT_EQ(run({"generate", "--entities", "100", "--sources", "3", "--features", "5", "--sigma", "0.06", "--seed",
                 "7", "--out", (dir_ / "w").string()}),
            mm::kExitOk);
  EXPECT_EQ(count_lines(slurp(dir_ / "w" / "edges.csv")), 30000u + 1u);
  EXPECT_EQ(count_lines(slurp(dir_ / "w" / "truth.csv")), 300u + 1u);
  EXPECT_TRUE(fs::exists(dir_ / "w" / "world.json"));
  const auto manifest = nlohmann::json::parse(slurp(dir_ / "w" / "manifest.json"));
  EXPECT_EQ(manifest["command"], "generate");
  EXPECT_EQ(manifest["config"]["seed"], 7);
}

TEST_F(Cli, GenerateIsByteIdenticalForSameSeed) {
  for (const char* d : {"a", "b"})
    ASSERT_EQ(run({"generate", "--entities", "20", "--seed", "3", "--out", (dir_ / d).string()}), mm::kExitOk);
  EXPECT_EQ(slurp(dir_ / "a" / "edges.csv"), slurp(dir_ / "b" / "edges.csv"));
  EXPECT_EQ(slurp(dir_ / "a" / "truth.csv"), slurp(dir_ / "b" / "truth.csv"));
}

TEST_F(Cli, NegativeSigmaIsUsageError) {
  EXPECT_EQ(run({"generate", "--sigma", "-1", "--out", dir_.string()}), mm::kExitUsage);
}

TEST_F(Cli, UnknownAlgorithmIsUsageError) {
  EXPECT_EQ(run({"solve", "--algorithm", "hungarian", "--edges", tripartite_edges().string()}), mm::kExitUsage);
}

TEST_F(Cli, MissingSubcommandIsUsageError) { EXPECT_EQ(run({}), mm::kExitUsage); }

TEST_F(Cli, HelpExitsCleanly) {
  EXPECT_EQ(run({"--help"}), mm::kExitOk);
  EXPECT_NE(out_.str().find("solve"), std::string::npos);
}

TEST_F(Cli, SolveExactBruteOnTripartite) {
  ASSERT_EQ(run({"solve", "--algorithm", "exact-brute", "--edges", tripartite_edges().string(), "--threshold", "0",
                 "--out", (dir_ / "o").string()}),
            mm::kExitOk);
  EXPECT_NEAR(matching_file_weight(dir_ / "o" / "matching.jsonl"), 8.1, 1e-9);
  const auto manifest = nlohmann::json::parse(slurp(dir_ / "o" / "manifest.json"));
  EXPECT_EQ(manifest["inputs"]["edges"]["sha256"].get<std::string>().size(), 64u);
  EXPECT_NEAR(manifest["summary"]["total_weight"].get<double>(), 8.1, 1e-9);
}

TEST_F(Cli, SolveSequentialWithOrder) {
  ASSERT_EQ(run({"solve", "--algorithm", "sequential", "--edges", tripartite_edges().string(), "--order", "1,2,3",
                 "--out", (dir_ / "o").string()}),
            mm::kExitOk);
  EXPECT_NEAR(matching_file_weight(dir_ / "o" / "matching.jsonl"), 6.4, 1e-9);
}

TEST_F(Cli, SolveMpOnEmptyEdgeFile) {
  const fs::path empty = dir_ / "empty.csv";
  std::ofstream(empty) << "source_a,entity_a,source_b,entity_b,score\n";
  ASSERT_EQ(run({"solve", "--algorithm", "mp", "--edges", empty.string(), "--out", (dir_ / "o").string()}),
            mm::kExitOk);
  EXPECT_EQ(slurp(dir_ / "o" / "matching.jsonl"), "");
  const auto manifest = nlohmann::json::parse(slurp(dir_ / "o" / "manifest.json"));
  EXPECT_TRUE(manifest["summary"]["mp"]["converged"].get<bool>());
  EXPECT_LE(manifest["summary"]["mp"]["iterations"].get<int>(), 1);
  const std::string diag = slurp(dir_ / "o" / "diagnostics.csv");
  EXPECT_EQ(diag.substr(0, diag.find('\n')), "iteration,changed_fraction,total_weight");
}

TEST_F(Cli, SolveExactBruteOverGuardExitsThree) {
  ASSERT_EQ(run({"generate", "--entities", "12", "--out", (dir_ / "w").string()}), mm::kExitOk);
  EXPECT_EQ(run({"solve", "--algorithm", "exact-brute", "--edges", (dir_ / "w" / "edges.csv").string(), "--out",
                 (dir_ / "o").string()}),
            mm::kExitResource);
}

TEST_F(Cli, UnreadableOrMalformedInputExitsTwo) {
  EXPECT_EQ(run({"solve", "--algorithm", "greedy", "--edges", (dir_ / "missing.csv").string(), "--out",
                 (dir_ / "o").string()}),
            mm::kExitData);
  const fs::path bad = dir_ / "bad.csv";
  std::ofstream(bad) << "source_a,entity_a,source_b,entity_b,score\nA,x,B,y,-1\n";
  EXPECT_EQ(run({"solve", "--algorithm", "greedy", "--edges", bad.string(), "--out", (dir_ / "o").string()}),
            mm::kExitData);
  EXPECT_NE(err_.str().find("line 2"), std::string::npos);
}

TEST_F(Cli, SolveWithTruthWritesPrCsv) {
  ASSERT_EQ(run({"generate", "--entities", "15", "--sigma", "0.01", "--out", (dir_ / "w").string()}), mm::kExitOk);
  ASSERT_EQ(run({"solve", "--algorithm", "greedy", "--edges", (dir_ / "w" / "edges.csv").string(), "--truth",
                 (dir_ / "w" / "truth.csv").string(), "--metric", "synthetic", "--threshold", "0.5", "--out",
                 (dir_ / "o").string()}),
            mm::kExitOk);
  const std::string pr = slurp(dir_ / "o" / "pr.csv");
  EXPECT_EQ(pr.substr(0, pr.find('\n')), "threshold,precision,recall,f1,total_weight,algorithm,sources");
  EXPECT_EQ(count_lines(pr), 2u);
}

TEST_F(Cli, SweepDefaultsGiveSixteenThresholdsPerAlgorithm) {
  ASSERT_EQ(run({"generate", "--entities", "15", "--out", (dir_ / "w").string()}), mm::kExitOk);
  ASSERT_EQ(run({"sweep", "--edges", (dir_ / "w" / "edges.csv").string(), "--truth",
                 (dir_ / "w" / "truth.csv").string(), "--algorithms", "mp,greedy", "--jobs", "2", "--out",
                 (dir_ / "s").string()}),
            mm::kExitOk);
  EXPECT_EQ(count_lines(slurp(dir_ / "s" / "pr.csv")), 1u + 2u * 16u);
}

TEST_F(Cli, SweepSingleThreshold) {
  ASSERT_EQ(run({"generate", "--entities", "10", "--out", (dir_ / "w").string()}), mm::kExitOk);
  ASSERT_EQ(run({"sweep", "--edges", (dir_ / "w" / "edges.csv").string(), "--truth",
                 (dir_ / "w" / "truth.csv").string(), "--algorithms", "greedy", "--from", "0.5", "--to", "0.5",
                 "--out", (dir_ / "s").string()}),
            mm::kExitOk);
  EXPECT_EQ(count_lines(slurp(dir_ / "s" / "pr.csv")), 2u);
}

TEST_F(Cli, SweepWithoutTruthIsUsageError) {
  EXPECT_EQ(run({"sweep", "--edges", tripartite_edges().string()}), mm::kExitUsage);
}

TEST_F(Cli, BenchRowsPerGridPoint) {
  ASSERT_EQ(run({"bench", "--entities-grid", "10,20", "--sources-grid", "3", "--algorithms", "greedy,mp", "--out",
                 (dir_ / "b").string()}),
            mm::kExitOk);
  const std::string csv = slurp(dir_ / "b" / "bench.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "algorithm,m,n,seconds,iterations");
  EXPECT_EQ(count_lines(csv), 1u + 4u);
}

TEST_F(Cli, BenchEmptyGridWritesHeaderOnly) {
  ASSERT_EQ(run({"bench", "--entities-grid", "", "--out", (dir_ / "b").string()}), mm::kExitOk);
  EXPECT_EQ(slurp(dir_ / "b" / "bench.csv"), "algorithm,m,n,seconds,iterations\n");
}

TEST_F(Cli, DemoPrintsBothWeights) {
  ASSERT_EQ(run({"demo"}), mm::kExitOk);
  EXPECT_NE(out_.str().find("sequential: weight 6.4"), std::string::npos);
  EXPECT_NE(out_.str().find("exact-brute: weight 8.1"), std::string::npos);
}
