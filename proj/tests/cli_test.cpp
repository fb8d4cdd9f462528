#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli_app.hpp"

namespace ssrank::cli {
namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result call(const std::vector<std::string>& args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string sample(const std::string& name) { return std::string(SSRANK_SAMPLES_DIR) + "/" + name; }

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("ssrank_cli_test_" + name)).string();
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

TEST(Cli, NormOfFork) {
  const Result r = call({"norm", "--p", "1", "--q", "2", "--vector", sample("fork.vec")});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "1.414213562373\n");
}

TEST(Cli, NormWithOracle) {
  const Result r = call({"norm", "--p", "1", "--q", "2", "--vector", sample("fork.vec"), "--oracle"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("agree"), std::string::npos);
}

TEST(Cli, MaxSegment) {
  const Result r = call({"maxseg", "--p", "1", "--vector", sample("fork.vec")});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "1.1\ne 1\n");
}

TEST(Cli, SchreierMember) {
  Result r = call({"schreier", "member", "--xi", "2", "--set", "2,3,4,6,7"});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "true\n");
  r = call({"schreier", "member", "--xi", "1", "--set", "1,2"});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "false\n");
  EXPECT_EQ(call({"schreier", "member", "--xi", "0", "--set", "1"}).code, 2);
  EXPECT_EQ(call({"schreier", "member", "--xi", "1", "--set", "1,x"}).code, 2);
}

TEST(Cli, SchreierRestrictWritesFamilyFile) {
  const std::string path = temp_path("s1.fam");
  const Result r = call({"schreier", "restrict", "--xi", "1", "--max", "3", "--out", path});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "sets 5 order 3\n");
  EXPECT_EQ(slurp(path), "\n1\n2\n3\n2,3\n");
  std::remove(path.c_str());
}

TEST(Cli, TreeCommands) {
  EXPECT_EQ(call({"tree", "order", "--tree", sample("chain.tree")}).out, "4\n");
  EXPECT_EQ(call({"tree", "derivative", "--tree", sample("chain.tree")}).out, "e\n1\n1.1\n");
  EXPECT_EQ(call({"tree", "chi", "--node", "1.1"}).out, "5\n");
  EXPECT_EQ(call({"tree", "unchi", "--index", "8"}).out, "2.1\n");
  EXPECT_EQ(call({"tree", "unchi", "--index", "0"}).code, 2);
}

TEST(Cli, TreeFileNotClosedWarns) {
  const std::string path = temp_path("open.tree");
  std::ofstream(path) << "1.1\n";
  const Result r = call({"tree", "order", "--tree", path});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "3\n");
  EXPECT_NE(r.err.find("warning"), std::string::npos);
  std::remove(path.c_str());
}

TEST(Cli, HsSectionIsReadableOperator) {
  const Result r = call({"hs", "--tree", sample("chain.tree"), "--max", "5"});
  ASSERT_EQ(r.code, 0);
  std::istringstream in(r.out);
  const OperatorSection op = read_operator(in);
  std::istringstream tree_in(slurp(sample("chain.tree")));
  EXPECT_EQ(op, hs_section(read_tree(tree_in).tree, 5));
}

TEST(Cli, Isometry) {
  const Result r =
      call({"isom", "--tree", sample("chain.tree"), "--prefix", "1.1", "--coeffs", "3,4", "--p", "2", "--q", "4"});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "lhs 5\nrhs 5\npass true\n");
  // the branch 1.1.1.1 leaves the tree
  EXPECT_EQ(call({"isom", "--tree", sample("chain.tree"), "--prefix", "1.1", "--coeffs", "1,1,1,1", "--p", "2",
                  "--q", "4"})
                .code,
            2);
}

TEST(Cli, SingTreeOfEmbedding) {
  const Result r = call({"singtree", "--embed", "6", "--m", "1", "--universe", "6", "--cap", "3"});
  ASSERT_EQ(r.code, 0);
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["order"], 2);
  EXPECT_EQ(j["nodes"].size(), 7u);
  EXPECT_EQ(call({"singtree", "--m", "1", "--universe", "6", "--cap", "3"}).code, 2);
}

TEST(Cli, SingTreeFromOperatorFile) {
  const Result r = call({"singtree", "--op", sample("hs_chain.op.json"), "--m", "2", "--universe", "5", "--cap", "3",
                         "--seed", "1"});
  ASSERT_EQ(r.code, 0);
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_GE(j["order"].get<int>(), 2);
}

TEST(Cli, ConstructAcceptanceRun) {
  const Result r = call({"construct", "--p", "1", "--delta", "0.5", "--theta", "1", "--family", "antichain", "--seed",
                         "7"});
  ASSERT_EQ(r.code, 0);
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_TRUE(j["pass"].get<bool>());
  EXPECT_LE(j["checks"]["final_y_norm"]["value"].get<double>(), 0.5);
  EXPECT_EQ(j["N"], 16);
}

TEST(Cli, ConstructFailureExitsOne) {
  const Result r = call({"construct", "--p", "1", "--delta", "0.5", "--theta", "1", "--family", "antichain",
                         "--width-base", "4"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("round 3"), std::string::npos);
}

TEST(Cli, DeterministicReports) {
  const std::vector<std::string> construct{"construct", "--p",      "1.5",  "--delta", "0.5", "--theta",
                                           "2",         "--family", "comb", "--seed",  "9"};
  EXPECT_EQ(call(construct).out, call(construct).out);
  const std::vector<std::string> singtree{"singtree", "--op",  sample("hs_chain.op.json"), "--m",      "3",
                                          "--universe", "5",   "--cap",                    "3",        "--seed",
                                          "4",          "--threads", "3"};
  EXPECT_EQ(call(singtree).out, call(singtree).out);
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(call({}).code, 2);
  EXPECT_EQ(call({"frobnicate"}).code, 2);
  EXPECT_EQ(call({"norm", "--p", "1", "--vector", sample("fork.vec")}).code, 2);
  EXPECT_EQ(call({"norm", "--p", "1", "--q", "2", "--vector", sample("fork.vec"), "--bogus", "1"}).code, 2);
  EXPECT_EQ(call({"norm", "--p", "1", "--q", "0.5", "--vector", sample("fork.vec")}).code, 2);
  EXPECT_EQ(call({"norm", "--p", "1", "--q", "2", "--vector", "/nonexistent.vec"}).code, 2);
  EXPECT_EQ(call({"construct", "--p", "1", "--delta", "0.5", "--theta", "1", "--family", "tree"}).code, 2);
  EXPECT_EQ(call({"--help"}).code, 0);
}

}  // namespace
}  // namespace ssrank::cli
