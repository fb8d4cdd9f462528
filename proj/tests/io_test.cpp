#include <gtest/gtest.h>

#include <sstream>

#include "ssrank/io.hpp"

namespace ssrank {
namespace {

TEST(FormatNumber, TwelveDigitsAfterTheLeadingOne) {
  EXPECT_EQ(format_number(std::sqrt(2.0)), "1.414213562373");
  EXPECT_EQ(format_number(0.25), "0.25");
  EXPECT_EQ(format_number(1.0 / 3), "0.3333333333333");
  EXPECT_EQ(format_number(LogReal::pow2(-5000)), "2^-5000");
}

TEST(VectorFile, RoundTrip) {
  std::istringstream in("# fork\ne=0.1\n1 = 1\n\n2=1 # second child\n");
  const SparseTreeVector z = read_vector(in);
  EXPECT_EQ(z, (SparseTreeVector{{Node{}, 0.1}, {Node{1}, 1.0}, {Node{2}, 1.0}}));
  std::stringstream text;
  write_vector(text, z);
  EXPECT_EQ(read_vector(text), z);
}

TEST(VectorFile, Errors) {
  std::istringstream dup("1=1\n1=2\n");
  EXPECT_THROW(read_vector(dup), FormatError);
  std::istringstream no_eq("1 1\n");
  EXPECT_THROW(read_vector(no_eq), FormatError);
  std::istringstream bad_token("1.0=1\n");
  EXPECT_THROW(read_vector(bad_token), FormatError);
  std::istringstream bad_value("1=abc\n");
  EXPECT_THROW(read_vector(bad_value), FormatError);
}

TEST(TreeFile, ClosureWithWarningFlag) {
  std::istringstream open_file("1.2\n# comment\n3\n");
  const TreeFile tf = read_tree(open_file);
  EXPECT_FALSE(tf.was_closed);
  EXPECT_EQ(tf.tree.nodes(), (NodeSet{Node{}, Node{1}, Node{3}, Node{1, 2}}));
  std::stringstream text;
  write_tree(text, tf.tree);
  const TreeFile again = read_tree(text);
  EXPECT_TRUE(again.was_closed);
  EXPECT_EQ(again.tree, tf.tree);
}

TEST(FamilyFile, BlankLineIsEmptySet) {
  std::istringstream in("\n1\n2,3\n3\n2\n");
  const FiniteFamily fam = read_family(in);
  EXPECT_EQ(fam, schreier_restrict(SchreierIndex(1), 3));
  std::stringstream text;
  write_family(text, fam);
  EXPECT_EQ(text.str(), "\n1\n2\n3\n2,3\n");
  EXPECT_EQ(read_family(text), fam);
  std::istringstream bad("1,x\n");
  EXPECT_THROW(read_family(bad), FormatError);
}

TEST(OperatorFile, RoundTrip) {
  const OperatorSection op({{{Node{}, 1.0}}, {}, {{Node{1, 2}, -0.5}, {Node{3}, 2.0}}});
  std::stringstream text(operator_json(op).dump());
  EXPECT_EQ(read_operator(text), op);
  std::istringstream wrong_m(R"({"M": 2, "columns": [{}]})");
  EXPECT_THROW(read_operator(wrong_m), FormatError);
  std::istringstream not_json("{");
  EXPECT_THROW(read_operator(not_json), FormatError);
  std::istringstream bad_value(R"({"M": 1, "columns": [{"1": "x"}]})");
  EXPECT_THROW(read_operator(bad_value), FormatError);
}

TEST(ReportJson, FieldsAndHugeValues) {
  const ConstructionParams params(2, 0.1, 1);
  const ConstructionReport rep = construct(params, *make_family(FamilyKind::antichain, params.exps(), 0));
  const auto j = report_json(rep);
  std::vector<std::string> keys;
  for (const auto& [k, v] : j.items()) keys.push_back(k);
  EXPECT_EQ(keys, (std::vector<std::string>{"params", "N", "rounds", "F", "a", "checks", "pass"}));
  std::vector<std::string> checks;
  for (const auto& [k, v] : j["checks"].items()) checks.push_back(k);
  EXPECT_EQ(checks,
            (std::vector<std::string>{"s2", "lp_norm", "z_norms", "seg_bounds", "aggregate", "final_y_norm"}));
  EXPECT_EQ(j["N"], 160000);
  EXPECT_TRUE(j["pass"].get<bool>());
  const auto& last = j["rounds"].back();
  EXPECT_TRUE(last["k"].contains("log2"));
  EXPECT_TRUE(last["eps"].contains("log2"));
  EXPECT_EQ(j["a"].size(), rep.selection.N);
}

TEST(ReportJson, UnboundedChecksAreNull) {
  const ConstructionParams params(1, 0.5, 1);
  const AnchoredFamily zero("zero", SparseTreeVector{}, params.exps());
  const auto j = report_json(construct(params, zero));
  EXPECT_TRUE(j["checks"]["seg_bounds"][1]["bound"].is_null());
  EXPECT_EQ(j["checks"]["final_y_norm"]["value"], 0.0);
}

}  // namespace
}  // namespace ssrank
