#include <gtest/gtest.h>

#include <random>

#include "json.hpp"
#include "oracles.hpp"
#include "sxpid/builtins.hpp"
#include "sxpid/examples.hpp"
#include "sxpid/report.hpp"

using namespace sxpid;

TEST(Report, JsonRoundTripsWithPointwiseAndExactValues) {
  for (const char* name : {"xor", "pwunq", "rnderr", "parity:3"}) {
    const auto report = make_report(builtin(name), name, true, {1, true});
    EXPECT_TRUE(parse_json_report(render_json(report)) == report) << name;
  }
  std::mt19937_64 rng(3);
  const auto d = oracle::random_distribution(rng, 3, 3, 2, 0.3);
  const auto report = make_report(d, "random", true);
  EXPECT_TRUE(parse_json_report(render_json(report)) == report);
  const auto averages_only = make_report(d, "random", false);
  EXPECT_TRUE(averages_only.pointwise.empty());
  EXPECT_TRUE(parse_json_report(render_json(averages_only)) == averages_only);
}

TEST(Report, JsonLayout) {
  const auto report = make_report(xor_distribution(), "xor", true, {1, true});
  const auto doc = nlohmann::json::parse(render_json(report));
  EXPECT_EQ(doc["nodes"].size(), 4u);
  EXPECT_NEAR(doc["average"]["{1,2}"]["Pi"].get<double>(), std::log2(4.0 / 3.0), 1e-12);
  const auto& first = doc["pointwise"][0];
  EXPECT_EQ(first["realization"]["s"].size(), 2u);
  EXPECT_TRUE(first["nodes"]["{1}{2}"]["misinformative"].get<bool>());
  EXPECT_FALSE(first["nodes"]["{1}"]["misinformative"].get<bool>());
  EXPECT_EQ(first["nodes"]["{1}{2}"]["exact_log2_argument"]["pi"].get<std::string>(), "2/3");
  for (const char* key : {"i_plus", "i_minus", "i", "pi_plus", "pi_minus", "pi"})
    EXPECT_TRUE(first["nodes"]["{1}"].contains(key)) << key;
}

TEST(Report, MalformedJsonIsRejected) {
  EXPECT_THROW(parse_json_report("{"), DistributionError);
  EXPECT_THROW(parse_json_report(R"({"source": "x"})"), DistributionError);
}

TEST(Report, FilterKeepsRequestedNodesInOrder) {
  const auto report = make_report(pwunq_distribution(), "pwunq", true);
  const auto f = filter_nodes(report, {"{2}", " {1} {2} "});
  ASSERT_EQ(f.nodes, (std::vector<std::string>{"{2}", "{1}{2}"}));
  EXPECT_EQ(f.averages.atom, (std::vector<double>{0.5, 0.0}));
  ASSERT_EQ(f.pointwise.size(), 4u);
  EXPECT_EQ(f.pointwise[0].atom.size(), 2u);
  EXPECT_THROW(filter_nodes(report, {"{3}"}), std::invalid_argument);
}

TEST(Report, TablesShowFixedPointValues) {
  const auto table = render_table(make_report(pwunq_distribution(), "pwunq", true));
  EXPECT_NE(table.find("1.0000"), std::string::npos);
  EXPECT_NE(table.find("0.5000"), std::string::npos);
  EXPECT_EQ(table.find("-0.0000"), std::string::npos);
  const auto longer = render_table(make_report(parity_distribution(3), "parity:3", false), 3);
  EXPECT_NE(longer.find("{1,2}{1,3}{2,3}"), std::string::npos);
  EXPECT_NE(longer.find("-0.227"), std::string::npos);
}

TEST(Report, FormatFixed) {
  EXPECT_EQ(format_fixed(0.41503749, 4), "0.4150");
  EXPECT_EQ(format_fixed(-0.58496, 3), "-0.585");
  EXPECT_EQ(format_fixed(-1e-9, 4), "0.0000");
  EXPECT_EQ(format_fixed(2.0, 0), "2");
}

TEST(Examples, AllBuiltinExamplesPass) {
  for (const auto& name : example_names()) {
    if (name == "parity:5") continue;
    const auto res = run_example(name);
    EXPECT_TRUE(res.passed()) << name;
    for (const auto& c : res.checks) EXPECT_TRUE(c.passed()) << name << ": " << c.name;
    for (const auto& [what, ok] : res.conditions) EXPECT_TRUE(ok) << name << ": " << what;
  }
  EXPECT_THROW(run_example("nope"), std::invalid_argument);
  EXPECT_THROW(run_example("xor", std::string("{3}")), std::invalid_argument);
}
