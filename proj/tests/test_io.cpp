#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "sxpid/builtins.hpp"
#include "sxpid/io.hpp"

using namespace sxpid;

namespace {

JointDistribution from(const std::string& text, Format f) {
  std::istringstream in(text);
  return load_distribution(in, f);
}

std::string location_of(const std::string& text, Format f) {
  try {
    from(text, f);
  } catch (const DistributionError& e) {
    return e.location();
  }
  return "no error";
}

void expect_same(const JointDistribution& a, const JointDistribution& b) {
  EXPECT_EQ(a.target_alphabet(), b.target_alphabet());
  EXPECT_EQ(a.source_alphabets(), b.source_alphabets());
  ASSERT_EQ(a.support().size(), b.support().size());
  for (std::size_t k = 0; k < a.support().size(); ++k) {
    EXPECT_EQ(a.support()[k].r, b.support()[k].r);
    EXPECT_EQ(a.support()[k].p, b.support()[k].p);
  }
}

} // namespace

TEST(Csv, ParsesDecimalsAndFractions) {
  const auto d = from("t,s1,s2,p\n0,0,0,3/8\n1,1,1,0.375\n0,0,1,1/8\n1,1,0,0.125\n", Format::csv);
  EXPECT_EQ(d.n_sources(), 2u);
  EXPECT_EQ(d.source_alphabets()[0].name(), "s1");
  EXPECT_DOUBLE_EQ(d.mass({0, {0, 0}}), 0.375);
  ASSERT_TRUE(d.exact_masses().has_value());
  EXPECT_EQ((*d.exact_masses())[1], Rational(3, 8));
}

TEST(Csv, LabelsSortNumericallyThenLexically) {
  const auto d = from("t,a,p\n10,x,0.5\n9,y,0.5\n", Format::csv);
  EXPECT_EQ(d.target_alphabet().symbols(), (std::vector<std::string>{"9", "10"}));
  EXPECT_EQ(d.source_alphabets()[0].symbols(), (std::vector<std::string>{"x", "y"}));
}

TEST(Csv, ErrorsCarryLocations) {
  EXPECT_EQ(location_of("t,s1,p\n0,0,0.5\n1,1,-0.5\n", Format::csv), "row 2, field p");
  EXPECT_EQ(location_of("t,s1,p\n0,0,0.5\n0,0,0.5\n", Format::csv), "row 2");
  EXPECT_EQ(location_of("t,s1,p\n0,0,abc\n", Format::csv), "row 1, field p");
  EXPECT_THROW(from("t,s1,q\n0,0,1\n", Format::csv), DistributionError);
  EXPECT_THROW(from("t,s1,p\n0,0\n", Format::csv), DistributionError);
  EXPECT_THROW(from("t,s1,p\n0,0,0.4\n1,1,0.4\n", Format::csv), DistributionError);
}

TEST(Json, ParsesAlphabetsAndSupport) {
  const std::string doc = R"({
    "target_alphabet": {"name": "T", "symbols": ["a", "b"]},
    "source_alphabets": [["0", "1"], {"name": "B", "symbols": [0, 1]}],
    "support": [
      {"t": "a", "s": ["0", 0], "p": 0.5},
      {"t": "b", "s": ["1", 1], "p": "1/2"}
    ]
  })";
  const auto d = from(doc, Format::json);
  EXPECT_EQ(d.target_alphabet().name(), "T");
  EXPECT_EQ(d.source_alphabets()[1].name(), "B");
  EXPECT_DOUBLE_EQ(d.mass({1, {1, 1}}), 0.5);
  ASSERT_TRUE(d.exact_masses().has_value());
  EXPECT_EQ((*d.exact_masses())[0], Rational(1, 2));
}

TEST(Json, Errors) {
  EXPECT_THROW(from("{", Format::json), DistributionError);
  EXPECT_THROW(from(R"({"target_alphabet": ["0"], "source_alphabets": [["0"]],
                      "support": [{"t": "1", "s": ["0"], "p": 1}]})",
                    Format::json),
               DistributionError);
}

TEST(RoundTrip, CsvAndJsonPreserveDistributions) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    // CSV alphabets only list symbols that occur, so sparse supports go through JSON.
    const auto dense = oracle::random_distribution(rng, 1 + trial % 3, 2 + trial % 2, 2);
    for (Format f : {Format::csv, Format::json}) expect_same(dense, from(to_string(dense, f), f));
    const auto sparse = oracle::random_distribution(rng, 1 + trial % 3, 2 + trial % 2, 2, 0.4);
    expect_same(sparse, from(to_string(sparse, Format::json), Format::json));
  }
  for (const auto& name : builtin_names()) {
    const auto d = builtin(name);
    for (Format f : {Format::csv, Format::json}) expect_same(d, from(to_string(d, f), f));
  }
}

TEST(Files, ExtensionSelectsFormat) {
  const auto dir = std::filesystem::temp_directory_path();
  const auto csv = dir / "sxpid_io_test.csv";
  const auto json = dir / "sxpid_io_test.json";
  const auto d = rnderr_distribution();
  {
    std::ofstream(csv) << to_string(d, Format::csv);
    std::ofstream(json) << to_string(d, Format::json);
  }
  expect_same(d, load_distribution_file(csv));
  expect_same(d, load_distribution_file(json));
  std::filesystem::remove(csv);
  std::filesystem::remove(json);
  EXPECT_THROW(load_distribution_file(dir / "sxpid_missing_file.csv"), DistributionError);
}
