#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "sxpid/lattice.hpp"

using namespace sxpid;
using NodeId = RedundancyLattice::NodeId;

namespace {

NodeId id_of(const RedundancyLattice& lat, const oracle::Collections& c) {
  auto id = lat.find(Antichain::normalize(c, lat.n()));
  EXPECT_TRUE(id.has_value());
  return id.value_or(0);
}

} // namespace

TEST(Lattice, SizesMatchBruteForceEnumeration) {
  for (std::size_t n = 1; n <= 4; ++n) {
    const auto& lat = RedundancyLattice::get(n);
    const auto brute = oracle::brute_force_antichains(n);
    EXPECT_EQ(lat.size(), brute.size()) << "n = " << n;
    for (const auto& c : brute) EXPECT_TRUE(lat.find(Antichain::normalize(c, n)).has_value());
  }
}

TEST(Lattice, DedekindCardinalities) {
  const std::size_t expected[] = {1, 4, 18, 166, 7579};
  for (std::size_t n = 1; n <= 5; ++n) EXPECT_EQ(RedundancyLattice::get(n).size(), expected[n - 1]);
}

TEST(Lattice, TwoSourceOrder) {
  const auto& lat = RedundancyLattice::get(2);
  ASSERT_EQ(lat.size(), 4u);
  EXPECT_EQ(lat.node(0).name(), "{1}{2}");
  EXPECT_EQ(lat.node(1).name(), "{1}");
  EXPECT_EQ(lat.node(2).name(), "{2}");
  EXPECT_EQ(lat.node(3).name(), "{1,2}");
  EXPECT_EQ(lat.bottom(), 0u);
  EXPECT_EQ(lat.top(), 3u);
}

TEST(Lattice, BottomAndTop) {
  for (std::size_t n = 1; n <= 4; ++n) {
    const auto& lat = RedundancyLattice::get(n);
    std::string bottom, top = "{";
    for (std::size_t i = 1; i <= n; ++i) {
      bottom += "{" + std::to_string(i) + "}";
      top += (i > 1 ? "," : "") + std::to_string(i);
    }
    top += "}";
    EXPECT_EQ(lat.node(lat.bottom()).name(), bottom);
    EXPECT_EQ(lat.node(lat.top()).name(), top);
    for (NodeId a = 0; a < lat.size(); ++a) {
      EXPECT_TRUE(lat.leq(lat.bottom(), a));
      EXPECT_TRUE(lat.leq(a, lat.top()));
    }
  }
}

TEST(Lattice, OrderMatchesDefinitionForAllPairs) {
  for (std::size_t n = 1; n <= 4; ++n) {
    const auto& lat = RedundancyLattice::get(n);
    for (NodeId a = 0; a < lat.size(); ++a)
      for (NodeId b = 0; b < lat.size(); ++b) {
        const bool def = oracle::precedes(lat.node(a).collections(), lat.node(b).collections());
        ASSERT_EQ(lat.leq(a, b), def) << lat.node(a).name() << " vs " << lat.node(b).name();
        ASSERT_EQ(leq(lat.node(a), lat.node(b)), def);
      }
  }
}

TEST(Lattice, NumberingIsTopological) {
  for (std::size_t n = 1; n <= 4; ++n) {
    const auto& lat = RedundancyLattice::get(n);
    for (NodeId a = 0; a < lat.size(); ++a)
      for (NodeId b = 0; b < lat.size(); ++b)
        if (lat.less(a, b)) ASSERT_LT(a, b);
  }
}

TEST(Lattice, MeetIsGreatestLowerBound) {
  for (std::size_t n = 2; n <= 3; ++n) {
    const auto& lat = RedundancyLattice::get(n);
    for (NodeId a = 0; a < lat.size(); ++a)
      for (NodeId b = 0; b < lat.size(); ++b) {
        const NodeId m = lat.meet(a, b);
        ASSERT_TRUE(lat.leq(m, a));
        ASSERT_TRUE(lat.leq(m, b));
        for (NodeId c = 0; c < lat.size(); ++c)
          if (lat.leq(c, a) && lat.leq(c, b)) ASSERT_TRUE(lat.leq(c, m));
        ASSERT_EQ(lat.node(m), meet(lat.node(a), lat.node(b)));
      }
  }
}

TEST(Lattice, ChildrenAreMaximalStrictLowerBounds) {
  for (std::size_t n = 1; n <= 4; ++n) {
    const auto& lat = RedundancyLattice::get(n);
    for (NodeId a = 0; a < lat.size(); ++a) {
      std::vector<NodeId> expected;
      for (NodeId b = 0; b < lat.size(); ++b) {
        if (!lat.less(b, a)) continue;
        bool maximal = true;
        for (NodeId c = 0; c < lat.size() && maximal; ++c)
          if (lat.less(b, c) && lat.less(c, a)) maximal = false;
        if (maximal) expected.push_back(b);
      }
      const auto kids = lat.children(a);
      ASSERT_EQ(std::vector<NodeId>(kids.begin(), kids.end()), expected) << lat.node(a).name();
    }
  }
}

TEST(Lattice, StrictDownsetSizes) {
  const auto& lat = RedundancyLattice::get(3);
  for (NodeId a = 0; a < lat.size(); ++a) {
    std::size_t count = 0;
    for (NodeId b = 0; b < lat.size(); ++b) count += lat.less(b, a);
    EXPECT_EQ(lat.strict_downset_size(a), count);
  }
}

TEST(Antichain, NormalizeDropsSupersetsAndSorts) {
  const Coalition c[] = {0b011, 0b100, 0b001, 0b111};
  const auto a = Antichain::normalize(c, 3);
  EXPECT_EQ(a.name(), "{1}{3}");
  EXPECT_THROW(Antichain::normalize(std::span<const Coalition>{}, 3), std::invalid_argument);
  const Coalition empty[] = {0};
  EXPECT_THROW(Antichain::normalize(empty, 3), std::invalid_argument);
  const Coalition outside[] = {0b1000};
  EXPECT_THROW(Antichain::normalize(outside, 3), std::invalid_argument);
}

TEST(Antichain, ParseIsWhitespaceTolerantAndCanonical) {
  const auto& lat = RedundancyLattice::get(3);
  EXPECT_EQ(Antichain::parse(" {2, 1} { 3 } ", 3).name(), "{3}{1,2}");
  EXPECT_EQ(lat.node(lat.parse("{1,2}{2,3}")).name(), "{1,2}{2,3}");
  EXPECT_EQ(lat.parse("{2,3}{1,2}"), lat.parse("{1,2}{2,3}"));
  EXPECT_THROW(lat.parse("{1}{4}"), std::invalid_argument);
  EXPECT_THROW(lat.parse("{1"), std::invalid_argument);
  EXPECT_THROW(lat.parse(""), std::invalid_argument);
  EXPECT_THROW(lat.parse("{}"), std::invalid_argument);
}

TEST(Antichain, LeqRejectsMismatchedSourceCounts) {
  EXPECT_THROW(leq(Antichain::parse("{1}", 2), Antichain::parse("{1}", 3)), std::invalid_argument);
}

TEST(Lattice, RejectsUnsupportedSizes) {
  EXPECT_THROW(RedundancyLattice(0), std::invalid_argument);
  EXPECT_THROW(RedundancyLattice(6), std::invalid_argument);
}

TEST(Moebius, InversionAndResummationAreInverse) {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> g;
  for (std::size_t n = 1; n <= 4; ++n) {
    const auto& lat = RedundancyLattice::get(n);
    std::vector<double> v(lat.size());
    for (auto& x : v) x = g(rng);
    const auto atoms = moebius_invert(lat, v);
    const auto back = downset_sums(lat, atoms);
    for (std::size_t i = 0; i < v.size(); ++i) EXPECT_NEAR(back[i], v[i], 1e-9);
  }
  EXPECT_THROW(moebius_invert(RedundancyLattice::get(2), std::vector<double>(3)), std::invalid_argument);
}

TEST(Moebius, MatchesBruteForceRecursion) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1, 1);
  const std::size_t n = 3;
  const auto& lat = RedundancyLattice::get(n);
  const auto nodes = oracle::brute_force_antichains(n);
  std::vector<double> v(nodes.size());
  for (auto& x : v) x = u(rng);
  std::vector<double> by_id(lat.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) by_id[id_of(lat, nodes[i])] = v[i];
  const auto atoms = moebius_invert(lat, by_id);
  // Recursion on the brute-force family, ordered by downset size.
  std::vector<double> ref(nodes.size(), 0.0);
  std::vector<std::size_t> order(nodes.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  auto down = [&](std::size_t i) {
    std::size_t c = 0;
    for (const auto& m : nodes) c += oracle::precedes(m, nodes[i]);
    return c;
  };
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return down(a) < down(b); });
  for (auto i : order) {
    double below = 0.0;
    for (std::size_t j = 0; j < nodes.size(); ++j)
      if (j != i && oracle::precedes(nodes[j], nodes[i])) below += ref[j];
    ref[i] = v[i] - below;
  }
  for (std::size_t i = 0; i < nodes.size(); ++i) EXPECT_NEAR(atoms[id_of(lat, nodes[i])], ref[i], 1e-12);
}

TEST(ClosedForm, ChildrenOrderingIsStableOnTies) {
  const auto& lat = RedundancyLattice::get(2);
  const std::vector<double> p{0.25, 0.5, 0.5, 1.0};
  const auto kids = ordered_children(lat, lat.top(), p);
  ASSERT_EQ(kids.size(), 2u);
  EXPECT_EQ(kids[0], 1u);
  EXPECT_EQ(kids[1], 2u);
}

TEST(ClosedForm, BottomAndBoundary) {
  const auto& lat = RedundancyLattice::get(2);
  std::vector<double> p{0.25, 0.5, 0.5, 0.75};
  EXPECT_DOUBLE_EQ(closed_form_atom(lat, lat.bottom(), p), 2.0);
  p[0] = 0.0;
  EXPECT_THROW(closed_form_atom(lat, lat.bottom(), p), BoundaryError);
}
