#pragma once

// Independent reference implementations used only by the tests. Nothing here
// goes through the lattice class or the agreement-profile engine.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <vector>

#include "sxpid/dist.hpp"
#include "sxpid/lattice.hpp"

namespace oracle {

using sxpid::Alphabet;
using sxpid::JointDistribution;
using sxpid::Realization;
using sxpid::SupportPoint;
using sxpid::Symbol;

using Collections = std::vector<std::uint32_t>;

inline bool subset_of(std::uint32_t a, std::uint32_t b) { return (a & b) == a; }

/// Every antichain of nonempty subsets of [n], found by testing all families.
inline std::vector<Collections> brute_force_antichains(std::size_t n) {
  const std::uint32_t coalitions = (1u << n) - 1; // masks 1..2^n-1
  std::vector<Collections> out;
  for (std::uint64_t family = 1; family < (std::uint64_t{1} << coalitions); ++family) {
    Collections c;
    for (std::uint32_t j = 0; j < coalitions; ++j)
      if (family >> j & 1u) c.push_back(j + 1);
    bool antichain = true;
    for (std::size_t i = 0; i < c.size() && antichain; ++i)
      for (std::size_t j = 0; j < c.size() && antichain; ++j)
        if (i != j && subset_of(c[i], c[j])) antichain = false;
    if (antichain) out.push_back(c);
  }
  return out;
}

/// a precedes b: every collection of b contains a collection of a.
inline bool precedes(const Collections& a, const Collections& b) {
  return std::all_of(b.begin(), b.end(), [&](std::uint32_t y) {
    return std::any_of(a.begin(), a.end(), [&](std::uint32_t x) { return subset_of(x, y); });
  });
}

inline bool agrees(const Realization& x, const Realization& r, std::uint32_t coalition) {
  for (std::size_t i = 0; i < r.s.size(); ++i)
    if ((coalition >> i & 1u) && x.s[i] != r.s[i]) return false;
  return true;
}

/// P(union of the coalition events at r), optionally intersected with {T = r.t}.
inline double union_probability(const JointDistribution& d, const Realization& r, const Collections& alpha,
                                bool with_target) {
  double p = 0.0;
  for (const auto& pt : d.support()) {
    if (with_target && pt.r.t != r.t) continue;
    if (std::any_of(alpha.begin(), alpha.end(), [&](std::uint32_t c) { return agrees(pt.r, r, c); })) p += pt.p;
  }
  return p;
}

inline double target_probability(const JointDistribution& d, Symbol t) {
  double p = 0.0;
  for (const auto& pt : d.support())
    if (pt.r.t == t) p += pt.p;
  return p;
}

struct PointwiseValues {
  std::vector<Collections> nodes;
  std::vector<double> shared_plus, shared_minus, atom_plus, atom_minus;
};

/// Node values and atoms by the defining recursion over brute-force antichains.
inline PointwiseValues pointwise(const JointDistribution& d, const Realization& r) {
  PointwiseValues v;
  v.nodes = brute_force_antichains(d.n_sources());
  const std::size_t m = v.nodes.size();
  const double pt = target_probability(d, r.t);
  for (const auto& a : v.nodes) {
    v.shared_plus.push_back(-std::log2(union_probability(d, r, a, false)));
    v.shared_minus.push_back(std::log2(pt) - std::log2(union_probability(d, r, a, true)));
  }
  // Process nodes by downset size so every strict lower bound comes first.
  std::vector<std::size_t> order(m), down(m, 0);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j)
      if (precedes(v.nodes[j], v.nodes[i])) ++down[i];
  for (std::size_t i = 0; i < m; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return down[a] < down[b]; });
  v.atom_plus.assign(m, 0.0);
  v.atom_minus.assign(m, 0.0);
  for (std::size_t i : order) {
    double bp = 0.0, bm = 0.0;
    for (std::size_t j = 0; j < m; ++j)
      if (j != i && precedes(v.nodes[j], v.nodes[i])) {
        bp += v.atom_plus[j];
        bm += v.atom_minus[j];
      }
    v.atom_plus[i] = v.shared_plus[i] - bp;
    v.atom_minus[i] = v.shared_minus[i] - bm;
  }
  return v;
}

/// Full-grid distribution with masses drawn uniformly from [lo, 1] and
/// normalized; with `zero_fraction` > 0 some cells are dropped at random.
inline JointDistribution random_distribution(std::mt19937_64& rng, std::size_t n, std::size_t target_size = 2,
                                             std::size_t source_size = 2, double zero_fraction = 0.0,
                                             double lo = 0.0) {
  std::uniform_real_distribution<double> mass(lo, 1.0), coin(0.0, 1.0);
  std::vector<Alphabet> sources;
  std::size_t cells = target_size;
  for (std::size_t i = 0; i < n; ++i) {
    sources.push_back(Alphabet::range("s" + std::to_string(i + 1), source_size));
    cells *= source_size;
  }
  std::vector<SupportPoint> support;
  double total = 0.0;
  for (std::size_t k = 0; k < cells; ++k) {
    std::size_t rest = k;
    Realization r;
    r.s.resize(n);
    for (std::size_t i = n; i-- > 0;) {
      r.s[i] = static_cast<Symbol>(rest % source_size);
      rest /= source_size;
    }
    r.t = static_cast<Symbol>(rest);
    if (zero_fraction > 0.0 && coin(rng) < zero_fraction && !(support.empty() && k + 1 == cells)) continue;
    const double p = mass(rng) + 1e-3;
    support.push_back({r, p});
    total += p;
  }
  for (auto& s : support) s.p /= total;
  return JointDistribution(Alphabet::range("t", target_size), std::move(sources), std::move(support));
}

} // namespace oracle
