#include "sxpid/lattice.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cctype>
#include <cmath>
#include <memory>
#include <mutex>

#include "sxpid/errors.hpp"

namespace sxpid {

namespace {

std::vector<std::size_t> indices(Coalition c) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; c; ++i, c >>= 1)
    if (c & 1u) out.push_back(i);
  return out;
}

void check_same_n(const Antichain& a, const Antichain& b) {
  if (a.n() != b.n())
    throw std::invalid_argument("antichains over different source counts (" + std::to_string(a.n()) +
                                " vs " + std::to_string(b.n()) + ")");
}

} // namespace

bool coalition_less(Coalition a, Coalition b) {
  const int pa = std::popcount(a), pb = std::popcount(b);
  if (pa != pb) return pa < pb;
  return indices(a) < indices(b);
}

bool antichain_less(const Antichain& a, const Antichain& b) {
  return std::lexicographical_compare(a.collections().begin(), a.collections().end(),
                                      b.collections().begin(), b.collections().end(), coalition_less);
}

std::string coalition_name(Coalition c) {
  std::string out = "{";
  bool first = true;
  for (auto i : indices(c)) {
    if (!first) out += ',';
    out += std::to_string(i + 1);
    first = false;
  }
  return out + "}";
}

Antichain Antichain::normalize(std::span<const Coalition> collections, std::size_t n) {
  if (n == 0 || n > 31) throw std::invalid_argument("source count must be in [1, 31]");
  if (collections.empty()) throw std::invalid_argument("an antichain needs at least one collection");
  const Coalition full = n >= 32 ? ~0u : ((1u << n) - 1u);
  std::vector<Coalition> unique(collections.begin(), collections.end());
  for (auto c : unique) {
    if (c == 0) throw std::invalid_argument("antichain collections must be nonempty");
    if (c & ~full) throw std::invalid_argument("collection " + coalition_name(c) + " exceeds [" +
                                               std::to_string(n) + "]");
  }
  std::sort(unique.begin(), unique.end());
  unique.erase(std::unique(unique.begin(), unique.end()), unique.end());
  std::vector<Coalition> kept;
  for (auto c : unique) {
    const bool has_subset = std::any_of(unique.begin(), unique.end(),
                                        [c](Coalition o) { return o != c && (o & c) == o; });
    if (!has_subset) kept.push_back(c);
  }
  std::sort(kept.begin(), kept.end(), coalition_less);
  return Antichain(std::move(kept), n);
}

Antichain Antichain::parse(std::string_view name, std::size_t n) {
  std::vector<Coalition> collections;
  std::size_t i = 0;
  auto skip = [&] {
    while (i < name.size() && std::isspace(static_cast<unsigned char>(name[i]))) ++i;
  };
  auto fail = [&](const std::string& why) {
    throw std::invalid_argument("bad node name '" + std::string(name) + "': " + why);
  };
  skip();
  while (i < name.size()) {
    if (name[i] != '{') fail("expected '{'");
    ++i;
    Coalition c = 0;
    bool expect_index = true;
    for (;;) {
      skip();
      if (i >= name.size()) fail("unterminated collection");
      if (name[i] == '}') {
        if (expect_index && c != 0) fail("trailing comma");
        ++i;
        break;
      }
      if (!expect_index) {
        if (name[i] != ',') fail("expected ',' or '}'");
        ++i;
        expect_index = true;
        continue;
      }
      if (!std::isdigit(static_cast<unsigned char>(name[i]))) fail("expected a source index");
      std::size_t value = 0;
      while (i < name.size() && std::isdigit(static_cast<unsigned char>(name[i]))) {
        value = value * 10 + static_cast<std::size_t>(name[i] - '0');
        if (value > 64) fail("source index too large");
        ++i;
      }
      if (value == 0 || value > n) fail("source index out of [1, " + std::to_string(n) + "]");
      c |= 1u << (value - 1);
      expect_index = false;
    }
    if (c == 0) fail("empty collection");
    collections.push_back(c);
    skip();
  }
  if (collections.empty()) fail("no collections");
  return normalize(collections, n);
}

std::uint64_t Antichain::coverage() const noexcept {
  std::uint64_t cov = 0;
  const std::uint32_t masks = 1u << n_;
  for (std::uint32_t m = 0; m < masks && m < 64; ++m) {
    for (auto c : collections_) {
      if ((c & m) == c) {
        cov |= std::uint64_t{1} << m;
        break;
      }
    }
  }
  return cov;
}

std::string Antichain::name() const {
  std::string out;
  for (auto c : collections_) out += coalition_name(c);
  return out;
}

bool leq(const Antichain& a, const Antichain& b) {
  check_same_n(a, b);
  return std::all_of(b.collections().begin(), b.collections().end(), [&](Coalition bc) {
    return std::any_of(a.collections().begin(), a.collections().end(),
                       [bc](Coalition ac) { return (ac & bc) == ac; });
  });
}

Antichain meet(const Antichain& a, const Antichain& b) {
  check_same_n(a, b);
  std::vector<Coalition> all(a.collections());
  all.insert(all.end(), b.collections().begin(), b.collections().end());
  return Antichain::normalize(all, a.n());
}

RedundancyLattice::RedundancyLattice(std::size_t n) : n_(n) {
  if (n < 1 || n > max_sources)
    throw std::invalid_argument("lattice enumeration supports 1 <= n <= " + std::to_string(max_sources) +
                                ", got " + std::to_string(n));

  std::vector<Coalition> masks;
  for (Coalition c = 1; c < (1u << n); ++c) masks.push_back(c);
  std::sort(masks.begin(), masks.end(), coalition_less);

  // Backtracking over canonical mask order; each antichain is produced once.
  std::vector<Coalition> chosen;
  auto comparable = [](Coalition a, Coalition b) { return (a & b) == a || (a & b) == b; };
  auto extend = [&](auto&& self, std::size_t from) -> void {
    for (std::size_t k = from; k < masks.size(); ++k) {
      const Coalition c = masks[k];
      if (std::any_of(chosen.begin(), chosen.end(), [&](Coalition o) { return comparable(o, c); }))
        continue;
      chosen.push_back(c);
      nodes_.push_back(Antichain::normalize(chosen, n));
      self(self, k + 1);
      chosen.pop_back();
    }
  };
  extend(extend, 0);

  std::vector<std::uint64_t> cov;
  for (const auto& a : nodes_) cov.push_back(a.coverage());
  std::vector<std::size_t> perm(nodes_.size());
  for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
  std::sort(perm.begin(), perm.end(), [&](std::size_t x, std::size_t y) {
    const int cx = std::popcount(cov[x]), cy = std::popcount(cov[y]);
    if (cx != cy) return cx > cy;
    return antichain_less(nodes_[x], nodes_[y]);
  });
  std::vector<Antichain> sorted;
  for (auto i : perm) {
    sorted.push_back(nodes_[i]);
    coverage_.push_back(cov[i]);
  }
  nodes_ = std::move(sorted);

  const std::size_t count = nodes_.size();
  for (std::size_t i = 0; i < count; ++i) by_coverage_.emplace(coverage_[i], static_cast<NodeId>(i));

  // a <= b exactly when the event set of b is inside the event set of a.
  words_ = (count + 63) / 64;
  downset_.assign(count * words_, 0);
  for (std::size_t b = 0; b < count; ++b) {
    std::uint64_t* row = downset_.data() + b * words_;
    for (std::size_t a = 0; a <= b; ++a)
      if ((coverage_[b] & ~coverage_[a]) == 0) row[a / 64] |= std::uint64_t{1} << (a % 64);
  }

  // Maximal strict lower bounds: scan the downset from the top; anything not
  // already below a found child is itself a child.
  child_offset_.push_back(0);
  std::vector<std::uint64_t> covered(words_);
  for (std::size_t a = 0; a < count; ++a) {
    std::fill(covered.begin(), covered.end(), 0);
    const std::uint64_t* row = downset_.data() + a * words_;
    std::vector<NodeId> kids;
    for (std::size_t b = a; b-- > 0;) {
      if (!(row[b / 64] >> (b % 64) & 1u)) continue;
      if (covered[b / 64] >> (b % 64) & 1u) continue;
      kids.push_back(static_cast<NodeId>(b));
      const std::uint64_t* sub = downset_.data() + b * words_;
      for (std::size_t w = 0; w < words_; ++w) covered[w] |= sub[w];
    }
    std::sort(kids.begin(), kids.end());
    children_.insert(children_.end(), kids.begin(), kids.end());
    child_offset_.push_back(children_.size());
  }

  Coalition full = (1u << n) - 1u;
  std::vector<Coalition> singletons;
  for (std::size_t i = 0; i < n; ++i) singletons.push_back(1u << i);
  bottom_ = *find(Antichain::normalize(singletons, n));
  top_ = *find(Antichain::normalize(std::span<const Coalition>(&full, 1), n));
}

const RedundancyLattice& RedundancyLattice::get(std::size_t n) {
  static std::array<std::once_flag, max_sources + 1> flags;
  static std::array<std::unique_ptr<RedundancyLattice>, max_sources + 1> cache;
  if (n < 1 || n > max_sources)
    throw std::invalid_argument("lattice enumeration supports 1 <= n <= " + std::to_string(max_sources) +
                                ", got " + std::to_string(n));
  std::call_once(flags[n], [n] { cache[n] = std::make_unique<RedundancyLattice>(n); });
  return *cache[n];
}

std::optional<RedundancyLattice::NodeId> RedundancyLattice::find(const Antichain& a) const {
  if (a.n() != n_) return std::nullopt;
  return find_coverage(a.coverage());
}

std::optional<RedundancyLattice::NodeId> RedundancyLattice::find_coverage(std::uint64_t coverage) const {
  auto it = by_coverage_.find(coverage);
  if (it == by_coverage_.end()) return std::nullopt;
  return it->second;
}

RedundancyLattice::NodeId RedundancyLattice::parse(std::string_view name) const {
  return *find(Antichain::parse(name, n_));
}

bool RedundancyLattice::leq(NodeId a, NodeId b) const noexcept {
  return downset_[static_cast<std::size_t>(b) * words_ + a / 64] >> (a % 64) & 1u;
}

RedundancyLattice::NodeId RedundancyLattice::meet(NodeId a, NodeId b) const {
  return by_coverage_.at(coverage_[a] | coverage_[b]);
}

std::size_t RedundancyLattice::strict_downset_size(NodeId id) const noexcept {
  std::size_t total = 0;
  const std::uint64_t* row = downset_.data() + static_cast<std::size_t>(id) * words_;
  for (std::size_t w = 0; w < words_; ++w) total += static_cast<std::size_t>(std::popcount(row[w]));
  return total - 1;
}

std::vector<double> moebius_invert(const RedundancyLattice& lattice, std::span<const double> values) {
  if (values.size() != lattice.size())
    throw std::invalid_argument("moebius_invert needs one value per node (" + std::to_string(lattice.size()) +
                                "), got " + std::to_string(values.size()));
  std::vector<double> atoms(values.size());
  for (RedundancyLattice::NodeId a = 0; a < lattice.size(); ++a) {
    double below = 0.0;
    lattice.for_each_strictly_below(a, [&](RedundancyLattice::NodeId b) { below += atoms[b]; });
    atoms[a] = values[a] - below;
  }
  return atoms;
}

std::vector<double> downset_sums(const RedundancyLattice& lattice, std::span<const double> atoms) {
  if (atoms.size() != lattice.size())
    throw std::invalid_argument("downset_sums needs one atom per node");
  std::vector<double> sums(atoms.size());
  for (RedundancyLattice::NodeId a = 0; a < lattice.size(); ++a) {
    double total = atoms[a];
    lattice.for_each_strictly_below(a, [&](RedundancyLattice::NodeId b) { total += atoms[b]; });
    sums[a] = total;
  }
  return sums;
}

std::vector<RedundancyLattice::NodeId> ordered_children(const RedundancyLattice& lattice,
                                                        RedundancyLattice::NodeId alpha,
                                                        std::span<const double> event_prob) {
  auto kids = lattice.children(alpha);
  std::vector<RedundancyLattice::NodeId> out(kids.begin(), kids.end());
  std::stable_sort(out.begin(), out.end(), [&](auto x, auto y) { return event_prob[x] < event_prob[y]; });
  return out;
}

double closed_form_atom(const RedundancyLattice& lattice, RedundancyLattice::NodeId alpha,
                        std::span<const double> event_prob) {
  if (event_prob.size() != lattice.size())
    throw std::invalid_argument("closed_form_atom needs one probability per node");
  const double p_alpha = event_prob[alpha];
  if (!(p_alpha > 0.0)) throw BoundaryError("zero event probability at node " + lattice.node(alpha).name());
  auto kids = ordered_children(lattice, alpha, event_prob);
  if (kids.empty()) return -std::log2(p_alpha);

  const double d1 = event_prob[kids[0]] - p_alpha;
  const std::size_t rest = kids.size() - 1;
  double total = 0.0;
  for (std::uint64_t subset = 0; subset < (std::uint64_t{1} << rest); ++subset) {
    std::uint64_t cov = lattice.coverage(alpha);
    if (subset != 0) {
      cov = 0;
      for (std::size_t j = 0; j < rest; ++j)
        if (subset >> j & 1u) cov |= lattice.coverage(kids[j + 1]);
    }
    const double p = event_prob[*lattice.find_coverage(cov)];
    if (!(p > 0.0)) throw BoundaryError("zero event probability in closed form at node " +
                                        lattice.node(alpha).name());
    const double term = std::log2((p + d1) / p);
    total += (std::popcount(subset) % 2 == 0) ? term : -term;
  }
  return total;
}

} // namespace sxpid
