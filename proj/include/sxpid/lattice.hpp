#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace sxpid {

/// A source coalition as a bit mask: bit i set means source i+1 is a member.
using Coalition = std::uint32_t;

/// Largest source count the lattice enumerator supports. d(6) - 2 is already
/// 7.8 million nodes, which the dense order representation cannot hold.
inline constexpr std::size_t max_sources = 5;

/// Set of pairwise incomparable nonempty coalitions over n sources, kept in
/// canonical order: by coalition size, then lexicographically by index list.
class Antichain {
public:
  Antichain() = default;

  /// Drops every collection that strictly contains another and canonicalizes.
  /// Throws std::invalid_argument on an empty input, an empty collection, or a
  /// collection naming a source outside [n].
  static Antichain normalize(std::span<const Coalition> collections, std::size_t n);

  /// Parses "{1,2}{3}" style names; whitespace and letter case are ignored.
  static Antichain parse(std::string_view name, std::size_t n);

  std::size_t n() const noexcept { return n_; }
  const std::vector<Coalition>& collections() const noexcept { return collections_; }
  std::size_t size() const noexcept { return collections_.size(); }

  /// Up-closure of the collections inside the Boolean lattice of masks: bit m
  /// is set when some collection is a subset of mask m.
  std::uint64_t coverage() const noexcept;

  std::string name() const;

  bool operator==(const Antichain&) const = default;

private:
  Antichain(std::vector<Coalition> collections, std::size_t n)
      : collections_(std::move(collections)), n_(n) {}

  std::vector<Coalition> collections_;
  std::size_t n_ = 0;
};

/// Canonical total order on coalitions (size, then index list).
bool coalition_less(Coalition a, Coalition b);
/// Canonical total order on antichains (collection lists compared in canonical order).
bool antichain_less(const Antichain& a, const Antichain& b);

std::string coalition_name(Coalition c);

/// a precedes b iff every collection of b contains some collection of a.
bool leq(const Antichain& a, const Antichain& b);

/// Greatest lower bound: the normalized union of both collection sets.
Antichain meet(const Antichain& a, const Antichain& b);

/// Redundancy lattice of all antichains over n sources. Nodes are numbered in
/// a topological order (every strict lower bound has a smaller index).
class RedundancyLattice {
public:
  using NodeId = std::uint32_t;

  explicit RedundancyLattice(std::size_t n);

  /// Shared immutable instance per n, built on first use.
  static const RedundancyLattice& get(std::size_t n);

  std::size_t n() const noexcept { return n_; }
  std::size_t size() const noexcept { return nodes_.size(); }
  const Antichain& node(NodeId id) const { return nodes_.at(id); }
  const std::vector<Antichain>& nodes() const noexcept { return nodes_; }
  std::uint64_t coverage(NodeId id) const noexcept { return coverage_[id]; }

  NodeId bottom() const noexcept { return bottom_; }
  NodeId top() const noexcept { return top_; }

  std::optional<NodeId> find(const Antichain& a) const;
  std::optional<NodeId> find_coverage(std::uint64_t coverage) const;
  /// Throws std::invalid_argument for names that do not denote a node.
  NodeId parse(std::string_view name) const;

  bool leq(NodeId a, NodeId b) const noexcept;
  bool less(NodeId a, NodeId b) const noexcept { return a != b && leq(a, b); }
  NodeId meet(NodeId a, NodeId b) const;

  /// Maximal strict lower bounds, in increasing node order.
  std::span<const NodeId> children(NodeId id) const noexcept {
    return {children_.data() + child_offset_[id], child_offset_[id + 1] - child_offset_[id]};
  }

  /// Calls f(beta) for every beta strictly below `id`, in increasing order.
  template <typename F>
  void for_each_strictly_below(NodeId id, F&& f) const {
    const std::uint64_t* row = downset_.data() + static_cast<std::size_t>(id) * words_;
    for (std::size_t w = 0; w < words_; ++w) {
      std::uint64_t bits = row[w];
      while (bits) {
        const auto b = static_cast<NodeId>(w * 64 + static_cast<std::size_t>(__builtin_ctzll(bits)));
        bits &= bits - 1;
        if (b != id) f(b);
      }
    }
  }

  std::size_t strict_downset_size(NodeId id) const noexcept;

private:
  std::size_t n_;
  std::vector<Antichain> nodes_;
  std::vector<std::uint64_t> coverage_;
  std::unordered_map<std::uint64_t, NodeId> by_coverage_;
  std::size_t words_ = 0;
  std::vector<std::uint64_t> downset_; // row-major bitsets, reflexive
  std::vector<std::size_t> child_offset_;
  std::vector<NodeId> children_;
  NodeId bottom_ = 0;
  NodeId top_ = 0;
};

/// Recovers atoms from cumulative node values: pi(a) = v(a) - sum_{b < a} pi(b).
/// Throws std::invalid_argument unless `values` has one entry per node.
std::vector<double> moebius_invert(const RedundancyLattice& lattice, std::span<const double> values);

/// Sum of `atoms` over the downset of every node (the inverse of moebius_invert).
std::vector<double> downset_sums(const RedundancyLattice& lattice, std::span<const double> atoms);

/// Children of `alpha` sorted by increasing event probability, ties broken by
/// node order.
std::vector<RedundancyLattice::NodeId> ordered_children(const RedundancyLattice& lattice,
                                                        RedundancyLattice::NodeId alpha,
                                                        std::span<const double> event_prob);

/// Atom at `alpha` of the node function -log2 P(.) evaluated through the
/// inclusion-exclusion closed form over the children of alpha, where P is the
/// node-indexed measure `event_prob`. At the bottom node it is -log2 P(bottom).
/// Throws BoundaryError when a needed probability is not positive.
double closed_form_atom(const RedundancyLattice& lattice, RedundancyLattice::NodeId alpha,
                        std::span<const double> event_prob);

} // namespace sxpid
