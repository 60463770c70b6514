#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "sxpid/errors.hpp"
#include "sxpid/rational.hpp"

namespace sxpid {

using Symbol = std::uint32_t;

class Alphabet {
public:
  Alphabet() = default;
  Alphabet(std::string name, std::vector<std::string> symbols);

  /// Symbols "0", "1", ..., "size-1".
  static Alphabet range(std::string name, std::size_t size);

  const std::string& name() const noexcept { return name_; }
  const std::vector<std::string>& symbols() const noexcept { return symbols_; }
  std::size_t size() const noexcept { return symbols_.size(); }
  const std::string& label(Symbol s) const { return symbols_.at(s); }
  std::optional<Symbol> index_of(std::string_view label) const;

  bool operator==(const Alphabet&) const = default;

private:
  std::string name_;
  std::vector<std::string> symbols_;
};

struct Realization {
  Symbol t = 0;
  std::vector<Symbol> s;

  auto operator<=>(const Realization&) const = default;
};

struct SupportPoint {
  Realization r;
  double p = 0.0;
};

/// Immutable joint pmf over target x n sources. Only positive-mass
/// realizations are stored; zero rows are dropped at construction.
class JointDistribution {
public:
  static constexpr double default_tolerance = 1e-9;

  /// `exact`, when given, holds one exact mass per entry of `support` and is
  /// kept only if every entry fits the 64-bit denominator limit.
  JointDistribution(Alphabet target, std::vector<Alphabet> sources,
                    std::vector<SupportPoint> support,
                    double normalization_tolerance = default_tolerance,
                    std::optional<std::vector<Rational>> exact = std::nullopt);

  std::size_t n_sources() const noexcept { return sources_.size(); }
  const Alphabet& target_alphabet() const noexcept { return target_; }
  const std::vector<Alphabet>& source_alphabets() const noexcept { return sources_; }
  const std::vector<SupportPoint>& support() const noexcept { return support_; }
  double normalization_tolerance() const noexcept { return tolerance_; }

  /// Exact masses aligned with support(), if the input provided them.
  const std::optional<std::vector<Rational>>& exact_masses() const noexcept { return exact_; }

  std::optional<std::size_t> find(const Realization& r) const;
  double mass(const Realization& r) const;
  double total_mass() const;

  /// Label form "t,s1,...,sn" of a realization.
  std::string label(const Realization& r) const;

private:
  Alphabet target_;
  std::vector<Alphabet> sources_;
  std::vector<SupportPoint> support_;
  double tolerance_;
  std::optional<std::vector<Rational>> exact_;
};

/// Conjunction of per-position equality constraints, optionally including the
/// target. The empty event is the whole sample space.
class CylinderEvent {
public:
  CylinderEvent() = default;
  CylinderEvent(std::vector<std::pair<std::size_t, Symbol>> source_constraints,
                std::optional<Symbol> target = std::nullopt);

  /// The event {S_i = r.s_i for i in coalition}; bit i of `coalition` is source i+1.
  static CylinderEvent coalition(const Realization& r, std::uint32_t coalition);

  bool contains(const Realization& r) const;
  const std::vector<std::pair<std::size_t, Symbol>>& constraints() const noexcept {
    return constraints_;
  }
  const std::optional<Symbol>& target() const noexcept { return target_; }

private:
  std::vector<std::pair<std::size_t, Symbol>> constraints_;
  std::optional<Symbol> target_;
};

enum class EventMode { union_of, intersection_of };

/// Mass of the union or intersection of `events`, summed over support points
/// that satisfy the combination.
double event_probability(const JointDistribution& d, std::span<const CylinderEvent> events,
                         EventMode mode);

/// Variable selector for marginal(): 0 is the target, i >= 1 is source i.
using VariableIndex = std::size_t;

/// Sums out every variable not in `keep`. The result keeps the listed sources
/// in increasing order; when the target is dropped it becomes a one-symbol
/// alphabet named "_".
JointDistribution marginal(const JointDistribution& d, std::span<const VariableIndex> keep);

/// Relabels target symbols through `target_map` (old symbol -> new symbol in
/// `new_target`) and merges coinciding realizations.
JointDistribution map_target(const JointDistribution& d, std::span<const Symbol> target_map,
                             Alphabet new_target);

} // namespace sxpid
