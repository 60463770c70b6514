#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "sxpid/dist.hpp"
#include "sxpid/lattice.hpp"

namespace sxpid {

/// Agreement profile of one realization r: support masses bucketed by the set
/// of sources whose symbol matches r. The union event of an antichain alpha at
/// r is the set of buckets in alpha's coverage, so every event probability is
/// an exact sum of support masses.
class RealizationEvents {
public:
  RealizationEvents(const JointDistribution& d, const Realization& r);

  std::size_t n() const noexcept { return n_; }
  /// P(T = t).
  double target() const noexcept { return target_; }
  /// P(union of the coalition events selected by `coverage`).
  double event(std::uint64_t coverage) const noexcept;
  /// P({T = t} intersected with that union).
  double event_with_target(std::uint64_t coverage) const noexcept;
  /// P(every coalition event fails): the shared exclusion.
  double excluded(std::uint64_t coverage) const noexcept;
  double excluded_with_target(std::uint64_t coverage) const noexcept;

private:
  std::size_t n_;
  double target_ = 0.0;
  std::vector<double> mass_;
  std::vector<double> mass_target_;
};

/// Exact log arguments: each field equals log2 of the stored rational.
struct ExactPointwise {
  std::vector<Rational> shared_plus, shared_minus, shared;
  std::vector<Rational> atom_plus, atom_minus, atom;

  bool operator==(const ExactPointwise&) const = default;
};

struct PointwiseDecomposition {
  Realization realization;
  double weight = 0.0;
  // Node-indexed, in bits.
  std::vector<double> shared_plus, shared_minus, shared;
  std::vector<double> atom_plus, atom_minus, atom;
  std::optional<ExactPointwise> exact;

  bool operator==(const PointwiseDecomposition&) const = default;
};

struct AverageDecomposition {
  std::vector<double> shared_plus, shared_minus, shared;
  std::vector<double> atom_plus, atom_minus, atom;

  bool operator==(const AverageDecomposition&) const = default;
};

struct EvaluationOptions {
  std::size_t workers = 1;
  /// Attach exact rational log arguments when the distribution carries exact
  /// masses and n <= exact_source_limit.
  bool exact = false;
};

inline constexpr std::size_t exact_source_limit = 3;

/// Informative part: -log2 P(union of alpha's coalition events at r).
double i_sx_plus(const JointDistribution& d, const Realization& r, const Antichain& alpha);
/// Misinformative part: log2 P(t) / P(t and union).
double i_sx_minus(const JointDistribution& d, const Realization& r, const Antichain& alpha);
/// Shared information through the shared-exclusion form: remove the mass every
/// coalition excludes, rescale, compare with P(t).
double i_sx(const JointDistribution& d, const Realization& r, const Antichain& alpha);
/// Same quantity as a local mutual information with the indicator of the OR
/// statement, built as an explicit (T, I_W) distribution.
double i_sx_indicator(const JointDistribution& d, const Realization& r, const Antichain& alpha);

/// Pointwise mutual information log2 P(t | s_a) / P(t) of a coalition.
double local_mi(const JointDistribution& d, const Realization& r, Coalition coalition);

/// All node values and atoms at one support realization. Throws
/// std::invalid_argument if r is not in the support.
PointwiseDecomposition pointwise_decomposition(const JointDistribution& d, const Realization& r,
                                               const EvaluationOptions& options = {});

/// Pointwise decompositions at every support point, in support order. Work is
/// split over (realization, node) items; results do not depend on `workers`.
std::vector<PointwiseDecomposition> all_pointwise(const JointDistribution& d,
                                                  const EvaluationOptions& options = {});

/// Mass-weighted sums of pointwise values over the support.
AverageDecomposition average_decomposition(const JointDistribution& d,
                                           const EvaluationOptions& options = {});
AverageDecomposition average_of(std::span<const PointwiseDecomposition> pointwise, std::size_t nodes);

/// Shared information about t2 given t1 for a composite target. target_to_first
/// maps each target symbol to its first component; {T = r.t} is the realized
/// (t1, t2) pair.
double conditional_i_sx(const JointDistribution& d, const Realization& r, const Antichain& alpha,
                        std::span<const Symbol> target_to_first);

/// Self-shared information -log2 P(W) of the OR statement at r's sources.
double self_shared(const JointDistribution& d, const Realization& r, const Antichain& alpha);

struct EntropyDecomposition {
  /// Distribution with T := (S_1, ..., S_n).
  JointDistribution joint;
  AverageDecomposition averages;
  /// -sum p log2 p of the sources.
  double joint_entropy;
};

/// Decomposes the joint entropy of the sources by running the decomposition
/// with the tuple of all sources as target. Any target in `d` is summed out.
EntropyDecomposition entropy_decomposition(const JointDistribution& d,
                                           const EvaluationOptions& options = {});

} // namespace sxpid
