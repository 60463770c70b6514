#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "sxpid/dist.hpp"
#include "sxpid/lattice.hpp"

namespace sxpid {

inline constexpr double default_interior_margin = 1e-9;
inline constexpr double default_fd_step = 1e-6;

/// Joint pmf over the full outcome grid T x S_1 x ... x S_n, stored row-major
/// with the target index slowest and the last source fastest.
class SimplexPoint {
public:
  /// Throws BoundaryError if any mass is below `epsilon` and
  /// std::invalid_argument on a size mismatch or a total away from 1 by more
  /// than 1e-9.
  SimplexPoint(Alphabet target, std::vector<Alphabet> sources, std::vector<double> masses,
               double epsilon = default_interior_margin);

  /// Grid embedding of `d` mixed with the uniform grid pmf:
  /// (1 - mixing) * d + mixing / |grid|. mixing must lie in (0, 1].
  static SimplexPoint mix(const JointDistribution& d, double mixing, double epsilon = default_interior_margin);

  const Alphabet& target_alphabet() const noexcept { return target_; }
  const std::vector<Alphabet>& source_alphabets() const noexcept { return sources_; }
  std::size_t n_sources() const noexcept { return sources_.size(); }
  std::size_t size() const noexcept { return masses_.size(); }
  const std::vector<double>& masses() const noexcept { return masses_; }
  double epsilon() const noexcept { return epsilon_; }

  Realization realization(std::size_t cell) const;
  /// Throws std::out_of_range for symbols outside the alphabets.
  std::size_t cell(const Realization& r) const;

  JointDistribution to_distribution() const;

private:
  Alphabet target_;
  std::vector<Alphabet> sources_;
  std::vector<double> masses_;
  double epsilon_;
};

/// Zero-mass cells are allowed in grid coordinates; they are skipped as
/// realizations when averaging. Every quantity below is defined on these raw,
/// unnormalized coordinates.
std::vector<double> grid_masses(const JointDistribution& d);

enum class Part { plus, minus, net };
const char* to_string(Part p);

enum class Level {
  shared,  // i_sx at one realization
  atom,    // pi_sx at one realization
  average, // mass-weighted atom over all realizations
};

struct QuantitySpec {
  Level level = Level::atom;
  Part part = Part::net;
  Antichain node;
  /// Realization cell; ignored for Level::average.
  std::size_t cell = 0;

  std::string name() const;
};

enum class AtomPath { closed_form, recursion };

struct GradientRecord {
  std::string quantity;
  double value = 0.0;
  /// d quantity / d p_k in bits per unit mass, indexed by grid cell.
  std::vector<double> partials;
  /// Set when the closed form was requested but two child event probabilities
  /// tie within 1e-12; the partials then come from the recursion.
  bool tie_warning = false;
};

/// Value of `q` at raw grid coordinates `masses` laid out as in `grid`. Throws
/// BoundaryError when a needed event has no mass.
double evaluate(const SimplexPoint& grid, std::span<const double> masses, const QuantitySpec& q);

/// Gradients of i_sx+, i_sx- and i_sx at `cell`, indexed by Part.
std::array<GradientRecord, 3> grad_i_sx_parts(const SimplexPoint& p, std::size_t cell, const Antichain& alpha);

GradientRecord grad_atom(const SimplexPoint& p, std::size_t cell, const Antichain& alpha, Part which,
                         AtomPath path = AtomPath::closed_form);

/// Gradient of sum_r p_r pi_r(alpha), weight term included.
GradientRecord grad_average(const SimplexPoint& p, const Antichain& alpha, Part which, std::size_t workers = 1);

/// Dispatches on q.level.
GradientRecord gradient(const SimplexPoint& p, const QuantitySpec& q, std::size_t workers = 1);

/// Central differences on the raw coordinates, no renormalization.
std::vector<double> finite_difference(const SimplexPoint& p, const QuantitySpec& q, double step = default_fd_step,
                                      std::size_t workers = 1);

struct FdComparison {
  double max_abs_error = 0.0;
  double max_rel_error = 0.0;
  std::size_t worst_cell = 0;
  std::size_t failures = 0;
  bool passed() const noexcept { return failures == 0; }
};

/// A partial passes when its relative error is at most rel_tol, or when the
/// reference is below small_cutoff in magnitude and the absolute error is at
/// most abs_tol.
FdComparison compare_gradients(std::span<const double> analytic, std::span<const double> reference,
                               double rel_tol = 1e-5, double abs_tol = 1e-7, double small_cutoff = 1e-2);

struct Objective {
  Antichain node;
  Part part = Part::net;
  bool maximize = true;
};

struct OptimizerOptions {
  std::size_t steps = 100;
  double learning_rate = 0.05;
  double epsilon = default_interior_margin;
  double stop_norm = 1e-8;
  std::size_t workers = 1;
};

struct TrajectoryStep {
  std::size_t step;
  /// Joint grid masses at this iterate.
  std::vector<double> masses;
  double objective;
  /// Norm of the projected gradient at this iterate.
  double grad_norm;
};

/// Projected gradient ascent or descent of the averaged atom over the joint
/// grid. Each step projects the gradient onto the simplex tangent, moves,
/// clips to the interior margin and renormalizes. The first entry is the start.
std::vector<TrajectoryStep> optimize_atom(const SimplexPoint& start, const Objective& objective,
                                          const OptimizerOptions& options = {});

/// Conditional p(t | s) on the source grid, row-major (s_1..s_n, t).
struct Mechanism {
  Alphabet target;
  std::vector<Alphabet> sources;
  std::vector<double> conditional;

  /// Throws std::invalid_argument when some source tuple has no mass in d.
  static Mechanism of(const JointDistribution& d);
  std::size_t source_cells() const noexcept { return conditional.size() / target.size(); }
  /// Joint grid masses p(t, s) = p(t | s) q(s).
  std::vector<double> joint(std::span<const double> inputs) const;
};

/// Same loop with the mechanism fixed and the input pmf q over the source grid
/// free. `inputs` must be an interior point of the source simplex. Partials
/// reach q through p(t, s) = p(t | s) q(s); the reported masses are the joint.
std::vector<TrajectoryStep> optimize_inputs(const Mechanism& mechanism, std::span<const double> inputs,
                                            const Objective& objective, const OptimizerOptions& options = {});

} // namespace sxpid
