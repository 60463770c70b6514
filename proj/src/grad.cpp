#include "sxpid/grad.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "sxpid/parallel.hpp"

namespace sxpid {

namespace {

using NodeId = RedundancyLattice::NodeId;
constexpr double inv_ln2 = 1.0 / std::numbers::ln2;
constexpr double tie_tolerance = 1e-12;

std::size_t grid_size(const Alphabet& target, const std::vector<Alphabet>& sources) {
  std::size_t n = target.size();
  for (const auto& a : sources) n *= a.size();
  return n;
}

std::vector<Realization> decode_all(const SimplexPoint& grid) {
  std::vector<Realization> out(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) out[k] = grid.realization(k);
  return out;
}

// Class of cell k relative to realization r: agreement mask of the sources
// times two, plus one when the targets match. Every partial of a quantity read
// at r depends on k only through this class.
std::vector<std::uint32_t> classes_for(const std::vector<Realization>& cells, const Realization& r) {
  std::vector<std::uint32_t> out(cells.size());
  for (std::size_t k = 0; k < cells.size(); ++k) {
    std::uint32_t mask = 0;
    for (std::size_t i = 0; i < r.s.size(); ++i)
      if (cells[k].s[i] == r.s[i]) mask |= 1u << i;
    out[k] = mask << 1 | (cells[k].t == r.t ? 1u : 0u);
  }
  return out;
}

bool in_cov(std::uint64_t cov, std::uint32_t cls) { return (cov >> (cls >> 1) & 1u) != 0; }
bool target_match(std::uint32_t cls) { return (cls & 1u) != 0; }

// Node measures at one realization: P(E_beta), P(t and E_beta), P(t).
struct Measures {
  std::vector<double> all, with_target;
  double target = 0.0;
};

Measures measures_at(const RedundancyLattice& lat, std::span<const std::uint32_t> cls, std::span<const double> x) {
  const std::size_t masks = std::size_t{1} << lat.n();
  std::vector<double> bucket(2 * masks, 0.0);
  for (std::size_t k = 0; k < cls.size(); ++k) bucket[cls[k]] += x[k];
  Measures m;
  m.all.assign(lat.size(), 0.0);
  m.with_target.assign(lat.size(), 0.0);
  for (std::size_t mask = 0; mask < masks; ++mask) m.target += bucket[2 * mask + 1];
  for (NodeId a = 0; a < lat.size(); ++a) {
    std::uint64_t cov = lat.coverage(a);
    while (cov) {
      const auto mask = static_cast<std::size_t>(std::countr_zero(cov));
      cov &= cov - 1;
      m.all[a] += bucket[2 * mask] + bucket[2 * mask + 1];
      m.with_target[a] += bucket[2 * mask + 1];
    }
  }
  return m;
}

void require_positive(double p, const char* what) {
  if (!(p > 0.0)) throw BoundaryError(std::string("zero probability for ") + what);
}

// Node values i_sx+ / i_sx- / i_sx at one realization.
std::vector<double> shared_values(const Measures& m, Part part) {
  require_positive(m.target, "the target event");
  std::vector<double> v(m.all.size());
  for (std::size_t a = 0; a < v.size(); ++a) {
    require_positive(m.with_target[a], "a union event");
    const double plus = -std::log2(m.all[a]);
    const double minus = std::log2(m.target) - std::log2(m.with_target[a]);
    v[a] = part == Part::plus ? plus : part == Part::minus ? minus : plus - minus;
  }
  return v;
}

std::vector<double> node_partials(const RedundancyLattice& lat, const Measures& m, std::uint32_t cls, Part part) {
  std::vector<double> out(lat.size());
  const bool tm = target_match(cls);
  for (NodeId a = 0; a < lat.size(); ++a) {
    const bool in = in_cov(lat.coverage(a), cls);
    const double plus = in ? -inv_ln2 / m.all[a] : 0.0;
    const double minus = tm ? inv_ln2 * (1.0 / m.target - (in ? 1.0 / m.with_target[a] : 0.0)) : 0.0;
    out[a] = part == Part::plus ? plus : part == Part::minus ? minus : plus - minus;
  }
  return out;
}

// mu(beta, alpha) for every beta below alpha; zero elsewhere.
std::vector<double> moebius_column(const RedundancyLattice& lat, NodeId alpha) {
  std::vector<double> mu(lat.size(), 0.0);
  std::vector<NodeId> down;
  lat.for_each_strictly_below(alpha, [&](NodeId b) { down.push_back(b); });
  mu[alpha] = 1.0;
  for (auto it = down.rbegin(); it != down.rend(); ++it) {
    double s = mu[alpha];
    for (auto jt = down.rbegin(); jt != it; ++jt)
      if (lat.less(*it, *jt)) s += mu[*jt];
    mu[*it] = -s;
  }
  return mu;
}

struct PointGradient {
  double value = 0.0;
  std::vector<double> by_class;
  bool tie = false;
};

std::size_t class_count(const RedundancyLattice& lat) { return std::size_t{2} << lat.n(); }

PointGradient atom_by_recursion(const RedundancyLattice& lat, const Measures& m, const std::vector<double>& mu,
                                NodeId alpha, Part part) {
  PointGradient g;
  const auto values = shared_values(m, part);
  g.value = moebius_invert(lat, values)[alpha];
  g.by_class.assign(class_count(lat), 0.0);
  for (std::uint32_t c = 0; c < class_count(lat); ++c) {
    const auto d = node_partials(lat, m, c, part);
    double s = 0.0;
    for (NodeId b = 0; b < lat.size(); ++b)
      if (mu[b] != 0.0) s += mu[b] * d[b];
    g.by_class[c] = s;
  }
  return g;
}

// Closed-form atom of -log2 M(.) and its class partials. `measure` is P or
// P(t and .); dM is [class in coverage] times the target-match factor.
PointGradient closed_form_part(const RedundancyLattice& lat, NodeId alpha, const std::vector<double>& measure,
                               bool restricted) {
  PointGradient g;
  const std::size_t classes = class_count(lat);
  g.by_class.assign(classes, 0.0);
  auto dm = [&](NodeId node, std::uint32_t c) {
    return (!restricted || target_match(c)) && in_cov(lat.coverage(node), c) ? 1.0 : 0.0;
  };
  const double pa = measure[alpha];
  require_positive(pa, "a union event");
  const auto kids = ordered_children(lat, alpha, measure);
  for (std::size_t j = 1; j < kids.size(); ++j)
    if (std::abs(measure[kids[j]] - measure[kids[j - 1]]) <= tie_tolerance) g.tie = true;
  if (kids.empty()) {
    g.value = -std::log2(pa);
    for (std::uint32_t c = 0; c < classes; ++c) g.by_class[c] = -inv_ln2 * dm(alpha, c) / pa;
    return g;
  }
  const double d1 = measure[kids[0]] - pa;
  const std::size_t rest = kids.size() - 1;
  for (std::uint64_t subset = 0; subset < (std::uint64_t{1} << rest); ++subset) {
    std::uint64_t cov = lat.coverage(alpha);
    if (subset != 0) {
      cov = 0;
      for (std::size_t j = 0; j < rest; ++j)
        if (subset >> j & 1u) cov |= lat.coverage(kids[j + 1]);
    }
    const NodeId node = *lat.find_coverage(cov);
    const double x = measure[node];
    require_positive(x, "a meet event");
    const double sign = std::popcount(subset) % 2 == 0 ? 1.0 : -1.0;
    g.value += sign * std::log2((x + d1) / x);
    for (std::uint32_t c = 0; c < classes; ++c) {
      const double dx = dm(node, c);
      const double dd1 = dm(kids[0], c) - dm(alpha, c);
      g.by_class[c] += sign * inv_ln2 * ((dx + dd1) / (x + d1) - dx / x);
    }
  }
  return g;
}

PointGradient atom_by_closed_form(const RedundancyLattice& lat, const Measures& m, NodeId alpha, Part part) {
  PointGradient plus, minus;
  if (part != Part::minus) plus = closed_form_part(lat, alpha, m.all, false);
  if (part != Part::plus) {
    require_positive(m.target, "the target event");
    minus = closed_form_part(lat, alpha, m.with_target, true);
    if (alpha == lat.bottom()) {
      minus.value += std::log2(m.target);
      for (std::uint32_t c = 0; c < class_count(lat); ++c)
        if (target_match(c)) minus.by_class[c] += inv_ln2 / m.target;
    }
  }
  if (part == Part::plus) return plus;
  if (part == Part::minus) return minus;
  PointGradient net;
  net.value = plus.value - minus.value;
  net.tie = plus.tie || minus.tie;
  net.by_class.resize(class_count(lat));
  for (std::size_t c = 0; c < net.by_class.size(); ++c) net.by_class[c] = plus.by_class[c] - minus.by_class[c];
  return net;
}

std::vector<double> expand(std::span<const std::uint32_t> cls, const std::vector<double>& by_class) {
  std::vector<double> out(cls.size());
  for (std::size_t k = 0; k < cls.size(); ++k) out[k] = by_class[cls[k]];
  return out;
}

const RedundancyLattice& lattice_for(const SimplexPoint& grid, const Antichain& alpha, NodeId& id) {
  if (alpha.n() != grid.n_sources()) throw std::invalid_argument("node and grid disagree on the source count");
  const auto& lat = RedundancyLattice::get(grid.n_sources());
  id = *lat.find(alpha);
  return lat;
}

std::string quantity_name(Level level, Part part, const Antichain& node) {
  std::string base = level == Level::shared ? "i" : level == Level::atom ? "pi" : "Pi";
  if (part == Part::plus) base += "_plus";
  if (part == Part::minus) base += "_minus";
  return base + "(t:" + node.name() + ")";
}

double average_value(const SimplexPoint& grid, std::span<const double> x, const Antichain& alpha, Part part) {
  NodeId id = 0;
  const auto& lat = lattice_for(grid, alpha, id);
  const auto cells = decode_all(grid);
  double total = 0.0;
  for (std::size_t r = 0; r < cells.size(); ++r) {
    if (!(x[r] > 0.0)) continue;
    const auto cls = classes_for(cells, cells[r]);
    const auto m = measures_at(lat, cls, x);
    total += x[r] * moebius_invert(lat, shared_values(m, part))[id];
  }
  return total;
}

GradientRecord average_gradient(const SimplexPoint& grid, std::span<const double> x, const Antichain& alpha,
                                Part part, std::size_t workers) {
  NodeId id = 0;
  const auto& lat = lattice_for(grid, alpha, id);
  const auto cells = decode_all(grid);
  const auto mu = moebius_column(lat, id);
  std::vector<PointGradient> per(cells.size());
  std::vector<std::vector<std::uint32_t>> cls(cells.size());
  parallel_for(cells.size(), workers, [&](std::size_t r) {
    if (!(x[r] > 0.0)) return;
    cls[r] = classes_for(cells, cells[r]);
    per[r] = atom_by_recursion(lat, measures_at(lat, cls[r], x), mu, id, part);
  });
  GradientRecord rec;
  rec.quantity = quantity_name(Level::average, part, alpha);
  rec.partials.assign(cells.size(), 0.0);
  for (std::size_t r = 0; r < cells.size(); ++r) {
    if (!(x[r] > 0.0)) continue;
    rec.value += x[r] * per[r].value;
    rec.partials[r] += per[r].value;
    for (std::size_t k = 0; k < cells.size(); ++k) rec.partials[k] += x[r] * per[r].by_class[cls[r][k]];
  }
  return rec;
}

std::vector<double> clip_to_interior(std::vector<double> x, double epsilon) {
  const double n = static_cast<double>(x.size());
  if (epsilon * n >= 1.0) throw std::invalid_argument("interior margin too large for the grid");
  // Tangent steps keep the sum; leave interior iterates untouched unless
  // rounding has drifted it.
  double raw = 0.0;
  for (double v : x) raw += v;
  if (*std::min_element(x.begin(), x.end()) >= epsilon && std::abs(raw - 1.0) <= 1e-13) return x;
  double sum = 0.0;
  for (auto& v : x) {
    v = std::max(v, epsilon);
    sum += v;
  }
  const double scale = (1.0 - n * epsilon) / (sum - n * epsilon);
  for (auto& v : x) v = epsilon + (v - epsilon) * scale;
  return x;
}

double project(std::vector<double>& g) {
  double mean = 0.0;
  for (double v : g) mean += v;
  mean /= static_cast<double>(g.size());
  double norm = 0.0;
  for (auto& v : g) {
    v -= mean;
    norm += v * v;
  }
  return std::sqrt(norm);
}

} // namespace

SimplexPoint::SimplexPoint(Alphabet target, std::vector<Alphabet> sources, std::vector<double> masses, double epsilon)
    : target_(std::move(target)), sources_(std::move(sources)), masses_(std::move(masses)), epsilon_(epsilon) {
  if (!(epsilon_ > 0.0)) throw std::invalid_argument("interior margin must be positive");
  if (masses_.size() != grid_size(target_, sources_))
    throw std::invalid_argument("grid masses do not match the alphabet sizes");
  double total = 0.0;
  for (std::size_t k = 0; k < masses_.size(); ++k) {
    if (!std::isfinite(masses_[k]) || masses_[k] < epsilon_)
      throw BoundaryError("grid cell " + std::to_string(k) + " is below the interior margin");
    total += masses_[k];
  }
  if (std::abs(total - 1.0) > 1e-9) throw std::invalid_argument("grid masses do not sum to 1");
}

SimplexPoint SimplexPoint::mix(const JointDistribution& d, double mixing, double epsilon) {
  if (!(mixing > 0.0 && mixing <= 1.0)) throw std::invalid_argument("mixing must lie in (0, 1]");
  auto x = grid_masses(d);
  const double u = 1.0 / static_cast<double>(x.size());
  for (auto& v : x) v = (1.0 - mixing) * v + mixing * u;
  return SimplexPoint(d.target_alphabet(), d.source_alphabets(), std::move(x), epsilon);
}

Realization SimplexPoint::realization(std::size_t cell) const {
  if (cell >= masses_.size()) throw std::out_of_range("grid cell out of range");
  Realization r;
  r.s.resize(sources_.size());
  for (std::size_t i = sources_.size(); i-- > 0;) {
    r.s[i] = static_cast<Symbol>(cell % sources_[i].size());
    cell /= sources_[i].size();
  }
  r.t = static_cast<Symbol>(cell);
  return r;
}

std::size_t SimplexPoint::cell(const Realization& r) const {
  if (r.t >= target_.size() || r.s.size() != sources_.size()) throw std::out_of_range("realization outside the grid");
  std::size_t k = r.t;
  for (std::size_t i = 0; i < sources_.size(); ++i) {
    if (r.s[i] >= sources_[i].size()) throw std::out_of_range("realization outside the grid");
    k = k * sources_[i].size() + r.s[i];
  }
  return k;
}

JointDistribution SimplexPoint::to_distribution() const {
  std::vector<SupportPoint> support;
  for (std::size_t k = 0; k < masses_.size(); ++k) support.push_back({realization(k), masses_[k]});
  return JointDistribution(target_, sources_, std::move(support));
}

std::vector<double> grid_masses(const JointDistribution& d) {
  const auto& sources = d.source_alphabets();
  std::vector<double> x(grid_size(d.target_alphabet(), sources), 0.0);
  for (const auto& pt : d.support()) {
    std::size_t k = pt.r.t;
    for (std::size_t i = 0; i < sources.size(); ++i) k = k * sources[i].size() + pt.r.s[i];
    x[k] = pt.p;
  }
  return x;
}

const char* to_string(Part p) {
  switch (p) {
  case Part::plus: return "plus";
  case Part::minus: return "minus";
  case Part::net: return "net";
  }
  return "?";
}

std::string QuantitySpec::name() const {
  auto base = quantity_name(level, part, node);
  if (level != Level::average) base += " @ cell " + std::to_string(cell);
  return base;
}

double evaluate(const SimplexPoint& grid, std::span<const double> masses, const QuantitySpec& q) {
  if (masses.size() != grid.size()) throw std::invalid_argument("masses do not match the grid");
  if (q.level == Level::average) return average_value(grid, masses, q.node, q.part);
  NodeId id = 0;
  const auto& lat = lattice_for(grid, q.node, id);
  const auto cells = decode_all(grid);
  if (q.cell >= cells.size()) throw std::out_of_range("grid cell out of range");
  const auto cls = classes_for(cells, cells[q.cell]);
  const auto values = shared_values(measures_at(lat, cls, masses), q.part);
  return q.level == Level::shared ? values[id] : moebius_invert(lat, values)[id];
}

std::array<GradientRecord, 3> grad_i_sx_parts(const SimplexPoint& p, std::size_t cell, const Antichain& alpha) {
  NodeId id = 0;
  const auto& lat = lattice_for(p, alpha, id);
  const auto cells = decode_all(p);
  if (cell >= cells.size()) throw std::out_of_range("grid cell out of range");
  const auto cls = classes_for(cells, cells[cell]);
  const auto m = measures_at(lat, cls, p.masses());
  std::array<GradientRecord, 3> out;
  for (Part part : {Part::plus, Part::minus, Part::net}) {
    auto& rec = out[static_cast<std::size_t>(part)];
    rec.quantity = quantity_name(Level::shared, part, alpha) + " @ cell " + std::to_string(cell);
    rec.value = shared_values(m, part)[id];
    std::vector<double> by_class(class_count(lat));
    for (std::uint32_t c = 0; c < by_class.size(); ++c) by_class[c] = node_partials(lat, m, c, part)[id];
    rec.partials = expand(cls, by_class);
  }
  return out;
}

GradientRecord grad_atom(const SimplexPoint& p, std::size_t cell, const Antichain& alpha, Part which, AtomPath path) {
  NodeId id = 0;
  const auto& lat = lattice_for(p, alpha, id);
  const auto cells = decode_all(p);
  if (cell >= cells.size()) throw std::out_of_range("grid cell out of range");
  const auto cls = classes_for(cells, cells[cell]);
  const auto m = measures_at(lat, cls, p.masses());
  PointGradient g;
  bool tie = false;
  if (path == AtomPath::closed_form) {
    g = atom_by_closed_form(lat, m, id, which);
    tie = g.tie;
  }
  if (path == AtomPath::recursion || tie) g = atom_by_recursion(lat, m, moebius_column(lat, id), id, which);
  GradientRecord rec;
  rec.quantity = quantity_name(Level::atom, which, alpha) + " @ cell " + std::to_string(cell);
  rec.value = g.value;
  rec.partials = expand(cls, g.by_class);
  rec.tie_warning = tie;
  return rec;
}

GradientRecord grad_average(const SimplexPoint& p, const Antichain& alpha, Part which, std::size_t workers) {
  return average_gradient(p, p.masses(), alpha, which, workers);
}

GradientRecord gradient(const SimplexPoint& p, const QuantitySpec& q, std::size_t workers) {
  switch (q.level) {
  case Level::shared: return grad_i_sx_parts(p, q.cell, q.node)[static_cast<std::size_t>(q.part)];
  case Level::atom: return grad_atom(p, q.cell, q.node, q.part);
  case Level::average: return grad_average(p, q.node, q.part, workers);
  }
  throw std::logic_error("unknown quantity level");
}

std::vector<double> finite_difference(const SimplexPoint& p, const QuantitySpec& q, double step, std::size_t workers) {
  std::vector<double> out(p.size());
  parallel_for(p.size(), workers, [&](std::size_t k) {
    std::vector<double> x(p.masses());
    x[k] = p.masses()[k] + step;
    const double up = evaluate(p, x, q);
    x[k] = p.masses()[k] - step;
    const double down = evaluate(p, x, q);
    out[k] = (up - down) / (2.0 * step);
  });
  return out;
}

FdComparison compare_gradients(std::span<const double> analytic, std::span<const double> reference, double rel_tol,
                               double abs_tol, double small_cutoff) {
  if (analytic.size() != reference.size()) throw std::invalid_argument("gradient sizes differ");
  FdComparison c;
  double worst = -1.0;
  for (std::size_t k = 0; k < analytic.size(); ++k) {
    const double err = std::abs(analytic[k] - reference[k]);
    const double scale = std::abs(reference[k]);
    const double rel = scale > 0.0 ? err / scale : (err > 0.0 ? INFINITY : 0.0);
    const bool ok = !std::isnan(err) && (rel <= rel_tol || (scale < small_cutoff && err <= abs_tol));
    if (!ok) ++c.failures;
    c.max_abs_error = std::max(c.max_abs_error, err);
    if (scale >= small_cutoff) c.max_rel_error = std::max(c.max_rel_error, rel);
    const double badness = scale >= small_cutoff ? rel / rel_tol : err / abs_tol;
    if (badness > worst) {
      worst = badness;
      c.worst_cell = k;
    }
  }
  return c;
}

std::vector<TrajectoryStep> optimize_atom(const SimplexPoint& start, const Objective& objective,
                                          const OptimizerOptions& options) {
  for (double v : start.masses())
    if (v < options.epsilon) throw BoundaryError("start point is not interior");
  const double sign = objective.maximize ? 1.0 : -1.0;
  std::vector<TrajectoryStep> trajectory;
  std::vector<double> x = start.masses();
  for (std::size_t step = 0;; ++step) {
    auto rec = average_gradient(start, x, objective.node, objective.part, options.workers);
    const double norm = project(rec.partials);
    trajectory.push_back({step, x, rec.value, norm});
    if (step == options.steps || norm < options.stop_norm) break;
    for (std::size_t k = 0; k < x.size(); ++k) x[k] += sign * options.learning_rate * rec.partials[k];
    x = clip_to_interior(std::move(x), options.epsilon);
  }
  return trajectory;
}

Mechanism Mechanism::of(const JointDistribution& d) {
  Mechanism m{d.target_alphabet(), d.source_alphabets(), {}};
  const std::size_t t_size = m.target.size();
  const std::size_t s_cells = grid_size(Alphabet("_", {"*"}), m.sources);
  const auto x = grid_masses(d);
  m.conditional.assign(s_cells * t_size, 0.0);
  for (std::size_t s = 0; s < s_cells; ++s) {
    double q = 0.0;
    for (std::size_t t = 0; t < t_size; ++t) q += x[t * s_cells + s];
    if (!(q > 0.0)) throw std::invalid_argument("mechanism undefined for a source tuple with no mass");
    for (std::size_t t = 0; t < t_size; ++t) m.conditional[s * t_size + t] = x[t * s_cells + s] / q;
  }
  return m;
}

std::vector<double> Mechanism::joint(std::span<const double> inputs) const {
  const std::size_t t_size = target.size();
  const std::size_t s_cells = source_cells();
  if (inputs.size() != s_cells) throw std::invalid_argument("input pmf does not match the source grid");
  std::vector<double> p(s_cells * t_size);
  for (std::size_t t = 0; t < t_size; ++t)
    for (std::size_t s = 0; s < s_cells; ++s) p[t * s_cells + s] = conditional[s * t_size + t] * inputs[s];
  return p;
}

std::vector<TrajectoryStep> optimize_inputs(const Mechanism& mechanism, std::span<const double> inputs,
                                            const Objective& objective, const OptimizerOptions& options) {
  const std::size_t s_cells = mechanism.source_cells();
  const std::size_t t_size = mechanism.target.size();
  if (inputs.size() != s_cells) throw std::invalid_argument("input pmf does not match the source grid");
  double total = 0.0;
  for (double v : inputs) {
    if (!(v >= options.epsilon)) throw BoundaryError("input pmf is not interior");
    total += v;
  }
  if (std::abs(total - 1.0) > 1e-9) throw std::invalid_argument("input pmf does not sum to 1");

  // Layout carrier for the joint grid; its own masses are never read.
  const std::size_t cells = s_cells * t_size;
  const SimplexPoint layout(mechanism.target, mechanism.sources,
                            std::vector<double>(cells, 1.0 / static_cast<double>(cells)));
  const double sign = objective.maximize ? 1.0 : -1.0;
  std::vector<double> q(inputs.begin(), inputs.end());
  std::vector<TrajectoryStep> trajectory;
  for (std::size_t step = 0;; ++step) {
    const auto x = mechanism.joint(q);
    const auto rec = average_gradient(layout, x, objective.node, objective.part, options.workers);
    std::vector<double> g(s_cells, 0.0);
    for (std::size_t s = 0; s < s_cells; ++s)
      for (std::size_t t = 0; t < t_size; ++t) {
        const double c = mechanism.conditional[s * t_size + t];
        if (c > 0.0) g[s] += c * rec.partials[t * s_cells + s];
      }
    const double norm = project(g);
    trajectory.push_back({step, x, rec.value, norm});
    if (step == options.steps || norm < options.stop_norm) break;
    for (std::size_t s = 0; s < s_cells; ++s) q[s] += sign * options.learning_rate * g[s];
    q = clip_to_interior(std::move(q), options.epsilon);
  }
  return trajectory;
}

} // namespace sxpid
