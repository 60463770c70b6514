#include "sxpid/measures.hpp"

#include <cmath>
#include <cstdlib>
#include <map>
#include <stdexcept>

#include "sxpid/parallel.hpp"

namespace sxpid {

std::size_t default_workers() {
  if (const char* env = std::getenv("SXPID_WORKERS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v >= 1) return static_cast<std::size_t>(v);
  }
  return 1;
}

namespace {

using NodeId = RedundancyLattice::NodeId;

std::uint32_t agreement(const Realization& a, const Realization& b) {
  std::uint32_t m = 0;
  for (std::size_t i = 0; i < a.s.size(); ++i)
    if (a.s[i] == b.s[i]) m |= 1u << i;
  return m;
}

void require_valid(const JointDistribution& d, const Realization& r) {
  if (r.s.size() != d.n_sources())
    throw std::invalid_argument("realization has " + std::to_string(r.s.size()) + " source symbols, expected " +
                                std::to_string(d.n_sources()));
  if (r.t >= d.target_alphabet().size()) throw std::invalid_argument("target symbol out of range");
  for (std::size_t i = 0; i < r.s.size(); ++i)
    if (r.s[i] >= d.source_alphabets()[i].size()) throw std::invalid_argument("source symbol out of range");
}

void require_support(const JointDistribution& d, const Realization& r) {
  require_valid(d, r);
  if (!d.find(r)) throw std::invalid_argument("realization " + d.label(r) + " is not in the support");
}

double log2_positive(double x, const char* what) {
  if (!(x > 0.0)) throw BoundaryError(std::string("zero probability in ") + what);
  return std::log2(x);
}

struct ExactBuckets {
  Rational target = 0;
  std::vector<Rational> mass, mass_target;

  ExactBuckets(const JointDistribution& d, const Realization& r)
      : mass(std::size_t{1} << d.n_sources()), mass_target(std::size_t{1} << d.n_sources()) {
    const auto& exact = *d.exact_masses();
    for (std::size_t k = 0; k < d.support().size(); ++k) {
      const auto& pt = d.support()[k];
      const auto m = agreement(pt.r, r);
      mass[m] += exact[k];
      if (pt.r.t == r.t) {
        mass_target[m] += exact[k];
        target += exact[k];
      }
    }
  }

  Rational sum(const std::vector<Rational>& buckets, std::uint64_t coverage) const {
    Rational total = 0;
    for (std::size_t m = 0; m < buckets.size(); ++m)
      if (coverage >> m & 1u) total += buckets[m];
    return total;
  }
};

// Rational R with log2(R) equal to the atom of -log2 P at alpha.
Rational exact_atom(const RedundancyLattice& lattice, NodeId alpha, const std::vector<Rational>& prob,
                    const std::vector<double>& approx) {
  auto kids = ordered_children(lattice, alpha, approx);
  if (kids.empty()) return 1 / prob[alpha];
  const Rational d1 = prob[kids[0]] - prob[alpha];
  const std::size_t rest = kids.size() - 1;
  Rational out = 1;
  for (std::uint64_t subset = 0; subset < (std::uint64_t{1} << rest); ++subset) {
    std::uint64_t cov = lattice.coverage(alpha);
    if (subset != 0) {
      cov = 0;
      for (std::size_t j = 0; j < rest; ++j)
        if (subset >> j & 1u) cov |= lattice.coverage(kids[j + 1]);
    }
    const Rational& p = prob[*lattice.find_coverage(cov)];
    const Rational ratio = (p + d1) / p;
    if (std::popcount(subset) % 2 == 0) out *= ratio;
    else out /= ratio;
  }
  return out;
}

ExactPointwise exact_pointwise(const JointDistribution& d, const Realization& r,
                               const RedundancyLattice& lattice) {
  ExactBuckets buckets(d, r);
  const std::size_t count = lattice.size();
  std::vector<Rational> prob(count), prob_t(count);
  std::vector<double> approx(count), approx_t(count);
  for (NodeId a = 0; a < count; ++a) {
    prob[a] = buckets.sum(buckets.mass, lattice.coverage(a));
    prob_t[a] = buckets.sum(buckets.mass_target, lattice.coverage(a));
    approx[a] = prob[a].convert_to<double>();
    approx_t[a] = prob_t[a].convert_to<double>();
  }
  ExactPointwise out;
  for (NodeId a = 0; a < count; ++a) {
    out.shared_plus.push_back(1 / prob[a]);
    out.shared_minus.push_back(buckets.target / prob_t[a]);
    out.shared.push_back(out.shared_plus.back() / out.shared_minus.back());
    out.atom_plus.push_back(exact_atom(lattice, a, prob, approx));
    Rational minus = exact_atom(lattice, a, prob_t, approx_t);
    if (a == lattice.bottom()) minus *= buckets.target;
    out.atom_minus.push_back(minus);
    out.atom.push_back(out.atom_plus.back() / out.atom_minus.back());
  }
  return out;
}

void fill_atoms(const RedundancyLattice& lattice, PointwiseDecomposition& pw) {
  pw.atom_plus = moebius_invert(lattice, pw.shared_plus);
  pw.atom_minus = moebius_invert(lattice, pw.shared_minus);
  pw.atom.resize(lattice.size());
  for (std::size_t a = 0; a < lattice.size(); ++a) pw.atom[a] = pw.atom_plus[a] - pw.atom_minus[a];
}

} // namespace

RealizationEvents::RealizationEvents(const JointDistribution& d, const Realization& r)
    : n_(d.n_sources()), mass_(std::size_t{1} << d.n_sources()), mass_target_(std::size_t{1} << d.n_sources()) {
  require_valid(d, r);
  if (n_ > 6) throw std::invalid_argument("agreement profiles support at most 6 sources");
  for (const auto& pt : d.support()) {
    const auto m = agreement(pt.r, r);
    mass_[m] += pt.p;
    if (pt.r.t == r.t) {
      mass_target_[m] += pt.p;
      target_ += pt.p;
    }
  }
}

double RealizationEvents::event(std::uint64_t coverage) const noexcept {
  double total = 0.0;
  for (std::size_t m = 0; m < mass_.size(); ++m)
    if (coverage >> m & 1u) total += mass_[m];
  return total;
}

double RealizationEvents::event_with_target(std::uint64_t coverage) const noexcept {
  double total = 0.0;
  for (std::size_t m = 0; m < mass_target_.size(); ++m)
    if (coverage >> m & 1u) total += mass_target_[m];
  return total;
}

double RealizationEvents::excluded(std::uint64_t coverage) const noexcept {
  double total = 0.0;
  for (std::size_t m = 0; m < mass_.size(); ++m)
    if (!(coverage >> m & 1u)) total += mass_[m];
  return total;
}

double RealizationEvents::excluded_with_target(std::uint64_t coverage) const noexcept {
  double total = 0.0;
  for (std::size_t m = 0; m < mass_target_.size(); ++m)
    if (!(coverage >> m & 1u)) total += mass_target_[m];
  return total;
}

double i_sx_plus(const JointDistribution& d, const Realization& r, const Antichain& alpha) {
  if (alpha.n() != d.n_sources()) throw std::invalid_argument("antichain source count mismatch");
  RealizationEvents ev(d, r);
  return -log2_positive(ev.event(alpha.coverage()), "i_sx_plus");
}

double i_sx_minus(const JointDistribution& d, const Realization& r, const Antichain& alpha) {
  if (alpha.n() != d.n_sources()) throw std::invalid_argument("antichain source count mismatch");
  RealizationEvents ev(d, r);
  return log2_positive(ev.target(), "i_sx_minus") -
         log2_positive(ev.event_with_target(alpha.coverage()), "i_sx_minus");
}

double i_sx(const JointDistribution& d, const Realization& r, const Antichain& alpha) {
  if (alpha.n() != d.n_sources()) throw std::invalid_argument("antichain source count mismatch");
  RealizationEvents ev(d, r);
  const auto cov = alpha.coverage();
  const double pt = ev.target();
  // Remove the excluded buckets, rescale by what survives, compare with P(t).
  // Surviving mass is summed bucket by bucket; subtracting the exclusion from
  // P(t) or from 1 cancels badly when little mass survives.
  const double kept_with_target = ev.event_with_target(cov);
  const double kept = ev.event(cov);
  return log2_positive(kept_with_target / kept, "i_sx") - log2_positive(pt, "i_sx");
}

double i_sx_indicator(const JointDistribution& d, const Realization& r, const Antichain& alpha) {
  if (alpha.n() != d.n_sources()) throw std::invalid_argument("antichain source count mismatch");
  require_valid(d, r);
  std::vector<CylinderEvent> statement;
  for (auto c : alpha.collections()) statement.push_back(CylinderEvent::coalition(r, c));

  std::map<std::pair<Symbol, Symbol>, double> joint;
  for (const auto& pt : d.support()) {
    const bool w = std::any_of(statement.begin(), statement.end(),
                               [&](const CylinderEvent& e) { return e.contains(pt.r); });
    joint[{pt.r.t, w ? 1u : 0u}] += pt.p;
  }
  std::vector<SupportPoint> support;
  for (const auto& [key, p] : joint) support.push_back({Realization{key.first, {key.second}}, p});
  JointDistribution indicator(d.target_alphabet(), {Alphabet("W", {"0", "1"})}, std::move(support),
                              d.normalization_tolerance());
  return local_mi(indicator, Realization{r.t, {1}}, 1u);
}

double local_mi(const JointDistribution& d, const Realization& r, Coalition coalition) {
  require_valid(d, r);
  const CylinderEvent sources = CylinderEvent::coalition(r, coalition);
  const CylinderEvent target({}, r.t);
  const CylinderEvent both(sources.constraints(), r.t);
  const double p_ts = event_probability(d, std::span(&both, 1), EventMode::union_of);
  const double p_s = event_probability(d, std::span(&sources, 1), EventMode::union_of);
  const double p_t = event_probability(d, std::span(&target, 1), EventMode::union_of);
  return log2_positive(p_ts, "local_mi") - log2_positive(p_s, "local_mi") - log2_positive(p_t, "local_mi");
}

PointwiseDecomposition pointwise_decomposition(const JointDistribution& d, const Realization& r,
                                               const EvaluationOptions& options) {
  require_support(d, r);
  const auto& lattice = RedundancyLattice::get(d.n_sources());
  const RealizationEvents ev(d, r);
  PointwiseDecomposition pw;
  pw.realization = r;
  pw.weight = d.mass(r);
  const std::size_t count = lattice.size();
  pw.shared_plus.resize(count);
  pw.shared_minus.resize(count);
  pw.shared.resize(count);
  const double log_target = std::log2(ev.target());
  parallel_for(count, options.workers, [&](std::size_t a) {
    const auto cov = lattice.coverage(static_cast<NodeId>(a));
    pw.shared_plus[a] = -std::log2(ev.event(cov));
    pw.shared_minus[a] = log_target - std::log2(ev.event_with_target(cov));
    pw.shared[a] = pw.shared_plus[a] - pw.shared_minus[a];
  });
  fill_atoms(lattice, pw);
  if (options.exact && d.exact_masses() && d.n_sources() <= exact_source_limit)
    pw.exact = exact_pointwise(d, r, lattice);
  return pw;
}

std::vector<PointwiseDecomposition> all_pointwise(const JointDistribution& d, const EvaluationOptions& options) {
  const auto& lattice = RedundancyLattice::get(d.n_sources());
  const auto& support = d.support();
  const std::size_t count = lattice.size();
  std::vector<std::optional<RealizationEvents>> events(support.size());
  std::vector<PointwiseDecomposition> out(support.size());
  parallel_for(support.size(), options.workers, [&](std::size_t k) {
    events[k].emplace(d, support[k].r);
    auto& pw = out[k];
    pw.realization = support[k].r;
    pw.weight = support[k].p;
    pw.shared_plus.resize(count);
    pw.shared_minus.resize(count);
    pw.shared.resize(count);
  });
  // (realization, node) work items.
  parallel_for(support.size() * count, options.workers, [&](std::size_t item) {
    const std::size_t k = item / count, a = item % count;
    const auto& ev = *events[k];
    const auto cov = lattice.coverage(static_cast<NodeId>(a));
    auto& pw = out[k];
    pw.shared_plus[a] = -std::log2(ev.event(cov));
    pw.shared_minus[a] = std::log2(ev.target()) - std::log2(ev.event_with_target(cov));
    pw.shared[a] = pw.shared_plus[a] - pw.shared_minus[a];
  });
  const bool exact = options.exact && d.exact_masses() && d.n_sources() <= exact_source_limit;
  parallel_for(support.size(), options.workers, [&](std::size_t k) {
    fill_atoms(lattice, out[k]);
    if (exact) out[k].exact = exact_pointwise(d, support[k].r, lattice);
  });
  return out;
}

AverageDecomposition average_of(std::span<const PointwiseDecomposition> pointwise, std::size_t nodes) {
  AverageDecomposition avg;
  for (auto* v : {&avg.shared_plus, &avg.shared_minus, &avg.shared, &avg.atom_plus, &avg.atom_minus, &avg.atom})
    v->assign(nodes, 0.0);
  for (const auto& pw : pointwise) {
    for (std::size_t a = 0; a < nodes; ++a) {
      avg.shared_plus[a] += pw.weight * pw.shared_plus[a];
      avg.shared_minus[a] += pw.weight * pw.shared_minus[a];
      avg.shared[a] += pw.weight * pw.shared[a];
      avg.atom_plus[a] += pw.weight * pw.atom_plus[a];
      avg.atom_minus[a] += pw.weight * pw.atom_minus[a];
      avg.atom[a] += pw.weight * pw.atom[a];
    }
  }
  return avg;
}

AverageDecomposition average_decomposition(const JointDistribution& d, const EvaluationOptions& options) {
  EvaluationOptions opts = options;
  opts.exact = false;
  const auto pointwise = all_pointwise(d, opts);
  return average_of(pointwise, RedundancyLattice::get(d.n_sources()).size());
}

double conditional_i_sx(const JointDistribution& d, const Realization& r, const Antichain& alpha,
                        std::span<const Symbol> target_to_first) {
  require_valid(d, r);
  if (alpha.n() != d.n_sources()) throw std::invalid_argument("antichain source count mismatch");
  if (target_to_first.size() != d.target_alphabet().size())
    throw std::invalid_argument("target factorization must cover every target symbol");
  const Symbol first = target_to_first[r.t];
  const auto cov = alpha.coverage();
  double p_first = 0.0, p_t = 0.0, excl_first = 0.0, excl_t = 0.0;
  for (const auto& pt : d.support()) {
    if (target_to_first[pt.r.t] != first) continue;
    const bool in_union = cov >> agreement(pt.r, r) & 1u;
    p_first += pt.p;
    if (!in_union) excl_first += pt.p;
    if (pt.r.t == r.t) {
      p_t += pt.p;
      if (!in_union) excl_t += pt.p;
    }
  }
  if (!(p_first > 0.0)) throw BoundaryError("conditioning target component has zero probability");
  const double p_second = p_t / p_first;
  const double removed = p_second - excl_t / p_first;
  const double rescale = 1.0 - excl_first / p_first;
  return log2_positive(removed / rescale, "conditional_i_sx") - log2_positive(p_second, "conditional_i_sx");
}

double self_shared(const JointDistribution& d, const Realization& r, const Antichain& alpha) {
  if (alpha.n() != d.n_sources()) throw std::invalid_argument("antichain source count mismatch");
  RealizationEvents ev(d, r);
  return -log2_positive(ev.event(alpha.coverage()), "self_shared");
}

EntropyDecomposition entropy_decomposition(const JointDistribution& d, const EvaluationOptions& options) {
  std::vector<VariableIndex> keep;
  for (std::size_t i = 1; i <= d.n_sources(); ++i) keep.push_back(i);
  const JointDistribution sources = marginal(d, keep);

  std::vector<std::string> labels;
  std::vector<SupportPoint> support;
  std::vector<Rational> exact;
  double entropy = 0.0;
  for (std::size_t k = 0; k < sources.support().size(); ++k) {
    const auto& pt = sources.support()[k];
    std::string label;
    for (std::size_t i = 0; i < pt.r.s.size(); ++i)
      label += (i ? "|" : "") + sources.source_alphabets()[i].label(pt.r.s[i]);
    labels.push_back(label);
    support.push_back({Realization{static_cast<Symbol>(k), pt.r.s}, pt.p});
    if (sources.exact_masses()) exact.push_back((*sources.exact_masses())[k]);
    entropy -= pt.p * std::log2(pt.p);
  }
  JointDistribution joint(Alphabet("T", labels), sources.source_alphabets(), std::move(support),
                          d.normalization_tolerance(),
                          sources.exact_masses() ? std::optional(std::move(exact)) : std::nullopt);
  auto averages = average_decomposition(joint, options);
  return {std::move(joint), std::move(averages), entropy};
}

} // namespace sxpid
