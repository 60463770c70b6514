#include "sxpid/checks.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "sxpid/builtins.hpp"

namespace sxpid {

namespace {

using NodeId = RedundancyLattice::NodeId;

struct Parts {
  double plus, minus;
};

// i_sx+ and i_sx- for collections in the given order, by scanning the support.
Parts direct_parts(const JointDistribution& d, const Realization& r, std::span<const Coalition> collections) {
  std::vector<CylinderEvent> events, with_target;
  for (auto c : collections) {
    events.push_back(CylinderEvent::coalition(r, c));
    with_target.emplace_back(events.back().constraints(), r.t);
  }
  const CylinderEvent target({}, r.t);
  const double p_union = event_probability(d, events, EventMode::union_of);
  const double p_t_union = event_probability(d, with_target, EventMode::union_of);
  const double p_t = event_probability(d, std::span(&target, 1), EventMode::union_of);
  return {-std::log2(p_union), std::log2(p_t) - std::log2(p_t_union)};
}

std::string describe(std::span<const Coalition> collections) {
  std::string out;
  for (auto c : collections) out += coalition_name(c);
  return out;
}

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

} // namespace

const char* to_string(Axiom a) {
  switch (a) {
  case Axiom::symmetry: return "symmetry";
  case Axiom::monotonicity: return "monotonicity";
  case Axiom::self_redundancy: return "self-redundancy";
  case Axiom::lattice_monotonicity: return "lattice-monotonicity";
  }
  return "?";
}

std::vector<AxiomViolation> check_lattice_monotonicity(const RedundancyLattice& lattice,
                                                       std::span<const double> values,
                                                       std::size_t realization, const std::string& label,
                                                       double tolerance) {
  std::vector<AxiomViolation> out;
  for (NodeId a = 0; a < lattice.size(); ++a) {
    for (auto child : lattice.children(a)) {
      if (values[child] > values[a] + tolerance) {
        out.push_back({Axiom::lattice_monotonicity, realization,
                       lattice.node(child).name() + " -> " + lattice.node(a).name(),
                       label + " decreases from " + fmt(values[child]) + " to " + fmt(values[a])});
      }
    }
  }
  return out;
}

AxiomReport axiom_suite(const JointDistribution& d, double tolerance) {
  const std::size_t n = d.n_sources();
  const auto& lattice = RedundancyLattice::get(n);
  AxiomReport report;
  auto violate = [&](Axiom ax, std::size_t k, std::string node, std::string detail) {
    report.violations.push_back({ax, k, std::move(node), std::move(detail)});
  };

  for (std::size_t k = 0; k < d.support().size(); ++k) {
    const Realization& r = d.support()[k].r;
    const auto pw = pointwise_decomposition(d, r);

    for (NodeId a = 0; a < lattice.size(); ++a) {
      const auto& cols = lattice.node(a).collections();

      // Symmetry: every rotation and the reversal give the same parts.
      std::vector<std::vector<Coalition>> orders;
      for (std::size_t shift = 0; shift < cols.size(); ++shift) {
        std::vector<Coalition> rotated(cols);
        std::rotate(rotated.begin(), rotated.begin() + static_cast<std::ptrdiff_t>(shift), rotated.end());
        orders.push_back(rotated);
      }
      orders.emplace_back(cols.rbegin(), cols.rend());
      for (const auto& order : orders) {
        ++report.checks;
        const Parts p = direct_parts(d, r, order);
        if (std::abs(p.plus - pw.shared_plus[a]) > tolerance || std::abs(p.minus - pw.shared_minus[a]) > tolerance)
          violate(Axiom::symmetry, k, describe(order),
                  "parts (" + fmt(p.plus) + ", " + fmt(p.minus) + ") differ from canonical (" +
                      fmt(pw.shared_plus[a]) + ", " + fmt(pw.shared_minus[a]) + ")");
      }

      // Appending a collection never increases either part.
      const Parts base = direct_parts(d, r, cols);
      for (Coalition extra = 1; extra < (1u << n); ++extra) {
        ++report.checks;
        std::vector<Coalition> appended(cols);
        appended.push_back(extra);
        const Parts p = direct_parts(d, r, appended);
        const bool absorbed = std::any_of(cols.begin(), cols.end(), [&](Coalition c) { return (c & extra) == c; });
        const std::string where = describe(appended);
        if (p.plus > base.plus + tolerance || p.minus > base.minus + tolerance)
          violate(Axiom::monotonicity, k, where,
                  "appending " + coalition_name(extra) + " increased a part");
        if (absorbed && (std::abs(p.plus - base.plus) > tolerance || std::abs(p.minus - base.minus) > tolerance))
          violate(Axiom::monotonicity, k, where,
                  "appending superset " + coalition_name(extra) + " changed a part");
      }
    }

    // Single collections reduce to h(a) and h(a|t).
    const CylinderEvent target({}, r.t);
    const double p_t = event_probability(d, std::span(&target, 1), EventMode::union_of);
    for (Coalition c = 1; c < (1u << n); ++c) {
      ++report.checks;
      const auto node = *lattice.find(Antichain::normalize(std::span(&c, 1), n));
      const CylinderEvent src = CylinderEvent::coalition(r, c);
      const CylinderEvent joint(src.constraints(), r.t);
      const double h = -std::log2(event_probability(d, std::span(&src, 1), EventMode::union_of));
      const double h_given_t = -std::log2(event_probability(d, std::span(&joint, 1), EventMode::union_of) / p_t);
      if (std::abs(pw.shared_plus[node] - h) > tolerance)
        violate(Axiom::self_redundancy, k, coalition_name(c), "i_sx+ " + fmt(pw.shared_plus[node]) + " != h " + fmt(h));
      if (std::abs(pw.shared_minus[node] - h_given_t) > tolerance)
        violate(Axiom::self_redundancy, k, coalition_name(c),
                "i_sx- " + fmt(pw.shared_minus[node]) + " != h(.|t) " + fmt(h_given_t));
      const double mi = local_mi(d, r, c);
      if (std::abs(pw.shared[node] - mi) > tolerance)
        violate(Axiom::self_redundancy, k, coalition_name(c), "i_sx " + fmt(pw.shared[node]) + " != i " + fmt(mi));
    }

    report.checks += 2;
    for (auto& v : check_lattice_monotonicity(lattice, pw.shared_plus, k, "i_sx+", tolerance))
      report.violations.push_back(std::move(v));
    for (auto& v : check_lattice_monotonicity(lattice, pw.shared_minus, k, "i_sx-", tolerance))
      report.violations.push_back(std::move(v));
  }
  return report;
}

bool NamedCheck::passed() const noexcept { return std::abs(actual - expected) <= tolerance; }

bool DuplicateReport::passed() const noexcept {
  return duplicate_confirmed && failures.empty() &&
         std::all_of(identities.begin(), identities.end(), [](const NamedCheck& c) { return c.passed(); });
}

DuplicateReport duplicate_invariance_check(const JointDistribution& d, std::size_t original, std::size_t duplicate,
                                           double tolerance) {
  const std::size_t n = d.n_sources();
  if (original < 1 || original > n || duplicate < 1 || duplicate > n || original == duplicate)
    throw std::invalid_argument("duplicate pair must name two distinct sources in [1, n]");
  const auto& lattice = RedundancyLattice::get(n);
  const auto& orig_alpha = d.source_alphabets()[original - 1];
  const auto& dup_alpha = d.source_alphabets()[duplicate - 1];

  DuplicateReport report;
  report.duplicate_confirmed = std::all_of(d.support().begin(), d.support().end(), [&](const SupportPoint& pt) {
    return orig_alpha.label(pt.r.s[original - 1]) == dup_alpha.label(pt.r.s[duplicate - 1]);
  });
  if (!report.duplicate_confirmed) {
    report.failures.push_back("source " + std::to_string(duplicate) + " is not a copy of source " +
                              std::to_string(original));
    return report;
  }

  const Coalition o_bit = 1u << (original - 1), d_bit = 1u << (duplicate - 1);
  const auto pointwise = all_pointwise(d);
  for (const auto& pw : pointwise) {
    const std::string where = d.label(pw.realization);
    for (NodeId a = 0; a < lattice.size(); ++a) {
      std::vector<Coalition> replaced;
      for (auto c : lattice.node(a).collections()) replaced.push_back(c & d_bit ? (c & ~d_bit) | o_bit : c);
      const NodeId b = *lattice.find(Antichain::normalize(replaced, n));
      ++report.invariance_checks;
      if (std::abs(pw.shared_plus[a] - pw.shared_plus[b]) > tolerance ||
          std::abs(pw.shared_minus[a] - pw.shared_minus[b]) > tolerance)
        report.failures.push_back(lattice.node(a).name() + " differs from " + lattice.node(b).name() + " at " + where);
    }
  }

  if (n == 3 && original == 1 && duplicate == 3) {
    struct Expect {
      const char* field;
      const char* node;
      double value;
    };
    static const Expect expectations[] = {
        {"i", "{1}{2}{3}", -0.5849},     {"i", "{1}{2}", -0.5849},      {"i", "{2}{3}", -0.5849},
        {"i", "{1}{3}", 0.0},            {"i", "{1}", 0.0},             {"i", "{3}", 0.0},
        {"i", "{2}{1,3}", -0.5849},      {"i", "{1}{2,3}", 0.0},        {"i", "{3}{1,2}", 0.0},
        {"i", "{1,2}{1,3}{2,3}", 0.0},   {"i", "{1,2,3}", 1.0},         {"i", "{1,2}", 1.0},
        {"i", "{2,3}", 1.0},             {"i", "{1,3}", 0.0},           {"pi", "{1}{2}", 0.0},
        {"pi", "{2}{3}", 0.0},           {"pi", "{1}{3}", 0.5849},      {"pi", "{1}{2}{3}", -0.5849},
        {"pi", "{2}{1,3}", 0.0},         {"pi", "{2}", 0.5849},         {"pi", "{1}{2,3}", 0.0},
        {"pi", "{3}{1,2}", 0.0},         {"pi", "{1,2}{2,3}", 0.415},   {"pi", "{1,2}{1,3}", 0.0},
        {"pi", "{1,3}{2,3}", 0.0},       {"pi", "{1,2,3}", 0.0},        {"pi", "{1,2}", 0.0},
        {"pi", "{2,3}", 0.0},            {"pi", "{1,3}", 0.0},
    };
    for (const auto& pw : pointwise) {
      for (const auto& e : expectations) {
        const NodeId node = lattice.parse(e.node);
        const double actual = std::string(e.field) == "i" ? pw.shared[node] : pw.atom[node];
        report.identities.push_back({std::string(e.field) + "(t:" + e.node + ") @ " + d.label(pw.realization),
                                     e.value, actual, 1e-3});
      }
    }
  }
  return report;
}

VChannelReport v_channel_xor() {
  const JointDistribution d = xor_distribution();
  VChannelReport report;
  for (const auto& pt : d.support()) {
    const Symbol s1 = pt.r.s[0], s2 = pt.r.s[1];
    std::vector<std::pair<Symbol, Symbol>> statements{{s1, s2}};
    for (Symbol a = 0; a < 2; ++a)
      for (Symbol b = 0; b < 2; ++b)
        if ((a == s1 || b == s2) && !(a == s1 && b == s2)) statements.emplace_back(a, b);

    for (const auto& [a, b] : statements) {
      double posterior[2] = {0.0, 0.0};
      double p_t = 0.0;
      for (const auto& q : d.support()) {
        if (q.r.s[0] == a || q.r.s[1] == b) posterior[q.r.t] += q.p;
        if (q.r.t == pt.r.t) p_t += q.p;
      }
      const double p_v = posterior[0] + posterior[1];
      const Symbol predicted = posterior[1] > posterior[0] ? 1u : 0u;
      VChannelRow row{pt.r, pt.p, a, b, a == s1 && b == s2, predicted, predicted == pt.r.t,
                      std::log2(posterior[pt.r.t] / p_v / p_t)};
      (row.correct ? report.correct : report.incorrect)++;
      report.channel_information += pt.p * row.information / static_cast<double>(statements.size());
      if (row.carries_shared) report.shared_information += pt.p * row.information;
      report.rows.push_back(row);
    }
  }
  return report;
}

} // namespace sxpid
