#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "sxpid/dist.hpp"
#include "sxpid/measures.hpp"

namespace sxpid {

/// Everything `compute` prints: averages always, pointwise blocks on request.
struct DecompositionReport {
  std::string source;
  Alphabet target;
  std::vector<Alphabet> sources;
  /// Node names in lattice order; every vector below is indexed the same way.
  std::vector<std::string> nodes;
  AverageDecomposition averages;
  std::vector<PointwiseDecomposition> pointwise;

  bool operator==(const DecompositionReport&) const = default;
};

DecompositionReport make_report(const JointDistribution& d, std::string source, bool pointwise,
                                const EvaluationOptions& options = {});

/// Only the listed nodes, in the given order. Names are canonicalized; throws
/// std::invalid_argument for names that are not nodes.
DecompositionReport filter_nodes(const DecompositionReport& report, const std::vector<std::string>& names);

std::string render_json(const DecompositionReport& report);
/// Inverse of render_json. Throws DistributionError on malformed documents.
DecompositionReport parse_json_report(std::string_view text);

/// Fixed-point text tables. Two-source reports with pointwise blocks get one
/// row per realization; otherwise pointwise values are listed per node.
std::string render_table(const DecompositionReport& report, int precision = 4);

/// Fixed-point with `precision` decimals; values that round to zero print
/// without a sign.
std::string format_fixed(double value, int precision);

} // namespace sxpid
