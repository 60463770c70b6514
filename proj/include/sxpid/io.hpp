#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "sxpid/dist.hpp"

namespace sxpid {

enum class Format { csv, json };

/// Reads a distribution. CSV: header `t,s1,...,sn,p`, one support point per
/// row, alphabets taken from the labels seen in each column. JSON: object with
/// `target_alphabet`, `source_alphabets` and `support: [{t, s: [...], p}]`.
/// Masses may be decimals or fractions "a/b". Duplicate rows, negative
/// masses, unknown symbols and normalization violations raise
/// DistributionError with the row/field location.
JointDistribution load_distribution(std::istream& in, Format format,
                                    double normalization_tolerance =
                                        JointDistribution::default_tolerance);

/// Picks the format from the extension (.json, otherwise CSV).
JointDistribution load_distribution_file(const std::filesystem::path& path,
                                         double normalization_tolerance =
                                             JointDistribution::default_tolerance);

/// Writes masses with the shortest representation that round-trips the double.
void write_distribution(std::ostream& out, const JointDistribution& d, Format format);

std::string to_string(const JointDistribution& d, Format format);

} // namespace sxpid
