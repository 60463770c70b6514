#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sxpid/checks.hpp"

namespace sxpid {

struct ExampleResult {
  std::string name;
  /// Human-readable tables or listings produced along the way.
  std::string body;
  std::vector<NamedCheck> checks;
  /// Non-numeric assertions (counts, signs); each entry is (description, ok).
  std::vector<std::pair<std::string, bool>> conditions;

  bool passed() const noexcept;
};

/// Names accepted by run_example: every builtin plus "vchannel".
std::vector<std::string> example_names();

/// Runs a worked example with its published values as assertions. `atom`, when
/// set, also reports that node's pointwise atom at the example's reference
/// realization. Throws std::invalid_argument for unknown names or nodes.
ExampleResult run_example(std::string_view name, const std::optional<std::string>& atom = std::nullopt,
                          int precision = 4, std::size_t workers = 1);

} // namespace sxpid
