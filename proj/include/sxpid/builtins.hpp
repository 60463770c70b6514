#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "sxpid/dist.hpp"

namespace sxpid {

/// T = S1 xor S2 over independent uniform bits.
JointDistribution xor_distribution();
/// Pointwise unique: each realization's target is fixed by exactly one source.
JointDistribution pwunq_distribution();
/// S1 = S2 = T, uniform bit.
JointDistribution rnd_distribution();
/// Redundant with S2 flipped with probability 1/4.
JointDistribution rnderr_distribution();
/// XOR with S3 a copy of S1.
JointDistribution xor_duplicate_distribution();
/// k independent uniform bits, T their parity. 1 <= k <= 5.
JointDistribution parity_distribution(std::size_t k);

/// Registered names: xor, pwunq, rnd, rnderr, xorduplicate, parity:k.
std::vector<std::string> builtin_names();
bool is_builtin(std::string_view name);
/// Case-insensitive lookup; throws std::invalid_argument for unknown names.
JointDistribution builtin(std::string_view name);

} // namespace sxpid
