#pragma once

#include <stdexcept>
#include <string>

namespace sxpid {

/// Raised for any malformed or invalid distribution input. `location` names the
/// offending row/field ("row 3, field p") when one is known.
class DistributionError : public std::runtime_error {
public:
  DistributionError(const std::string& what, std::string location = {});
  const std::string& location() const noexcept { return location_; }

private:
  std::string location_;
};

/// Raised when a quantity would need the logarithm of a zero probability.
class BoundaryError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

} // namespace sxpid
