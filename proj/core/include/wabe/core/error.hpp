#pragma once

#include <stdexcept>
#include <string>

namespace wabe {

/// Runtime failure: bad input data, non-finite values, I/O problems.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A caller broke a documented precondition (e.g. backward without a cache).
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace wabe
