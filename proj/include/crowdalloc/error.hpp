#pragma once

#include <stdexcept>
#include <string>

namespace crowdalloc {

// Domain error for bad inputs (malformed files, violated preconditions,
// exhausted label pools).  The CLI maps it to exit code 1.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace crowdalloc
