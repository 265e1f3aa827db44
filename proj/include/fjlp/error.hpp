#pragma once

#include <stdexcept>
#include <string>

namespace fjlp {

// Invalid parameters (dimensions, ranges, budgets) surface as
// std::invalid_argument / std::out_of_range. Malformed files and I/O problems
// use FormatError so callers can tell them apart.
class FormatError : public std::runtime_error {
 public:
  explicit FormatError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace fjlp
