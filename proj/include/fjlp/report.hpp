#pragma once

#include <cstdint>
#include <string>
#include <utility>

#include <nlohmann/json.hpp>

namespace fjlp {

/// Outcome of a Monte-Carlo or exact check.
///
/// For upper-bound checks `pass` means the upper end of `ci` does not exceed
/// `bound` (or the bound is vacuous); exact checks set ci = {estimate,
/// estimate}.
struct VerificationReport {
  std::string check;
  double estimate = 0.0;
  std::pair<double, double> ci{0.0, 0.0};
  double bound = 0.0;
  std::uint64_t trials = 0;
  bool pass = false;
  std::uint64_t seed = 0;
  nlohmann::json params = nlohmann::json::object();

  nlohmann::json to_json() const {
    return nlohmann::json{{"check", check},   {"params", params},
                          {"estimate", estimate}, {"ci", {ci.first, ci.second}},
                          {"bound", bound},   {"trials", trials},
                          {"pass", pass},     {"seed", seed}};
  }
};

}  // namespace fjlp
