// Error types raised by the market solvers and bidding dynamics.
#pragma once

#include <stdexcept>
#include <string>

namespace privmarket {

// Raised when a bid profile sums to zero: the broker rejects all bids and
// announces no price.
class RejectedBidError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised when no oligopolistic Nash equilibrium exists (fewer than three
// holders).
class NoEquilibriumError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised when a bidding iteration diverges instead of settling.  Carries the
// iteration index and the supply gap observed when divergence was detected.
class DivergedError : public std::runtime_error {
 public:
  DivergedError(const std::string& what, long iteration, double supply_gap)
      : std::runtime_error(what), iteration_(iteration), supply_gap_(supply_gap) {}

  long iteration() const noexcept { return iteration_; }
  double supply_gap() const noexcept { return supply_gap_; }

 private:
  long iteration_;
  double supply_gap_;
};

// Raised when a scenario file cannot be parsed or violates a model invariant.
// The message names the offending key or line.
class ScenarioParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace privmarket
