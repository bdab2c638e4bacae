// Market scenario: one broker with inelastic demand d facing n data holders,
// each with its own convex compromise cost.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "privmarket/cost.hpp"

namespace privmarket {

template <class Cost>
struct BasicScenario {
  double demand = 0.0;
  std::vector<Cost> holders;

  BasicScenario(double demand_, std::vector<Cost> holders_)
      : demand(demand_), holders(std::move(holders_)) {
    if (!(std::isfinite(demand) && demand > 0.0))
      throw std::invalid_argument("scenario: demand must be finite and > 0");
    if (holders.empty())
      throw std::invalid_argument("scenario: at least one holder is required");
  }

  std::size_t size() const noexcept { return holders.size(); }
};

using MarketScenario = BasicScenario<QuadraticCost>;

// Holder indices ordered by base marginal cost ascending (stable, so ties
// keep the original order).  Both equilibria activate holders as a prefix of
// this order.
template <class Cost>
std::vector<std::size_t> indices_by_base_marginal(const BasicScenario<Cost>& s) {
  std::vector<std::size_t> idx(s.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t i, std::size_t j) {
    return marginal(s.holders[i], 0.0) < marginal(s.holders[j], 0.0);
  });
  return idx;
}

// Largest marginal cost across holders at a common quantity; used for
// bisection brackets and step-size probes.
template <class Cost>
double max_marginal_at(const BasicScenario<Cost>& s, double q) {
  double m = -std::numeric_limits<double>::infinity();
  for (const auto& c : s.holders) m = std::max(m, marginal(c, q));
  return m;
}

template <class Cost>
double min_marginal_at(const BasicScenario<Cost>& s, double q) {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& c : s.holders) m = std::min(m, marginal(c, q));
  return m;
}

}  // namespace privmarket
