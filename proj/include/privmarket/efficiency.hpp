// Efficiency loss of the strategic equilibrium against the competitive
// benchmark: price and cost ratios, their structural bounds, and the
// worst-case scenario family showing the cost ratio is unbounded.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "privmarket/equilibrium.hpp"
#include "privmarket/scenario.hpp"

namespace privmarket {

struct EfficiencyReport {
  double price_ratio = 0.0;   // p_one / p_pce
  double cost_ratio = 0.0;    // C_one / C_pce
  double price_bound = 0.0;   // ((n-1)/(n-2)) * M / m
  // 1 + q_max/(d - 2 q_max) with q_max the largest PCE allocation; absent
  // when some holder covers half the demand or more competitively
  std::optional<double> cost_bound;
  bool participation_superset = false;  // PCE participants within ONE participants
  double max_uniform_marginal = 0.0;    // M = max_i C'_i(d/n)
  double min_uniform_marginal = 0.0;    // m = min_i C'_i(d/n)
  bool price_bound_holds = false;
  bool cost_bound_holds = false;        // true whenever the bound is absent
};

// Compares a solved PCE/ONE pair on the same scenario.  The bounds are
// structural guarantees of this market, so a violation beyond the 1e-9 slack
// means a solver bug and raises logic_error.
template <class Cost>
EfficiencyReport efficiency_report(const EquilibriumResult& pce,
                                   const EquilibriumResult& one,
                                   const BasicScenario<Cost>& s) {
  if (pce.kind != EquilibriumKind::pce || one.kind != EquilibriumKind::one)
    throw std::invalid_argument("efficiency_report: expected a PCE result and a ONE result");
  if (pce.quantities.size() != s.size() || one.quantities.size() != s.size())
    throw std::invalid_argument("efficiency_report: results do not match scenario");
  double n = static_cast<double>(s.size());
  if (s.size() < 3)
    throw std::invalid_argument("efficiency_report: at least three holders required");

  EfficiencyReport rep;
  rep.price_ratio = one.price / pce.price;
  rep.cost_ratio = one.total_cost / pce.total_cost;

  double share = s.demand / n;
  rep.max_uniform_marginal = max_marginal_at(s, share);
  rep.min_uniform_marginal = min_marginal_at(s, share);
  rep.price_bound = (n - 1.0) / (n - 2.0) * rep.max_uniform_marginal /
                    rep.min_uniform_marginal;

  double q_bar_max = *std::max_element(pce.quantities.begin(), pce.quantities.end());
  if (q_bar_max < 0.5 * s.demand)
    rep.cost_bound = 1.0 + q_bar_max / (s.demand - 2.0 * q_bar_max);

  rep.participation_superset =
      std::includes(one.participants.begin(), one.participants.end(),
                    pce.participants.begin(), pce.participants.end());

  rep.price_bound_holds = rep.price_ratio <= rep.price_bound + 1e-9;
  rep.cost_bound_holds = !rep.cost_bound || rep.cost_ratio <= *rep.cost_bound + 1e-9;

  if (!rep.participation_superset)
    throw std::logic_error("efficiency_report: competitive participants missing from the strategic equilibrium");
  if (!rep.price_bound_holds)
    throw std::logic_error("efficiency_report: price ratio exceeded its structural bound");
  if (!rep.cost_bound_holds)
    throw std::logic_error("efficiency_report: cost ratio exceeded its structural bound");
  return rep;
}

// Three-holder family whose strategic cost overrun grows without bound in r:
// one holder r times cheaper (curvature c/(2r)) than the two others
// (curvature c/2), all with zero base marginal cost.  Competitively the cheap
// holder supplies r/(r+2) of the demand at vanishing cost; strategically it
// withholds toward half the demand and the expensive holders fill the rest.
inline MarketScenario worst_case_scenario(double r, double c, double d) {
  if (!(std::isfinite(r) && r > 0.0))
    throw std::invalid_argument("worst_case_scenario: r must be finite and > 0");
  if (!(std::isfinite(c) && c > 0.0))
    throw std::invalid_argument("worst_case_scenario: c must be finite and > 0");
  if (!(std::isfinite(d) && d > 0.0))
    throw std::invalid_argument("worst_case_scenario: d must be finite and > 0");
  return MarketScenario(
      d, {QuadraticCost(0.0, c / (2.0 * r)), QuadraticCost(0.0, 0.5 * c),
          QuadraticCost(0.0, 0.5 * c)});
}

struct SweepRow {
  double r = 0.0;
  double p_pce = 0.0;
  double p_one = 0.0;
  double c_pce = 0.0;
  double c_one = 0.0;
  double price_ratio = 0.0;
  double cost_ratio = 0.0;
};

// Solves the worst-case family across a sorted list of cheapness ratios.
inline std::vector<SweepRow> poa_sweep(std::span<const double> r_values, double c,
                                       double d) {
  if (r_values.empty())
    throw std::invalid_argument("poa_sweep: at least one r value is required");
  for (std::size_t i = 0; i < r_values.size(); ++i) {
    if (!(std::isfinite(r_values[i]) && r_values[i] > 0.0))
      throw std::invalid_argument("poa_sweep: r values must be finite and > 0");
    if (i > 0 && r_values[i] <= r_values[i - 1])
      throw std::invalid_argument("poa_sweep: r values must be strictly increasing");
  }
  std::vector<SweepRow> rows;
  rows.reserve(r_values.size());
  for (double r : r_values) {
    MarketScenario s = worst_case_scenario(r, c, d);
    EquilibriumResult pce = solve_pce(s);
    EquilibriumResult one = solve_one(s);
    rows.push_back({r, pce.price, one.price, pce.total_cost, one.total_cost,
                    one.price / pce.price, one.total_cost / pce.total_cost});
  }
  return rows;
}

// CSV sweep dump: r,p_pce,p_one,c_pce,c_one,price_ratio,cost_ratio with 12
// significant digits, deterministic across runs.
inline std::string to_csv(std::span<const SweepRow> rows) {
  std::string out = "r,p_pce,p_one,c_pce,c_one,price_ratio,cost_ratio\n";
  char buf[64];
  for (const auto& row : rows) {
    const double vals[] = {row.r,     row.p_pce,       row.p_one,     row.c_pce,
                           row.c_one, row.price_ratio, row.cost_ratio};
    for (std::size_t i = 0; i < 7; ++i) {
      std::snprintf(buf, sizeof buf, i == 0 ? "%.12g" : ",%.12g", vals[i]);
      out += buf;
    }
    out += '\n';
  }
  return out;
}

}  // namespace privmarket
