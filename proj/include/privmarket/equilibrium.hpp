// Equilibrium solvers for the single-broker market under linear
// supply-function bidding q_i(b_i, p) = b_i p.
//
// Two benchmark outcomes:
//  - PCE (price-taking competitive equilibrium): marginal costs of all
//    participating holders equal the clearing price, total cost is minimal.
//  - ONE (oligopolistic Nash equilibrium): each holder bids strategically;
//    the equilibrium equalizes the derived marginals D'_i instead and exists
//    only with at least three holders.
//
// Both reduce to one-dimensional root finding: the clearing price is the
// unique p at which the summed (clipped) inverse marginals absorb the demand.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "privmarket/cost.hpp"
#include "privmarket/errors.hpp"
#include "privmarket/numeric.hpp"
#include "privmarket/scenario.hpp"

namespace privmarket {

enum class EquilibriumKind { pce, one };

inline const char* to_string(EquilibriumKind k) {
  return k == EquilibriumKind::pce ? "PCE" : "ONE";
}

struct EquilibriumResult {
  EquilibriumKind kind = EquilibriumKind::pce;
  double price = 0.0;
  std::vector<double> quantities;          // per holder, original order
  std::vector<double> bids;                // b_i = q_i / price
  std::vector<std::size_t> participants;   // indices with q_i > 0
  double total_cost = 0.0;                 // sum of direct costs C_i(q_i)
};

// Price announced by the broker for a bid profile: p = d / sum(b).  A profile
// summing to zero is rejected by the broker and raises RejectedBidError.
inline double market_clearing_price(std::span<const double> bids, double demand) {
  detail::require_positive_demand(demand, "market_clearing_price");
  double total = 0.0;
  for (double b : bids) {
    if (!(std::isfinite(b) && b >= 0.0))
      throw std::domain_error("market_clearing_price: bids must be finite and >= 0");
    total += b;
  }
  if (total == 0.0)
    throw RejectedBidError("market_clearing_price: all bids are zero, profile rejected");
  return demand / total;
}

namespace detail {

// Clearing price for a monotone aggregate supply curve: the unique p in
// [lo, hi] with supply(p) = demand, found by bisection driven to machine
// width (tighter than the 1e-12 relative contract) so the feasibility
// identity sum(q_i) = d survives multiplication by the supply slope.
template <class SupplyFn>
double solve_clearing_price(SupplyFn&& supply, double lo, double hi, double demand) {
  return numeric::solve_increasing(supply, lo, hi, demand);
}

template <class Cost, class InverseFn>
EquilibriumResult build_result(const BasicScenario<Cost>& s, EquilibriumKind kind,
                               double price, InverseFn&& inverse) {
  EquilibriumResult r;
  r.kind = kind;
  r.price = price;
  r.quantities.reserve(s.size());
  r.bids.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    double q = inverse(i, price);
    r.quantities.push_back(q);
    r.bids.push_back(q / price);
    if (q > 0.0) r.participants.push_back(i);
    r.total_cost += cost(s.holders[i], q);
  }
  return r;
}

}  // namespace detail

// Competitive equilibrium: minimizes total cost subject to meeting demand.
// Holders with base marginal cost above the clearing price stay out; the
// active set is a prefix of the base-marginal-cost order (waterfilling).
template <class Cost>
EquilibriumResult solve_pce(const BasicScenario<Cost>& s) {
  double lo = min_marginal_at(s, 0.0);
  double hi = max_marginal_at(s, s.demand);
  auto supply = [&](double p) {
    double total = 0.0;
    for (const auto& c : s.holders) total += inverse_marginal(c, p);
    return total;
  };
  double p = detail::solve_clearing_price(supply, lo, hi, s.demand);
  return detail::build_result(s, EquilibriumKind::pce, p, [&](std::size_t i, double price) {
    return inverse_marginal(s.holders[i], price);
  });
}

// Oligopolistic Nash equilibrium of the bidding game.  Exists and is unique
// for n >= 3; with one or two holders the strategic payoff admits no
// equilibrium bid profile.
template <class Cost>
EquilibriumResult solve_one(const BasicScenario<Cost>& s) {
  if (s.size() <= 2)
    throw NoEquilibriumError(
        "no oligopolistic Nash equilibrium exists for two holders or fewer");
  double d = s.demand;
  auto supply = [&](double p) {
    double total = 0.0;
    for (const auto& c : s.holders) total += inverse_d_marginal(c, p, d);
    return total;
  };
  double lo = min_marginal_at(s, 0.0);
  // each holder saturates below d/2, and n >= 3 of them can absorb d, so a
  // finite bracket always exists; grow it geometrically until supply covers
  // demand
  double hi = std::max(max_marginal_at(s, d), lo + 1.0);
  while (supply(hi) < d) hi = lo + 2.0 * (hi - lo);
  double p = detail::solve_clearing_price(supply, lo, hi, d);
  return detail::build_result(s, EquilibriumKind::one, p, [&](std::size_t i, double price) {
    return inverse_d_marginal(s.holders[i], price, d);
  });
}

struct KktReport {
  EquilibriumKind kind = EquilibriumKind::pce;
  std::vector<double> residuals;  // per-holder stationarity residual
  double max_residual = 0.0;
  double tolerance = 0.0;         // 1e-8 * max(1, price)
  bool pass = false;
};

// Stationarity check for a solved equilibrium: participants must price at
// their (direct or strategic) marginal cost, non-participants must not be
// priced below their base marginal cost.
template <class Cost>
KktReport verify_kkt(const EquilibriumResult& r, const BasicScenario<Cost>& s) {
  if (r.quantities.size() != s.size())
    throw std::invalid_argument("verify_kkt: result does not match scenario");
  auto marg = [&](std::size_t i, double q) {
    return r.kind == EquilibriumKind::pce ? marginal(s.holders[i], q)
                                          : d_marginal(s.holders[i], q, s.demand);
  };
  KktReport report;
  report.kind = r.kind;
  report.residuals.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    double q = r.quantities[i];
    double res = q > 0.0 ? std::fabs(marg(i, q) - r.price)
                         : std::max(0.0, r.price - marg(i, 0.0));
    report.residuals.push_back(res);
    report.max_residual = std::max(report.max_residual, res);
  }
  report.tolerance = 1e-8 * std::max(1.0, r.price);
  report.pass = report.max_residual <= report.tolerance;
  return report;
}

struct BestResponse {
  double bid = 0.0;
  double payoff = 0.0;
};

namespace detail {

// Payoff evaluation for golden-section comparisons.  long double keeps the
// flat top of the payoff near its maximum above the comparison noise floor;
// the quadratic family evaluates its cost at that precision too, other
// families fall back to their double cost.
template <class Cost>
long double payoff_ld(const Cost& c, long double q, long double price) {
  return price * q - static_cast<long double>(cost(c, static_cast<double>(q)));
}

inline long double payoff_ld(const QuadraticCost& c, long double q, long double price) {
  return price * q - (static_cast<long double>(c.a) * q +
                      static_cast<long double>(c.h) * q * q);
}

}  // namespace detail

// Holder i's profit-maximizing bid against fixed opponent bids (all holders
// except i, in original order).  The payoff b -> p(b) q(b) - C_i(q(b)) is
// unimodal on [0, sum(other_bids)]; the maximizer is bracketed by
// golden-section search refined to width 1e-10.  A holder whose base marginal
// cost already exceeds the margin at b = 0 best-responds by staying out.
template <class Cost>
BestResponse best_response(std::size_t i, std::span<const double> other_bids,
                           const BasicScenario<Cost>& s) {
  if (i >= s.size())
    throw std::invalid_argument("best_response: holder index out of range");
  if (other_bids.size() + 1 != s.size())
    throw std::invalid_argument("best_response: expected one bid per other holder");
  long double total_others = 0.0L;
  for (double b : other_bids) {
    if (!(std::isfinite(b) && b >= 0.0))
      throw std::domain_error("best_response: bids must be finite and >= 0");
    total_others += b;
  }
  if (total_others == 0.0L)
    throw std::invalid_argument(
        "best_response: opponents bid zero in total, payoff has no maximizer");

  const auto& c = s.holders[i];
  const long double d = s.demand;
  const double B = static_cast<double>(total_others);

  // marginal payoff at b = 0+ is proportional to 1 - (B/d) C'(0); when it is
  // nonpositive the payoff is maximized by withholding entirely
  if (1.0 - (B / s.demand) * marginal(c, 0.0) <= 0.0) return {0.0, 0.0};

  auto payoff = [&](double b) -> long double {
    long double tot = total_others + static_cast<long double>(b);
    long double price = d / tot;
    long double q = static_cast<long double>(b) * price;
    return detail::payoff_ld(c, q, price);
  };
  auto best = numeric::golden_section_max(payoff, 0.0, B, 1e-10);
  double bid = best.x;
  double value = static_cast<double>(best.value);
  // the boundary payoff 0 can still win in corner cases
  if (value <= 0.0) return {0.0, 0.0};
  return {bid, value};
}

// Net revenue p q_i - C_i(q_i) for every holder at an equilibrium; both
// equilibria leave every holder weakly better off than staying out.
template <class Cost>
std::vector<double> individual_rationality(const EquilibriumResult& r,
                                           const BasicScenario<Cost>& s) {
  if (r.quantities.size() != s.size())
    throw std::invalid_argument("individual_rationality: result does not match scenario");
  std::vector<double> net;
  net.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    double q = r.quantities[i];
    net.push_back(r.price * q - cost(s.holders[i], q));
  }
  return net;
}

}  // namespace privmarket
