// Iterative bidding dynamics: holders repeatedly best-respond to the
// announced price in myopic form, the broker adjusts the price against the
// supply gap by a projected step.
//
//   b_i(k) = [ (M_i)^{-1}(p(k)) / p(k) ]+        M_i = C'_i  (competitive)
//                                                M_i = D'_i  (oligopoly)
//   p(k+1) = [ p(k) - step * (sum_i b_i(k) p(k) - d) ]+
//
// With a step below 1/(2 sum_i b_i) near the fixed point the iteration
// contracts; the fixed points are exactly the PCE and ONE clearing prices.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "privmarket/equilibrium.hpp"
#include "privmarket/errors.hpp"
#include "privmarket/scenario.hpp"

namespace privmarket {

struct TolerancePair {
  double abs_tol = 1e-8;
  double rel_tol = 1e-8;
};

struct IterationRecord {
  long k = 0;
  double price = 0.0;
  std::vector<double> bids;
  double supply_gap = 0.0;   // sum_i b_i(k) p(k) - d
  double price_step = 0.0;   // |p(k+1) - p(k)|
};

struct Trajectory {
  std::vector<IterationRecord> records;
  bool converged = false;
  EquilibriumResult final_state;  // snapshot of the last recorded iterate
};

// Probe price used to tune the dynamics and to seed p(0): the largest
// marginal cost at an equal demand split.
template <class Cost>
double probe_price(const BasicScenario<Cost>& s) {
  return max_marginal_at(s, s.demand / static_cast<double>(s.size()));
}

// Step size 1/(2 sum_i b_hat_i) with the bids the holders would place at the
// probe price; halves the worst-case price correction and scales correctly
// with both cost units and holder count.
template <class Cost>
double recommend_step_size(const BasicScenario<Cost>& s) {
  double p_hat = probe_price(s);
  double total_bid = 0.0;
  for (const auto& c : s.holders) total_bid += inverse_marginal(c, p_hat) / p_hat;
  return 1.0 / (2.0 * total_bid);
}

namespace detail {

template <class Cost, class BidFn>
Trajectory run_bidding(const BasicScenario<Cost>& s, EquilibriumKind kind,
                       BidFn&& bid_at, double p0, double step_size,
                       long max_iters, TolerancePair tol) {
  if (!(std::isfinite(p0) && p0 > 0.0))
    throw std::invalid_argument("bidding dynamics: initial price must be > 0");
  if (!(std::isfinite(step_size) && step_size > 0.0))
    throw std::invalid_argument("bidding dynamics: step size must be > 0");
  if (max_iters < 1)
    throw std::invalid_argument("bidding dynamics: at least one iteration is required");

  const double d = s.demand;
  const double gap_tol = tol.abs_tol + tol.rel_tol * d;
  const double blowup = 1e6 * d;

  Trajectory traj;
  double p = p0;
  int zero_projections = 0;
  for (long k = 0; k < max_iters; ++k) {
    IterationRecord rec;
    rec.k = k;
    rec.price = p;
    rec.bids.reserve(s.size());
    double supply = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
      double b = p > 0.0 ? std::max(0.0, bid_at(i, p)) : 0.0;
      rec.bids.push_back(b);
      supply += b * p;
    }
    rec.supply_gap = supply - d;

    double raw = p - step_size * rec.supply_gap;
    double p_next = std::max(0.0, raw);
    rec.price_step = std::fabs(p_next - p);
    traj.records.push_back(std::move(rec));
    const IterationRecord& last = traj.records.back();

    if (std::fabs(last.supply_gap) > blowup)
      throw DivergedError("bidding dynamics diverged: supply gap exceeded 1e6 * demand at iteration " +
                              std::to_string(k),
                          k, last.supply_gap);
    if (raw <= 0.0) {
      ++zero_projections;
      // a zero price is outside the bid map's domain; bouncing off zero
      // repeatedly means the step cannot contract (once is recoverable)
      if (p == 0.0 || zero_projections >= 3)
        throw DivergedError("bidding dynamics diverged: price projected to zero at iteration " +
                                std::to_string(k),
                            k, last.supply_gap);
    }
    if (std::fabs(last.supply_gap) <= gap_tol &&
        last.price_step <= tol.abs_tol * std::max(1.0, p)) {
      traj.converged = true;
      break;
    }
    p = p_next;
  }

  const IterationRecord& last = traj.records.back();
  EquilibriumResult snap;
  snap.kind = kind;
  snap.price = last.price;
  for (std::size_t i = 0; i < s.size(); ++i) {
    double q = last.bids[i] * last.price;
    snap.quantities.push_back(q);
    snap.bids.push_back(last.bids[i]);
    if (q > 0.0) snap.participants.push_back(i);
    snap.total_cost += cost(s.holders[i], q);
  }
  traj.final_state = std::move(snap);
  return traj;
}

}  // namespace detail

// Price-taking holders bid toward the competitive equilibrium.
template <class Cost>
Trajectory run_competitive_bidding(const BasicScenario<Cost>& s, double p0,
                                   double step_size, long max_iters = 100000,
                                   TolerancePair tol = {}) {
  return detail::run_bidding(
      s, EquilibriumKind::pce,
      [&](std::size_t i, double p) { return inverse_marginal(s.holders[i], p) / p; },
      p0, step_size, max_iters, tol);
}

// Strategic holders bid toward the oligopolistic Nash equilibrium; requires
// at least three holders, like the equilibrium itself.
template <class Cost>
Trajectory run_oligopoly_bidding(const BasicScenario<Cost>& s, double p0,
                                 double step_size, long max_iters = 100000,
                                 TolerancePair tol = {}) {
  if (s.size() <= 2)
    throw NoEquilibriumError(
        "no oligopolistic Nash equilibrium exists for two holders or fewer");
  return detail::run_bidding(
      s, EquilibriumKind::one,
      [&](std::size_t i, double p) { return inverse_d_marginal(s.holders[i], p, s.demand) / p; },
      p0, step_size, max_iters, tol);
}

// CSV trajectory dump: k,p,b_1..b_n,supply_gap,price_step with 12 significant
// digits, deterministic across runs.
inline std::string to_csv(const Trajectory& traj) {
  std::string out = "k,p";
  std::size_t n = traj.records.empty() ? 0 : traj.records.front().bids.size();
  char buf[64];
  for (std::size_t i = 1; i <= n; ++i) {
    std::snprintf(buf, sizeof buf, ",b_%zu", i);
    out += buf;
  }
  out += ",supply_gap,price_step\n";
  for (const auto& rec : traj.records) {
    std::snprintf(buf, sizeof buf, "%ld", rec.k);
    out += buf;
    auto push = [&](double v) {
      std::snprintf(buf, sizeof buf, ",%.12g", v);
      out += buf;
    };
    push(rec.price);
    for (double b : rec.bids) push(b);
    push(rec.supply_gap);
    push(rec.price_step);
    out += '\n';
  }
  return out;
}

}  // namespace privmarket
