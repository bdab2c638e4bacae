// Quadratic privacy-compromise cost family and the derived strategic cost
// used by the oligopoly equilibrium.
//
// A holder's direct cost is C(q) = a q + h q^2 with a >= 0, h > 0, so the
// marginal cost a + 2 h q is strictly increasing.  Under linear supply-function
// bidding against total demand d, strategic behaviour is captured by the
// derived marginal
//
//   D'(q) = (1 + q / (d - 2 q)) * C'(q),   0 <= q < d/2,
//
// which blows up at q = d/2: no holder ever supplies half the demand or more
// at an oligopoly equilibrium.  d_cost integrates D' from 0; for the quadratic
// family the integral has a closed form.
//
// Generic overloads (templates) implement d_marginal, d_cost and
// inverse_d_marginal for any cost family that provides cost(c, q),
// marginal(c, q) and inverse_marginal(c, p), so other convex families can sit
// behind the same solver interface.
#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "privmarket/numeric.hpp"

namespace privmarket {

// Relative guard band around the q = d/2 singularity; quantities at or above
// d/2 * (1 - half_demand_guard) are rejected as out of domain.
inline constexpr double half_demand_guard = 1e-12;

inline double max_strategic_quantity(double demand) {
  return 0.5 * demand * (1.0 - half_demand_guard);
}

struct QuadraticCost {
  double a = 0.0;  // base marginal cost, >= 0
  double h = 0.0;  // curvature, > 0

  QuadraticCost() = default;
  QuadraticCost(double a_, double h_) : a(a_), h(h_) {
    if (!(std::isfinite(a) && a >= 0.0))
      throw std::invalid_argument("QuadraticCost: a must be finite and >= 0");
    if (!(std::isfinite(h) && h > 0.0))
      throw std::invalid_argument("QuadraticCost: h must be finite and > 0");
  }
};

namespace detail {

inline void require_nonnegative_quantity(double q, const char* where) {
  if (!(q >= 0.0))
    throw std::domain_error(std::string(where) + ": quantity must be >= 0");
}

inline void require_positive_demand(double d, const char* where) {
  if (!(std::isfinite(d) && d > 0.0))
    throw std::domain_error(std::string(where) + ": demand must be > 0");
}

// q must sit strictly below the d/2 singularity (within the guard band).
inline void require_strategic_quantity(double q, double d, const char* where) {
  require_nonnegative_quantity(q, where);
  require_positive_demand(d, where);
  if (q >= max_strategic_quantity(d))
    throw std::domain_error(std::string(where) +
                            ": quantity must be below half the demand");
}

}  // namespace detail

inline double cost(const QuadraticCost& c, double q) {
  detail::require_nonnegative_quantity(q, "cost");
  return c.a * q + c.h * q * q;
}

inline double marginal(const QuadraticCost& c, double q) {
  detail::require_nonnegative_quantity(q, "marginal");
  return c.a + 2.0 * c.h * q;
}

// Quantity with marginal cost p, clipped at zero for prices below the base
// marginal cost.
inline double inverse_marginal(const QuadraticCost& c, double p) {
  double q = (p - c.a) / (2.0 * c.h);
  return q > 0.0 ? q : 0.0;
}

// Strategic marginal (1 + q/(d-2q)) * C'(q); defined for 0 <= q < d/2.
template <class Cost>
double d_marginal(const Cost& c, double q, double d) {
  detail::require_strategic_quantity(q, d, "d_marginal");
  return (1.0 + q / (d - 2.0 * q)) * marginal(c, q);
}

// Strategic cost by adaptive quadrature of d_marginal; works for any family.
template <class Cost>
double d_cost_by_quadrature(const Cost& c, double q, double d) {
  detail::require_strategic_quantity(q, d, "d_cost");
  return numeric::adaptive_simpson(
      [&](double x) { return d_marginal(c, x, d); }, 0.0, q);
}

template <class Cost>
double d_cost(const Cost& c, double q, double d) {
  return d_cost_by_quadrature(c, q, d);
}

// Closed form for the quadratic family:
//   D(q) = d (a + h d)/4 * ln(d/(d-2q)) + a q/2 - (h/2) q (d - q).
// log1p keeps the logarithm accurate for q << d.
inline double d_cost(const QuadraticCost& c, double q, double d) {
  detail::require_strategic_quantity(q, d, "d_cost");
  double log_term = -std::log1p(-2.0 * q / d);
  return 0.25 * d * (c.a + c.h * d) * log_term + 0.5 * c.a * q -
         0.5 * c.h * q * (d - q);
}

// Quantity with strategic marginal p, clipped at zero below the base marginal
// cost and saturating just under d/2 as p grows without bound.  Bisection on
// the monotone d_marginal; the bracket is driven to machine width, well
// inside the 1e-12 contract, so that per-holder errors cannot stack past the
// market feasibility tolerance.
template <class Cost>
double inverse_d_marginal(const Cost& c, double p, double d) {
  detail::require_positive_demand(d, "inverse_d_marginal");
  if (!(std::isfinite(p)))
    throw std::domain_error("inverse_d_marginal: price must be finite");
  if (p <= marginal(c, 0.0)) return 0.0;
  // largest admissible quantity, one ulp inside the guard band so the result
  // always stays in d_marginal's domain
  double q_hi = std::nextafter(max_strategic_quantity(d), 0.0);
  if (p >= d_marginal(c, q_hi, d)) return q_hi;
  return numeric::solve_increasing(
      [&](double q) { return d_marginal(c, q, d); }, 0.0, q_hi, p);
}

}  // namespace privmarket
