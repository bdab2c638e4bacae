// Small numeric kernels shared by the solvers: bisection on monotone
// functions, adaptive Simpson quadrature, golden-section maximization.
#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <utility>

namespace privmarket::numeric {

// Root of f(x) = target for nondecreasing f with f(lo) <= target <= f(hi).
// Refines the bracket until its width drops below x_tol or the endpoints are
// adjacent doubles, so passing x_tol = 0 drives the bracket to machine width.
template <class F>
double solve_increasing(F&& f, double lo, double hi, double target,
                        double x_tol = 0.0, int max_iterations = 250) {
  if (!(lo <= hi)) throw std::invalid_argument("solve_increasing: empty bracket");
  for (int it = 0; it < max_iterations; ++it) {
    if (hi - lo <= x_tol) break;
    double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    double v = f(mid);
    if (v == target) return mid;
    if (v < target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// Integral of f over [a, b] by adaptive Simpson subdivision with absolute
// tolerance abs_tol.  Throws if the subdivision budget is exhausted, rather
// than returning a silently degraded value.
template <class F>
double adaptive_simpson(F&& f, double a, double b, double abs_tol = 1e-12,
                        std::size_t max_subdivisions = 1000000) {
  struct Segment {
    double a, b, fa, fm, fb, whole;
  };
  auto simpson = [](double fa, double fm, double fb, double width) {
    return width / 6.0 * (fa + 4.0 * fm + fb);
  };

  double m0 = 0.5 * (a + b);
  double fa0 = f(a), fm0 = f(m0), fb0 = f(b);
  Segment stack[2048];
  int top = 0;
  stack[top++] = {a, b, fa0, fm0, fb0, simpson(fa0, fm0, fb0, b - a)};

  double total = 0.0;
  std::size_t used = 0;
  while (top > 0) {
    Segment s = stack[--top];
    double m = 0.5 * (s.a + s.b);
    double lm = 0.5 * (s.a + m), rm = 0.5 * (m + s.b);
    double flm = f(lm), frm = f(rm);
    double left = simpson(s.fa, flm, s.fm, m - s.a);
    double right = simpson(s.fm, frm, s.fb, s.b - m);
    double err = left + right - s.whole;
    // the halved interval gets half the tolerance budget
    double budget = abs_tol * (s.b - s.a) / (b - a);
    if (std::fabs(err) <= 15.0 * budget || m - s.a <= 1e-15 * (b - a)) {
      total += left + right + err / 15.0;
      continue;
    }
    if (++used > max_subdivisions || top + 2 > 2048) {
      throw std::runtime_error("adaptive_simpson: subdivision budget exhausted");
    }
    stack[top++] = {s.a, m, s.fa, flm, s.fm, left};
    stack[top++] = {m, s.b, s.fm, frm, s.fb, right};
  }
  return total;
}

template <class Value>
struct GoldenResult {
  double x;
  Value value;
};

// Argmax of a unimodal f on [lo, hi] by golden-section search; the interval
// is shrunk until its width drops below x_tol.  f may return long double so
// callers can compare payoffs above double's noise floor.
template <class F>
auto golden_section_max(F&& f, double lo, double hi, double x_tol,
                        int max_iterations = 400)
    -> GoldenResult<decltype(f(lo))> {
  using Value = decltype(f(lo));
  constexpr double inv_phi = 0.6180339887498949;
  double a = lo, b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  Value fc = f(c), fd = f(d);
  for (int it = 0; it < max_iterations && b - a > x_tol; ++it) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  double x = 0.5 * (a + b);
  return {x, f(x)};
}

}  // namespace privmarket::numeric
