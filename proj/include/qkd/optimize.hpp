#pragma once

// One-dimensional search helpers: golden-section maximization on a bracket,
// grid-then-refine maximization, and bisection for the last positive point
// of a function.

#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>

namespace qkd::optimize {

struct Extremum {
  double x = 0.0;
  double value = 0.0;
};

// Maximizes a unimodal f on [lo, hi] until the bracket is narrower than tol.
template <typename F>
Extremum golden_section_maximize(F&& f, double lo, double hi, double tol) {
  static const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = hi - inv_phi * (hi - lo);
  double d = lo + inv_phi * (hi - lo);
  double fc = f(c);
  double fd = f(d);
  while (hi - lo > tol) {
    if (fc >= fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - inv_phi * (hi - lo);
      fc = f(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + inv_phi * (hi - lo);
      fd = f(d);
    }
  }
  const double x = 0.5 * (lo + hi);
  const double fx = f(x);
  // The midpoint may lose to an interior probe when f is flat.
  if (fc > fx && fc >= fd) return {c, fc};
  if (fd > fx) return {d, fd};
  return {x, fx};
}

// Scans `intervals` uniform steps across [lo, hi], then refines by golden
// section on the two cells around the best grid point.
template <typename F>
Extremum grid_then_golden_maximize(F&& f, double lo, double hi,
                                   std::size_t intervals, double tol) {
  if (!(hi > lo) || intervals == 0) {
    throw std::invalid_argument("grid_then_golden_maximize: empty interval");
  }
  const double step = (hi - lo) / static_cast<double>(intervals);
  std::size_t best = 0;
  double best_value = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k <= intervals; ++k) {
    const double x = k == intervals ? hi : lo + step * static_cast<double>(k);
    const double v = f(x);
    if (v > best_value) {
      best_value = v;
      best = k;
    }
  }
  const double grid_x = best == intervals ? hi : lo + step * static_cast<double>(best);
  if (!std::isfinite(best_value)) return {grid_x, best_value};

  const double a = best == 0 ? lo : grid_x - step;
  const double b = best == intervals ? hi : grid_x + step;
  Extremum refined = golden_section_maximize(f, a, b, tol);
  if (refined.value < best_value) return {grid_x, best_value};
  return refined;
}

// Given positive(lo) and !positive(hi), narrows the bracket until it is
// at most `resolution` wide and returns the last point known positive.
template <typename Pred>
double bisect_last_true(Pred&& positive, double lo, double hi, double resolution) {
  while (hi - lo > resolution) {
    const double mid = 0.5 * (lo + hi);
    if (positive(mid)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

}  // namespace qkd::optimize
