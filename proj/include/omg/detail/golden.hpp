#pragma once

#include <algorithm>
#include <cmath>

namespace omg::detail {

// Golden-section minimization of a unimodal f on [lo, hi]; returns the
// argmin.  Termination on interval width relative to the coordinate scale.
template <class F>
double golden_section_min(F&& f, double lo, double hi, double rel_tol = 1e-10) {
  constexpr double inv_phi = 0.6180339887498949;
  double a = lo, b = hi;
  if (!(b > a)) return a;
  double x1 = b - inv_phi * (b - a);
  double x2 = a + inv_phi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  const double scale = std::max({std::abs(a), std::abs(b), 1.0});
  while (b - a > rel_tol * scale) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = f(x2);
    }
  }
  return f1 <= f2 ? x1 : x2;
}

}  // namespace omg::detail
