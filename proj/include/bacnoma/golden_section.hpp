#pragma once

#include <cmath>
#include <cstddef>
#include <limits>

namespace bacnoma {

struct ScalarOptimum {
  double argmax = 0.0;
  double value = -std::numeric_limits<double>::infinity();
};

/// Golden-section search for the maximum of a concave (or unimodal) `f` on
/// [lo, hi]. The bracket endpoints are evaluated as well, so maxima sitting
/// exactly on a bound are returned exactly. `f` may return -inf outside its
/// domain as long as the finite part is an interval.
template <class F>
ScalarOptimum golden_section_maximize(F&& f, double lo, double hi, std::size_t iterations = 80) {
  ScalarOptimum best{lo, f(lo)};
  auto consider = [&best](double x, double v) {
    if (v > best.value) best = {x, v};
  };
  if (!(hi > lo)) return best;
  consider(hi, f(hi));

  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  consider(c, fc);
  consider(d, fd);
  for (std::size_t i = 0; i < iterations; ++i) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
      consider(c, fc);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
      consider(d, fd);
    }
  }
  return best;
}

}  // namespace bacnoma
