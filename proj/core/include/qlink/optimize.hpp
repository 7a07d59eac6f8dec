#pragma once

#include <algorithm>
#include <cmath>
#include <utility>

namespace qlink {

struct Minimum {
  double x;
  double f;
  int evaluations;
};

/// Golden-section minimization of a unimodal f on [lo, hi], stopping when the
/// bracket is narrower than max(rel_tol * |x|, abs_tol).
template <typename F>
Minimum golden_section(F&& f, double lo, double hi, double rel_tol, double abs_tol = 0.0) {
  constexpr double kInvPhi = 0.6180339887498949;
  if (hi < lo) std::swap(lo, hi);
  double a = lo, b = hi;
  double x1 = b - kInvPhi * (b - a);
  double x2 = a + kInvPhi * (b - a);
  double f1 = f(x1);
  double f2 = f(x2);
  int evals = 2;
  while (b - a > std::max(rel_tol * std::abs(0.5 * (a + b)), abs_tol) && evals < 400) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kInvPhi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kInvPhi * (b - a);
      f2 = f(x2);
    }
    ++evals;
  }
  return f1 <= f2 ? Minimum{x1, f1, evals} : Minimum{x2, f2, evals};
}

}  // namespace qlink
