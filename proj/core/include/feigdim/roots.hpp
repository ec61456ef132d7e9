#pragma once

#include <boost/math/tools/roots.hpp>

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <utility>

#include "feigdim/error.hpp"

namespace feigdim {

/// Root of f on [lo, hi] by TOMS 748 (bracketed, superlinear). The bracket
/// must show a sign change; an exact zero at either end is returned as is.
template <class F>
double bracketed_root(F&& f, double lo, double hi, double xtol = 0.0,
                      std::uintmax_t max_iter = 200) {
  const double flo = f(lo);
  const double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0) == (fhi > 0)) {
    throw Error(ErrorCode::RootNotBracketed,
                "no sign change on [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  }
  auto tol = [xtol](double a, double b) {
    return std::abs(b - a) <= std::max(xtol, 4.0 * std::numeric_limits<double>::epsilon() *
                                                 std::max(std::abs(a), std::abs(b)));
  };
  std::uintmax_t iters = max_iter;
  auto [a, b] = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi, tol, iters);
  const double fa = f(a);
  const double fb = f(b);
  return std::abs(fa) <= std::abs(fb) ? a : b;
}

}  // namespace feigdim
