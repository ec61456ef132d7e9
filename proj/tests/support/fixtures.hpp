#pragma once

#include <map>
#include <mutex>

#include "feigdim/fixed_point.hpp"
#include "feigdim/unimodal_system.hpp"

namespace feigdim::testing {

inline constexpr std::size_t kTestDegree = 40;

inline SolverOptions test_solver_options() {
  SolverOptions o;
  o.degree = kTestDegree;
  o.tol = 1e-10;
  return o;
}

/// Fixed points along the continuation chain 2, 4, ..., memoized per process.
inline const FixedPointMap& fixed_point(int ell) {
  static std::map<int, FixedPointMap> memo;
  static std::mutex mu;
  std::lock_guard lock(mu);
  for (int l = 2; l <= ell; l += 2) {
    if (memo.count(l)) continue;
    if (l == 2) {
      memo.emplace(2, solve_fixed_point(Combinatorics::period_doubling(), 2, test_solver_options()));
    } else {
      memo.emplace(l, continue_in_ell(memo.at(l - 2), l, test_solver_options()));
    }
  }
  return memo.at(ell);
}

inline const UnimodalSystem& system(int ell) {
  static std::map<int, UnimodalSystem> memo;
  static std::mutex mu;
  const FixedPointMap& fp = fixed_point(ell);
  std::lock_guard lock(mu);
  auto it = memo.find(ell);
  if (it == memo.end()) it = memo.emplace(ell, UnimodalSystem(fp)).first;
  return it->second;
}

}  // namespace feigdim::testing
