#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "feigdim/chebyshev.hpp"
#include "feigdim/fixed_point.hpp"
#include "feigdim/jet.hpp"

namespace feigdim {

/// Third-order expansion of G^eps at the critical point,
/// G^eps(x_c + h) = x_c + lambda h + b h^2 - a h^3 + O(h^4).
struct TaylorData {
  double lambda = 0.0;
  double b = 0.0;
  double a = 0.0;
};

struct CriticalOrbit {
  std::vector<double> c;   // c[0] = x_c, c[1] = 0, c[2] = 1, c[j+1] = H(c[j])
  std::size_t clamped = 0;  // values pulled back into [0,1] from within 1e-12
};

inline constexpr std::size_t kDefaultOrbitBudget = 4096;

/// Conjugate dynamics H(x) = |E(x)|^ell on [0, 1] derived from a fixed point,
/// with tau = |alpha|^ell and the microscope map G(x) = H^{p-1}(x / tau).
class UnimodalSystem {
 public:
  /// build_system: locates x_c and checks the functional-equation,
  /// normalization and multiplier invariants (InvariantViolation otherwise).
  explicit UnimodalSystem(FixedPointMap fp);

  /// Test seam: a system from an arbitrary diffeomorphism E with one sign
  /// change on (0,1). Only x_c is located; no invariant is enforced.
  static UnimodalSystem synthetic(ChebSeries E, int ell, double tau,
                                  Combinatorics comb = Combinatorics::period_doubling());

  int ell() const noexcept { return ell_; }
  int p() const noexcept { return comb_.p; }
  double tau() const noexcept { return tau_; }
  double x_c() const noexcept { return x_c_; }
  int epsilon() const noexcept { return epsilon_; }
  const std::optional<FixedPointMap>& fixed_point() const noexcept { return fp_; }
  const Combinatorics& combinatorics() const noexcept { return comb_; }

  const ChebSeries& E() const noexcept { return E_[0]; }
  /// k-th derivative series of E, 0 <= k <= 3.
  const ChebSeries& dE(std::size_t k) const { return E_.at(k); }

  double eval_H(double x, int deriv_order = 0) const;
  double eval_G(double x, int deriv_order = 0) const;

  Jet<3> E_jet(double x) const;
  Jet<3> H_jet(double x) const;
  Jet<3> G_jet(double x) const;

  CriticalOrbit critical_orbit(std::size_t n, std::size_t budget = kDefaultOrbitBudget) const;

  /// Interval around x_c on which both laps of H reach H(x).
  std::pair<double, double> involution_neighborhood() const noexcept {
    return {inv_lo_, inv_hi_};
  }
  double involution(double x) const;
  /// I'(x) = -E'(x) / E'(I(x)); equals -1 at x_c.
  double involution_derivative(double x) const;

  /// N = |E''(x_c) / E'(x_c)|.
  double nonsymmetry() const;
  TaylorData taylor_at_fixed_point() const;
  /// Jet of G^eps at x_c.
  Jet<3> g_eps_jet() const;

  /// E^{-1}(y) on [0,1]; y must lie in the range of E.
  double E_inverse(double y) const;
  /// E^{-1}(y) - x_c with full relative accuracy as y -> 0.
  double E_inverse_offset(double y) const;

 private:
  UnimodalSystem(Combinatorics comb, ChebSeries E, int ell, double tau);
  void locate_critical_point();
  void check_invariants() const;

  std::optional<FixedPointMap> fp_;
  Combinatorics comb_;
  int ell_;
  double tau_;
  std::vector<ChebSeries> E_;  // E, E', E'', E'''
  double x_c_ = 0.0;
  int epsilon_ = 2;
  double inv_lo_ = 0.0, inv_hi_ = 1.0;
  std::vector<double> local_taylor_;  // Taylor coefficients of E at x_c, order 1..8
  ChebSeries inverse_guess_;          // interpolant of E^{-1} on [E(1), E(0)]
};

/// Alias matching the operation name used by callers.
inline UnimodalSystem build_system(FixedPointMap fp) { return UnimodalSystem(std::move(fp)); }

/// Recomputes the defect of a (typically loaded) fixed point and throws
/// InvariantViolation when it is not below the stored tolerance.
double revalidate_fixed_point(const FixedPointMap& fp);

}  // namespace feigdim
