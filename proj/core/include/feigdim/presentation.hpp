#pragma once

#include <cstddef>
#include <ostream>
#include <span>
#include <vector>

#include "feigdim/unimodal_system.hpp"

namespace feigdim {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double length() const noexcept { return hi - lo; }
  double mid() const noexcept { return 0.5 * (lo + hi); }
  bool contains(double x, double slack = 0.0) const noexcept {
    return x >= lo - slack && x <= hi + slack;
  }
};

/// Letter (k, m) of the presentation alphabet, k >= 1, 1 <= m <= p-1.
struct Letter {
  int k = 1;
  int m = 1;
  friend bool operator==(const Letter&, const Letter&) = default;
};

struct PsiEval {
  double value = 0.0;
  double offset = 0.0;         // value - x_c, accurate even when value rounds to x_c
  double deriv = 0.0;          // signed derivative (0 once it underflows)
  double log_abs_deriv = 0.0;  // log |psi'(x)|, never underflows
};

struct Cylinder {
  Letter letter;
  double image_of_cp = 0.0;   // psi(c_p)
  double image_of_c2p = 0.0;  // psi(c_{2p})
  double lo_offset = 0.0;     // sorted endpoints relative to x_c
  double hi_offset = 0.0;
  double log_sup_deriv = 0.0;  // over I
  double log_min_deriv = 0.0;

  double sup_deriv() const;
  double min_deriv() const;
  double lo(double x_c) const noexcept { return x_c + lo_offset; }
  double hi(double x_c) const noexcept { return x_c + hi_offset; }
};

struct DecayRow {
  int k = 0;
  double abs_deriv = 0.0;
  double scaled = 0.0;  // k^{3/2} |psi'_{k,m}(x)|
};

struct DecayProfile {
  std::vector<DecayRow> rows;
  double loglog_slope = 0.0;  // least squares of log|psi'| against log k on the window
  double loglin_slope = 0.0;  // least squares of log|psi'| against k on the window
};

struct PresentationOptions {
  double j_margin = 0.2;  // J = I inflated by this fraction of |I| on each side
  std::size_t orbit_budget = kDefaultOrbitBudget;
  std::size_t deriv_samples = 33;  // samples of I for sup/min |psi'|
  std::size_t max_word_depth = 16;
};

/// Alphabet truncation default: 40 up to ell = 8, proportional to ell above.
int default_kmax(int ell);

/// The infinite IFS psi_{k,m} = G^k o H^{-(p-m)} on I = [c_p, c_{2p}],
/// truncated at k <= Kmax. Invariants are verified at construction.
class PresentationSystem {
 public:
  PresentationSystem(UnimodalSystem sys, int kmax, PresentationOptions opts = {});

  const UnimodalSystem& system() const noexcept { return sys_; }
  int kmax() const noexcept { return kmax_; }
  int p() const noexcept { return sys_.p(); }
  std::size_t alphabet_size() const noexcept { return cylinders_.size(); }
  /// Flat letter index (k-1)(p-1) + (m-1) and back.
  std::size_t letter_index(Letter l) const;
  Letter letter_at(std::size_t index) const;

  Interval I() const noexcept { return I_; }
  double c_p() const noexcept { return c_p_; }
  double c_2p() const noexcept { return c_2p_; }
  Interval J() const noexcept { return J_; }
  double lambda_rho() const noexcept { return lambda_rho_; }

  /// Directly iterated critical orbit c_0..c_n (n limited by the budget) and
  /// a first-order bound on its accumulated rounding error.
  const CriticalOrbit& orbit() const noexcept { return orbit_; }
  const std::vector<double>& orbit_error() const noexcept { return orbit_error_; }
  double orbit_point(std::size_t j) const;

  std::span<const Cylinder> cylinders() const noexcept { return cylinders_; }
  const Cylinder& cylinder(Letter l) const { return cylinders_.at(letter_index(l)); }

  /// psi_{k,m} = H^{-1} o tau^{-k} o H^{-(p-m-1)} (log-space, accurate for any k).
  PsiEval psi(Letter l, double x) const;
  double psi(Letter l, double x, int deriv) const;
  /// psi_{k,m} = G^k o H^{-(p-m)}, the composition form, for cross-validation.
  double psi_composition(Letter l, double x, int deriv) const;

  /// phi_w = psi_{w_1} o ... o psi_{w_n}; the empty word is the identity.
  PsiEval word_map(std::span<const Letter> word, double x) const;
  Interval cylinder_of_word(std::span<const Letter> word) const;

  /// sup over letters and x in I of |psi'(x)| rho(psi(x)) / rho(x), rho the
  /// hyperbolic density of the disk on J = I inflated by `margin`.
  double contraction_certificate(double margin) const;
  double contraction_certificate_for(Letter l, double margin) const;

  DecayProfile decay_profile(int m, double x, int k_lo, int k_hi) const;

  /// Upper bound on sum_{k > K, m} sup_I |psi'_{k,m}|^t (geometric extrapolation).
  double tail_bound(int K, double t) const;

  /// Max over sampled pairs of |phi_w'(x)| / |phi_w'(y)| for words up to `depth`
  /// over letters k <= k_limit.
  double distortion_estimate(int depth, int k_limit) const;

 private:
  void build_orbit();
  void build_branches();
  void build_cylinders();
  void verify() const;
  void check_branch_monotonicity() const;
  void certify_contraction();

  // H^{-(steps)} along the orbit chain starting from I; value and derivative.
  std::pair<double, double> inverse_chain(int m, int steps, double x) const;
  int lap_side(std::size_t orbit_index) const;  // -1 left of x_c, +1 right

  UnimodalSystem sys_;
  int kmax_;
  PresentationOptions opts_;
  CriticalOrbit orbit_;
  std::vector<double> orbit_error_;
  double c_p_ = 0.0, c_2p_ = 0.0;
  Interval I_, J_;
  double lambda_rho_ = 1.0;
  int g_sign_ = -1;       // sign of G'(x_c)
  double e_left_sign_ = 1.0;  // sign of E left of x_c
  std::vector<Cylinder> cylinders_;
};

/// Columns k,m,left,right,sup_deriv,min_deriv.
void write_cylinders_csv(const PresentationSystem& ps, std::ostream& out);

}  // namespace feigdim
