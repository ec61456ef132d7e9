#pragma once

#include <complex>
#include <functional>
#include <ostream>
#include <span>
#include <vector>

#include "feigdim/unimodal_system.hpp"

namespace feigdim {

struct DominanceRow {
  int ell = 0;
  double lambda = 0.0;  // (G^eps)'(x_c)
  double b = 0.0;
  double a = 0.0;
  double N = 0.0;
  double dominance_ratio = 0.0;  // |b| / |lambda - 1|
  double sigma = 0.0;            // lambda^{-2}
  double d = 0.0;                // (lambda^3 / (2a))^{1/2}
  double identity_rel_error = 0.0;  // | |(G^eps)''| - N lambda (1 - lambda) | / N lambda (1 - lambda)
};

struct PoincareDiagnostics {
  std::vector<DominanceRow> rows;
  double R0 = 25.0;
  double max_ratio = 0.0;
  double max_N = 0.0;

  /// Columns ell,lambda,b,a,N,dominance_ratio.
  void write_csv(std::ostream& out) const;
};

PoincareDiagnostics dominance_table(std::span<const UnimodalSystem> systems);

struct QuadraticNormalization {
  double B = 0.0;
  // Taylor coefficients of h o f o h^{-1}, h(z) = z - B z^2, to third order.
  double lambda = 0.0;
  double quadratic = 0.0;
  double cubic = 0.0;
};

/// For f(z) = lambda z + b z^2 - a z^3: B = b / (lambda (lambda - 1)).
QuadraticNormalization quadratic_normalization(double lambda, double b, double a = 0.0);

/// f(z) = lambda z - a z^3 + sum_j higher[j] z^{4+j}, real coefficients.
class ParabolicModel {
 public:
  ParabolicModel(double lambda, double a, std::vector<double> higher = {}, double R0 = 25.0);

  double lambda() const noexcept { return lambda_; }
  double a() const noexcept { return a_; }
  double sigma() const noexcept { return sigma_; }
  double d() const noexcept { return d_; }
  double R0() const noexcept { return R0_; }

  std::complex<double> f(std::complex<double> z) const;
  /// g(w) = h^{-1}(f(h(w))), h(w) = d w^{-1/2} (principal branch); needs Re w > R0.
  std::complex<double> g(std::complex<double> w) const;
  /// alpha(w) = g(w) - sigma w - 1.
  std::complex<double> alpha(std::complex<double> w) const;

 private:
  double lambda_, a_;
  std::vector<double> higher_;
  double R0_;
  double sigma_, d_;
};

/// sup |alpha(w)| |w|^{1/2} over a grid with Re w in [R0, extent * R0].
double alpha_decay_sup(const ParabolicModel& model, double extent = 100.0);

struct AffineScanRow {
  double sigma = 0.0;
  double M = 0.0;
  long argmax_i = 0;
};

struct AffineScanResult {
  double p = 0.0;
  double w0 = 0.0;
  long i_max = 0;
  double M = 0.0;  // max over the sigma grid
  std::vector<AffineScanRow> rows;

  /// Columns p,sigma,w0,i_max,M, one row per sigma.
  void write_csv(std::ostream& out) const;
};

/// sup_{1 <= i <= i_max} i^p |(T^i)'(w0)| / |T^i(w0)|^p for T(w) = sigma w + 1.
AffineScanResult affine_derivative_scan(double p, double w0, std::span<const double> sigma_grid, long i_max);

struct PoincareTail {
  double partial_sum = 0.0;
  double tail_estimate = 0.0;
  double total = 0.0;
  long visits = 0;
  double multiplier = 0.0;  // |g'|^t at the last iterate
};

/// Value and derivative of a real map.
using RealMap = std::function<std::pair<double, double>(double)>;

/// sum over i < i_max with g^i(x) in [center - r, center + r] of |(g^i)'(x)|^t,
/// plus a geometric tail estimate when the orbit ends inside V with |g'|^t < 1.
PoincareTail poincare_tail(const RealMap& g, double x, double center, double t, double V_radius,
                           long i_max);
/// Same for g = G^eps at x_c.
PoincareTail poincare_tail(const UnimodalSystem& sys, double t, double x, double V_radius,
                           long i_max);

/// A point on the attracting side of x_c at distance 0.1 |c_2p - c_p|.
double default_petal_point(const UnimodalSystem& sys);

}  // namespace feigdim
