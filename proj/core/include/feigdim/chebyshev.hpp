#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <utility>
#include <vector>

namespace feigdim {

/// Chebyshev first-kind points mapped onto [lo, hi], ordered from hi to lo
/// (the natural cos ordering).
template <class Real>
std::vector<Real> chebyshev_points(std::size_t n, Real lo = Real(0), Real hi = Real(1)) {
  std::vector<Real> pts(n);
  const Real pi = std::numbers::pi_v<Real>;
  for (std::size_t k = 0; k < n; ++k) {
    const Real s = std::cos((2 * Real(k) + 1) * pi / (2 * Real(n)));
    pts[k] = lo + (hi - lo) * (s + 1) / 2;
  }
  return pts;
}

/// Truncated Chebyshev expansion f(u) = sum_j c_j T_j(s), s = (2u - lo - hi)/(hi - lo).
template <class Real>
class BasicChebSeries {
 public:
  BasicChebSeries() = default;
  explicit BasicChebSeries(std::vector<Real> coeffs, Real lo = Real(0), Real hi = Real(1))
      : coeffs_(std::move(coeffs)), lo_(lo), hi_(hi) {}

  /// Interpolates f at degree+1 Chebyshev points.
  template <class F>
  static BasicChebSeries interpolate(F&& f, std::size_t degree, Real lo = Real(0),
                                     Real hi = Real(1)) {
    const std::size_t n = degree + 1;
    const Real pi = std::numbers::pi_v<Real>;
    std::vector<Real> values(n);
    for (std::size_t k = 0; k < n; ++k) {
      const Real s = std::cos((2 * Real(k) + 1) * pi / (2 * Real(n)));
      values[k] = f(lo + (hi - lo) * (s + 1) / 2);
    }
    std::vector<Real> c(n, Real(0));
    for (std::size_t j = 0; j < n; ++j) {
      Real acc = 0;
      for (std::size_t k = 0; k < n; ++k) {
        acc += values[k] * std::cos(Real(j) * (2 * Real(k) + 1) * pi / (2 * Real(n)));
      }
      c[j] = acc * 2 / Real(n);
    }
    c[0] /= 2;
    return BasicChebSeries(std::move(c), lo, hi);
  }

  /// Converts a power series in u (coefficient i multiplies u^i) on [0, 1].
  static BasicChebSeries from_power(std::span<const Real> power, std::size_t degree) {
    auto poly = [&](Real u) {
      Real acc = 0;
      for (auto it = power.rbegin(); it != power.rend(); ++it) acc = acc * u + *it;
      return acc;
    };
    return interpolate(poly, degree);
  }

  Real operator()(Real u) const { return clenshaw(to_s(u)); }

  /// d/du of the series, as a new series on the same interval.
  BasicChebSeries derivative() const {
    const std::size_t n = coeffs_.size();
    if (n <= 1) return BasicChebSeries(std::vector<Real>{Real(0)}, lo_, hi_);
    std::vector<Real> d(n - 1, Real(0));
    // d_{k-1} = d_{k+1} + 2k c_k, run downwards.
    Real next = 0, next2 = 0;
    for (std::size_t k = n - 1; k >= 1; --k) {
      const Real dk = next2 + 2 * Real(k) * coeffs_[k];
      d[k - 1] = dk;
      next2 = next;
      next = dk;
    }
    d[0] /= 2;
    const Real scale = 2 / (hi_ - lo_);
    for (auto& v : d) v *= scale;
    return BasicChebSeries(std::move(d), lo_, hi_);
  }

  /// T_0(s) ... T_degree(s) at u; used to assemble collocation Jacobians.
  void basis_row(Real u, std::span<Real> out) const {
    const Real s = to_s(u);
    if (out.empty()) return;
    out[0] = 1;
    if (out.size() > 1) out[1] = s;
    for (std::size_t j = 2; j < out.size(); ++j) out[j] = 2 * s * out[j - 1] - out[j - 2];
  }

  const std::vector<Real>& coeffs() const noexcept { return coeffs_; }
  std::vector<Real>& coeffs() noexcept { return coeffs_; }
  std::size_t degree() const noexcept { return coeffs_.empty() ? 0 : coeffs_.size() - 1; }
  Real lo() const noexcept { return lo_; }
  Real hi() const noexcept { return hi_; }

 private:
  Real to_s(Real u) const { return (2 * u - lo_ - hi_) / (hi_ - lo_); }

  Real clenshaw(Real s) const {
    Real b1 = 0, b2 = 0;
    for (std::size_t k = coeffs_.size(); k-- > 1;) {
      const Real b0 = 2 * s * b1 - b2 + coeffs_[k];
      b2 = b1;
      b1 = b0;
    }
    return coeffs_.empty() ? Real(0) : s * b1 - b2 + coeffs_[0];
  }

  std::vector<Real> coeffs_;
  Real lo_ = Real(0);
  Real hi_ = Real(1);
};

using ChebSeries = BasicChebSeries<double>;

}  // namespace feigdim
